// SPDX-License-Identifier: Apache-2.0

#include "breakage/agent.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace breakage::agent {

std::string tier_to_string(Tier t) {
  switch (t) {
    case Tier::T1Read: return "T1-read";
    case Tier::T2Mutate: return "T2-mutate";
    case Tier::T3Approved: return "T3-approved";
  }
  return "?";
}

const std::vector<ToolInfo>& tool_registry() {
  static const std::vector<ToolInfo> kTools = {
      {"get-resource", Tier::T1Read, Reversibility::Reversible},
      {"list-pods", Tier::T1Read, Reversibility::Reversible},
      {"read-metrics", Tier::T1Read, Reversibility::Reversible},
      {"read-logs", Tier::T1Read, Reversibility::Reversible},
      {"patch-deployment", Tier::T2Mutate, Reversibility::Reversible},
      {"patch-secret", Tier::T2Mutate, Reversibility::Reversible},
      {"patch-configmap", Tier::T2Mutate, Reversibility::Reversible},
      {"set-flag", Tier::T2Mutate, Reversibility::Reversible},
      {"scale", Tier::T2Mutate, Reversibility::Reversible},
      {"restart", Tier::T2Mutate, Reversibility::Reversible},
      {"apply-networkpolicy", Tier::T3Approved, Reversibility::Irreversible},
      {"multi-resource-apply", Tier::T3Approved, Reversibility::Irreversible},
  };
  return kTools;
}

std::optional<ToolInfo> tool_info(const scenario::ToolName& name) {
  for (const auto& t : tool_registry())
    if (t.name == name) return t;
  return std::nullopt;
}

std::vector<scenario::ToolName> tool_names() {
  std::vector<scenario::ToolName> names;
  for (const auto& t : tool_registry()) names.push_back(t.name);
  return names;
}

Decision SyntheticApprover::approve(const ToolCall& call, std::int64_t tick) {
  Decision d;
  d.approved = !rng_.bernoulli(cfg_.deny_rate);
  d.latency_s = cfg_.delay_s;
  d.audit = AuditEntry{tick, call.tool, d.approved, d.latency_s};
  audit_.push_back(d.audit);
  return d;
}

std::string end_reason_to_string(EndReason r) {
  switch (r) {
    case EndReason::AgentDone: return "agent-done";
    case EndReason::BudgetExhausted: return "budget-exhausted";
    case EndReason::GuardPaused: return "guard-paused";
    case EndReason::FrameworkError: return "framework-error";
  }
  return "?";
}

std::string AgentTranscript::to_jsonl() const {
  using nlohmann::json;
  std::ostringstream os;
  for (const auto& e : events)
    os << json{{"tick", e.tick}, {"kind", e.kind}, {"detail", e.detail}}.dump() << "\n";
  if (postmortem) {
    json pm{{"kind", "postmortem"},
            {"primary_category", postmortem->primary_category},
            {"secondary_categories", postmortem->secondary_categories},
            {"narrative", postmortem->narrative},
            {"synthesized", postmortem_synthesized}};
    os << pm.dump() << "\n";
  }
  os << json{{"kind", "end"}, {"reason", end_reason_to_string(end_reason)}}.dump() << "\n";
  return os.str();
}

std::string incident_brief(const sim::ClusterState& state, const sim::MetricSample& sample) {
  std::ostringstream os;
  bool any = false;
  for (const auto& [key, ps] : state.derived) {
    const auto* d = std::get_if<sim::DeploymentSpec>(&state.resources.at(key));
    if (!d) continue;
    auto logs = sim::render_logs(state, key);
    bool unhealthy = ps.phase != sim::PodPhase::Running || ps.cpu_throttled ||
                     ps.ready_replicas < d->replicas_desired ||
                     !(logs.size() == 1 && logs[0] == "ok: serving traffic");
    if (!unhealthy) continue;
    any = true;
    os << "deployment " << key.ns << "/" << key.name
       << " phase=" << sim::phase_to_string(ps.phase) << " ready=" << ps.ready_replicas << "/"
       << d->replicas_desired;
    if (ps.cpu_throttled) os << " cpu_throttled";
    os << " logs:";
    for (const auto& line : logs) os << " " << line;
    os << "\n";
  }
  if (!any) os << "all deployments healthy\n";
  os << sim::render_metrics(sample);
  return os.str();
}

// ---------------------------------------------------------------------------
// Loop
// ---------------------------------------------------------------------------

namespace {

struct LoopState {
  sim::ClusterState state;
  sim::MetricSample last_sample;
  detector::ScenarioDetector* det;
  detector::BackendAvailability backends;
  std::int64_t ticks_used = 0;
  int budget = 0;

  int remaining() const { return budget - static_cast<int>(ticks_used); }

  void advance(int n) {
    for (int i = 0; i < n && remaining() > 0; ++i) {
      auto [next, sample] = sim::tick(state);
      state = std::move(next);
      last_sample = sample;
      ticks_used += 1;
      det->observe(state, last_sample, backends);
    }
  }
};

Value scalar_to_value_for_patch(const Value& v) { return v; }

// Executes a Tier-1 read; never mutates.
Observation run_read_tool(const LoopState& ls, const ToolCall& call) {
  Observation obs{call.tool, "", true};
  if (call.tool == "list-pods") {
    obs.result = sim::render_pods(ls.state);
    return obs;
  }
  if (call.tool == "read-metrics") {
    obs.result = sim::render_metrics(ls.last_sample);
    return obs;
  }
  if (!call.target) return {call.tool, "tool requires a target", false};
  if (call.tool == "get-resource") {
    auto it = ls.state.resources.find(*call.target);
    if (it == ls.state.resources.end()) return {call.tool, "no such resource", false};
    obs.result = call.target->str() + ": " + sim::render_resource(it->second);
    return obs;
  }
  if (call.tool == "read-logs") {
    std::ostringstream os;
    for (const auto& line : sim::render_logs(ls.state, *call.target)) os << line << "; ";
    obs.result = os.str();
    return obs;
  }
  return {call.tool, "unknown read tool", false};
}

std::optional<guard::Mutation> mutation_of(const ToolCall& call, std::string* error) {
  if (!call.target) {
    *error = "tool requires a target";
    return std::nullopt;
  }
  guard::Mutation m;
  m.target = *call.target;
  if (call.tool == "restart") {
    m.restart = true;
    return m;
  }
  if (call.tool == "scale") {
    auto it = call.args.find("replicas");
    if (it == call.args.end()) {
      *error = "scale requires a replicas argument";
      return std::nullopt;
    }
    m.patch["replicas_desired"] = it->second;
    return m;
  }
  if (call.args.empty()) {
    *error = "mutation has no fields";
    return std::nullopt;
  }
  for (const auto& [k, v] : call.args) m.patch[k] = scalar_to_value_for_patch(v);
  return m;
}

bool target_kind_matches(const ToolCall& call) {
  if (!call.target) return false;
  auto kind = call.target->kind;
  if (call.tool == "patch-deployment" || call.tool == "scale" || call.tool == "restart")
    return kind == sim::ResourceKind::Deployment;
  if (call.tool == "patch-secret") return kind == sim::ResourceKind::Secret;
  if (call.tool == "patch-configmap") return kind == sim::ResourceKind::ConfigMap;
  if (call.tool == "set-flag") return kind == sim::ResourceKind::FeatureFlag;
  if (call.tool == "apply-networkpolicy") return kind == sim::ResourceKind::NetworkPolicy;
  return true;
}

}  // namespace

LoopResult run_agent_loop(AgentBehavior& agent, const scenario::ScenarioSpec& spec,
                          sim::ClusterState state, detector::ScenarioDetector& det,
                          const AgentContext& ctx, const LoopConfig& cfg,
                          std::int64_t ticks_used) {
  LoopResult result;
  LoopState ls{std::move(state), {}, &det, cfg.backends, ticks_used, spec.time_budget_s};
  guard::GuardState guard_state = cfg.guard;
  SyntheticApprover approver(cfg.approver);
  AgentTranscript& tr = result.transcript;
  std::vector<Observation> observations;
  int denials = 0;

  {
    std::ostringstream os;
    os << "exemplars=" << ctx.exemplars.size();
    for (const auto& r : ctx.exemplars) os << " " << r.postmortem.id;
    tr.events.push_back({ls.state.clock.tick, "retrieval", os.str()});
  }
  agent.begin(ctx);

  auto reader = [&ls](const sim::ResourceKey& key,
                      const std::string& path) -> std::optional<Value> {
    return sim::read_field(ls.state, key, path);
  };

  tr.end_reason = EndReason::BudgetExhausted;
  while (true) {
    if (ls.remaining() <= 0) {
      tr.end_reason = EndReason::BudgetExhausted;
      break;
    }
    AgentView view{observations, guard_state.last_revert_reason, ls.remaining(), denials, reader};
    AgentAction action;
    try {
      action = agent.next(view);
    } catch (const std::exception& e) {
      // Agent-internal exceptions are reasoning failures, scored as-is.
      tr.events.push_back({ls.state.clock.tick, "agent-exception", e.what()});
      tr.end_reason = EndReason::AgentDone;
      break;
    }

    if (std::holds_alternative<ActDone>(action)) {
      tr.end_reason = EndReason::AgentDone;
      break;
    }
    if (std::holds_alternative<ActIdle>(action)) {
      ls.advance(1);
      continue;
    }
    if (const auto* hyp = std::get_if<ActHypothesis>(&action)) {
      experience::HypothesisRecord rec{ls.state.clock.tick, hyp->category, hyp->confidence,
                                       hyp->note};
      tr.hypotheses.push_back(rec);
      tr.events.push_back(
          {ls.state.clock.tick, "hypothesis", hyp->category + " confidence=" +
                                                  value_to_string(Value{hyp->confidence})});
      ls.advance(1);
      continue;
    }

    const auto& call = std::get<ActCallTool>(action).call;
    auto info = tool_info(call.tool);
    tr.tool_calls.push_back(call.tool);
    tr.events.push_back({ls.state.clock.tick, "tool",
                         call.tool + (call.target ? " " + call.target->str() : "")});
    if (!info) {
      observations.push_back({call.tool, "unknown tool", false});
      ls.advance(1);
      continue;
    }

    if (info->tier == Tier::T1Read) {
      auto obs = run_read_tool(ls, call);
      observations.push_back(obs);
      tr.events.push_back({ls.state.clock.tick, "observation", obs.result});
      ls.advance(1);
      continue;
    }

    if (info->tier == Tier::T2Mutate) {
      std::string error;
      auto mutation = mutation_of(call, &error);
      if (!mutation || !target_kind_matches(call)) {
        observations.push_back(
            {call.tool, mutation ? "target kind mismatch" : error, false});
        ls.advance(1);
        continue;
      }
      if (!ls.state.resources.count(mutation->target)) {
        observations.push_back({call.tool, "no such resource", false});
        ls.advance(1);
        continue;
      }
      auto outcome = guard::guard_mutation(ls.state, guard_state, *mutation, det, ls.remaining(),
                                           &ls.last_sample, cfg.backends);
      ls.ticks_used += outcome.ticks_consumed;
      switch (outcome.kind) {
        case guard::GuardOutcomeKind::Applied:
          observations.push_back({call.tool, "applied", true});
          tr.events.push_back({ls.state.clock.tick, "observation", "mutation applied"});
          break;
        case guard::GuardOutcomeKind::Reverted:
          observations.push_back({call.tool, outcome.reason->str(), false});
          tr.events.push_back({ls.state.clock.tick, "revert", outcome.reason->str()});
          break;
        case guard::GuardOutcomeKind::Paused:
          tr.events.push_back({ls.state.clock.tick, "pause",
                               "revert cap reached; mutation refused, awaiting human review"});
          tr.end_reason = EndReason::GuardPaused;
          break;
        case guard::GuardOutcomeKind::FrameworkError:
          // An ill-formed mutation is the agent's mistake; report it as a
          // failed tool call and keep the run alive.
          observations.push_back({call.tool, outcome.error, false});
          tr.events.push_back({ls.state.clock.tick, "observation", outcome.error});
          ls.advance(1);
          break;
      }
      if (tr.end_reason == EndReason::GuardPaused) break;
      continue;
    }

    // Tier-3: through the synthetic approver.
    auto decision = approver.approve(call, ls.state.clock.tick);
    ls.advance(std::max(1, decision.latency_s));
    if (!decision.approved) {
      denials += 1;
      observations.push_back({call.tool, "approval denied", false});
      tr.events.push_back({ls.state.clock.tick, "denial", call.tool});
      continue;
    }
    tr.events.push_back({ls.state.clock.tick, "approval", call.tool});
    try {
      if (call.tool == "multi-resource-apply") {
        // args keyed "Kind/ns/name:field_path" -> value
        std::map<sim::ResourceKey, FieldPatch> patches;
        for (const auto& [k, v] : call.args) {
          auto colon = k.rfind(':');
          if (colon == std::string::npos) throw Error(ErrorKind::Schema, "bad multi-apply key");
          auto ref = k.substr(0, colon);
          auto first = ref.find('/');
          auto second = ref.find('/', first + 1);
          auto kind = sim::kind_from_string(ref.substr(0, first));
          if (!kind || second == std::string::npos)
            throw Error(ErrorKind::Schema, "bad multi-apply resource ref");
          sim::ResourceKey key{*kind, ref.substr(first + 1, second - first - 1),
                               ref.substr(second + 1)};
          patches[key][k.substr(colon + 1)] = v;
        }
        for (const auto& [key, patch] : patches)
          ls.state = sim::apply_mutation(ls.state, key, patch, /*create=*/true);
      } else {  // apply-networkpolicy
        if (!call.target) throw Error(ErrorKind::Schema, "tool requires a target");
        FieldPatch patch;
        for (const auto& [k, v] : call.args) patch[k] = v;
        ls.state = sim::apply_mutation(ls.state, *call.target, patch, /*create=*/true);
      }
      observations.push_back({call.tool, "applied", true});
    } catch (const Error& e) {
      observations.push_back({call.tool, e.what(), false});
    }
  }

  auto draft = agent.finalize();
  if (draft) {
    tr.postmortem = draft;
  } else {
    // Synthesized minimal postmortem; diagnosis credit is zero by marker.
    tr.postmortem = PostmortemDraft{"no-postmortem", {}, "agent emitted no postmortem"};
    tr.postmortem_synthesized = true;
  }
  tr.events.push_back({ls.state.clock.tick, "postmortem",
                       tr.postmortem->primary_category +
                           (tr.postmortem_synthesized ? " (synthesized)" : "")});

  result.state = std::move(ls.state);
  result.last_sample = ls.last_sample;
  result.guard = guard_state;
  result.ticks_used = ls.ticks_used;
  return result;
}

// ---------------------------------------------------------------------------
// Focus + remedies
// ---------------------------------------------------------------------------

std::optional<sim::ResourceKey> focus_deployment(const sim::ClusterState& state) {
  // Non-running phase first, then throttle, then a readiness gap, then a
  // deployment targeted by an enabled flag or a denied edge.
  for (const auto& [key, ps] : state.derived)
    if (ps.phase != sim::PodPhase::Running) return key;
  for (const auto& [key, ps] : state.derived)
    if (ps.cpu_throttled) return key;
  for (const auto& [key, ps] : state.derived) {
    const auto* d = std::get_if<sim::DeploymentSpec>(&state.resources.at(key));
    if (d && d->replicas_desired > ps.ready_replicas) return key;
  }
  for (const auto& [key, res] : state.resources) {
    if (const auto* f = std::get_if<sim::FeatureFlagSpec>(&res); f && f->enabled)
      return sim::ResourceKey{sim::ResourceKind::Deployment, key.ns, f->target};
    if (const auto* np = std::get_if<sim::NetworkPolicySpec>(&res);
        np && !np->denied_edges.empty())
      return sim::ResourceKey{sim::ResourceKind::Deployment, key.ns,
                              np->denied_edges.front().from};
  }
  return std::nullopt;
}

std::optional<std::string> extract_remedy(const std::string& narrative) {
  auto pos = narrative.find("remedy=");
  if (pos == std::string::npos) return std::nullopt;
  auto end = narrative.find_first_of(" \n\t", pos);
  return narrative.substr(pos + 7, end == std::string::npos ? std::string::npos : end - pos - 7);
}

std::optional<ToolCall> materialize_remedy(
    const std::string& remedy, const sim::ResourceKey& focus,
    const std::function<std::optional<Value>(const sim::ResourceKey&, const std::string&)>&
        read) {
  auto colon = remedy.find(':');
  std::string name = remedy.substr(0, colon == std::string::npos ? remedy.size() : colon);
  std::string arg = colon == std::string::npos ? "" : remedy.substr(colon + 1);

  if (name == "raise-memory-limit") {
    auto ws = read(focus, "memory_working_set_mib");
    if (!ws) return std::nullopt;
    auto n = value_as_number(*ws);
    return ToolCall{"patch-deployment", focus,
                    {{"memory_limit_mib", static_cast<std::int64_t>(*n * 2)}}};
  }
  if (name == "raise-cpu-limit") {
    auto demand = read(focus, "cpu_demand_millicores");
    if (!demand) return std::nullopt;
    return ToolCall{"patch-deployment", focus, {{"cpu_limit_millicores", *demand}}};
  }
  if (name == "restore-secret-key") {  // restore-secret-key:<secret>/<key>
    auto slash = arg.find('/');
    if (slash == std::string::npos) return std::nullopt;
    sim::ResourceKey secret{sim::ResourceKind::Secret, focus.ns, arg.substr(0, slash)};
    return ToolCall{"patch-secret", secret,
                    {{"data." + arg.substr(slash + 1), std::string("restored-by-agent")}}};
  }
  if (name == "restore-secret-value") {  // restore-secret-value:<secret>/<key>=<value>
    auto slash = arg.find('/');
    auto eq = arg.find('=');
    if (slash == std::string::npos || eq == std::string::npos || eq < slash) return std::nullopt;
    sim::ResourceKey secret{sim::ResourceKind::Secret, focus.ns, arg.substr(0, slash)};
    return ToolCall{"patch-secret", secret,
                    {{"data." + arg.substr(slash + 1, eq - slash - 1), arg.substr(eq + 1)}}};
  }
  if (name == "fix-probe-path") {  // fix-probe-path:liveness=/healthz
    auto eq = arg.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string probe = arg.substr(0, eq);
    return ToolCall{"patch-deployment", focus,
                    {{probe + "_probe.path", arg.substr(eq + 1)}}};
  }
  if (name == "scale-up") {
    std::int64_t replicas = 1;
    if (auto cur = read(focus, "replicas_desired")) {
      auto n = value_as_number(*cur);
      if (n && *n > 1) replicas = static_cast<std::int64_t>(*n);
    }
    return ToolCall{"scale", focus, {{"replicas", replicas}}};
  }
  if (name == "disable-flag")  // disable-flag:<flag-name>
    return ToolCall{"set-flag",
                    sim::ResourceKey{sim::ResourceKind::FeatureFlag, focus.ns, arg},
                    {{"enabled", false}}};
  if (name == "fix-image")  // fix-image:<image>
    return ToolCall{"patch-deployment", focus, {{"image", arg}}};
  if (name == "fix-env-var") {  // fix-env-var:<NAME>=<value>
    auto eq = arg.find('=');
    if (eq == std::string::npos) return std::nullopt;
    return ToolCall{"patch-deployment", focus,
                    {{"env." + arg.substr(0, eq), arg.substr(eq + 1)}}};
  }
  if (name == "lower-cpu-demand") {
    if (arg.empty()) return std::nullopt;
    return ToolCall{"patch-deployment", focus,
                    {{"cpu_demand_millicores", static_cast<std::int64_t>(std::stol(arg))}}};
  }
  if (name == "restart") return ToolCall{"restart", focus, {}};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reference agents
// ---------------------------------------------------------------------------

OracleAgent::OracleAgent(scenario::GroundTruth truth, std::vector<ToolCall> probes,
                         std::vector<ToolCall> fix)
    : truth_(std::move(truth)), probes_(std::move(probes)), fix_(std::move(fix)) {}

void OracleAgent::begin(const AgentContext&) {}

AgentAction OracleAgent::next(const AgentView&) {
  if (step_ < probes_.size()) return ActCallTool{probes_[step_++]};
  if (!hypothesis_emitted_) {
    hypothesis_emitted_ = true;
    return ActHypothesis{truth_.primary_category, 0.9, "root cause identified"};
  }
  size_t fix_index = step_ - probes_.size();
  if (fix_index < fix_.size()) {
    step_ += 1;
    return ActCallTool{fix_[fix_index]};
  }
  done_ = true;
  return ActDone{};
}

std::optional<PostmortemDraft> OracleAgent::finalize() {
  PostmortemDraft draft;
  draft.primary_category = truth_.primary_category;
  draft.secondary_categories = truth_.secondary_categories;
  draft.narrative = "identified " + truth_.primary_category + " and applied the corrective patch";
  return draft;
}

std::optional<PostmortemDraft> NullAgent::finalize() {
  return PostmortemDraft{"clock-skew", {}, "no investigation performed"};
}

NoisyOracleAgent::NoisyOracleAgent(scenario::GroundTruth truth, std::vector<ToolCall> probes,
                                   std::vector<ToolCall> fix, double p_wrong, std::uint64_t seed)
    : OracleAgent(std::move(truth), std::move(probes), std::move(fix)) {
  Rng rng(seed);
  wrong_ = rng.bernoulli(p_wrong);
  if (!wrong_) return;

  // Same fix tool, harmless wrong arguments: the investigation looks the
  // same from the outside but does not address the fault.
  for (auto& call : fix_) {
    if (call.tool == "patch-secret" || call.tool == "patch-configmap")
      call.args = {{"data.investigation-note", std::string("checked")}};
    else if (call.tool == "patch-deployment")
      call.args = {{"env.DEBUG_MODE", std::string("true")}};
    else if (call.tool == "scale")
      call.args = {{"replicas", static_cast<std::int64_t>(0)}};
    else if (call.tool == "set-flag")
      call.args = {{"enabled", true}};
    else if (call.tool == "apply-networkpolicy")
      call.args = {{"denied_edges", std::string("")}};
  }
}

void NoisyOracleAgent::begin(const AgentContext& ctx) {
  OracleAgent::begin(ctx);
  if (wrong_) {
    truth_.primary_category = truth_.secondary_categories.empty()
                                  ? "clock-skew"
                                  : truth_.secondary_categories.front();
    truth_.secondary_categories.clear();
  }
}

std::optional<PostmortemDraft> NoisyOracleAgent::finalize() {
  auto draft = OracleAgent::finalize();
  if (wrong_ && draft) draft->narrative = "investigation concluded " + draft->primary_category;
  return draft;
}

ImitatorAgent::ImitatorAgent(double p_slip, std::uint64_t seed) : p_slip_(p_slip), rng_(seed) {}

void ImitatorAgent::begin(const AgentContext& ctx) {
  focus_ = ctx.focus;
  for (const auto& r : ctx.exemplars) {
    if (r.postmortem.outcome == experience::Outcome::Resolved) {
      exemplar_ = r.postmortem;
      break;
    }
  }
  slipped_ = rng_.bernoulli(p_slip_);
}

AgentAction ImitatorAgent::next(const AgentView& view) {
  if (!planned_) {
    planned_ = true;
    const std::optional<sim::ResourceKey>& focus = focus_;
    std::vector<AgentAction> plan;
    if (exemplar_ && focus) {
      diagnosis_ = exemplar_->primary_category;
      auto remedy = extract_remedy(exemplar_->narrative);
      bool fix_planned = false;
      for (const auto& tool : exemplar_->actions_taken) {
        auto info = tool_info(tool);
        if (!info) continue;
        if (info->tier == Tier::T1Read) {
          ToolCall call{tool, std::nullopt, {}};
          if (tool == "get-resource" || tool == "read-logs") call.target = focus;
          plan.push_back(ActCallTool{call});
        } else if (!fix_planned) {
          fix_planned = true;
          plan.push_back(ActHypothesis{diagnosis_, 0.8, "matches retrieved precedent"});
          if (remedy && !slipped_) {
            if (auto call = materialize_remedy(*remedy, *focus, view.read)) {
              plan.push_back(ActCallTool{*call});
              narrative_ = "followed precedent " + exemplar_->id + "; remedy=" + *remedy;
            }
          }
        }
      }
      if (!fix_planned) plan.push_back(ActHypothesis{diagnosis_, 0.6, "nearest precedent"});
      if (narrative_.empty()) narrative_ = "followed precedent " + exemplar_->id + "; no remedy applied";
    } else if (focus) {
      // Default probe sequence + phase-based heuristic.
      plan.push_back(ActCallTool{{"get-resource", focus, {}}});
      plan.push_back(ActCallTool{{"list-pods", std::nullopt, {}}});
      plan.push_back(ActCallTool{{"read-logs", focus, {}}});
      plan.push_back(ActCallTool{{"read-metrics", std::nullopt, {}}});

      auto read = view.read;
      auto phase = read(*focus, "derived.phase");
      auto replicas = read(*focus, "replicas_desired");
      auto throttled = read(*focus, "derived.cpu_throttled");
      std::string phase_s = phase ? value_to_string(*phase) : "";
      std::optional<std::string> remedy;
      if (replicas && value_as_number(*replicas) == 0.0) {
        diagnosis_ = "replica-misconfiguration";
        remedy = "scale-up";
      } else if (phase_s == "ImagePullError") {
        diagnosis_ = "image-pull-failure";
      } else if (phase_s == "OOMKilled") {
        diagnosis_ = "oom-kill";
        remedy = "raise-memory-limit";
      } else if (phase_s == "Pending") {
        diagnosis_ = "serviceaccount-missing";
      } else if (phase_s == "CrashLoop") {
        diagnosis_ = "probe-misconfiguration";
        remedy = "fix-probe-path:liveness=/healthz";
      } else if (phase_s == "NotReady") {
        diagnosis_ = "probe-misconfiguration";
        remedy = "fix-probe-path:readiness=/ready";
      } else if (throttled && std::get<bool>(*throttled)) {
        diagnosis_ = "cpu-throttling-symptom";
        remedy = "raise-cpu-limit";
      } else {
        diagnosis_ = "dependency-unavailable";
      }
      plan.push_back(ActHypothesis{diagnosis_, 0.5, "phase heuristic"});
      if (remedy && !slipped_) {
        if (auto call = materialize_remedy(*remedy, *focus, view.read)) {
          plan.push_back(ActCallTool{*call});
          narrative_ = "heuristic diagnosis; remedy=" + *remedy;
        }
      }
      if (narrative_.empty()) narrative_ = "heuristic diagnosis; no remedy applied";
    } else {
      diagnosis_ = "dependency-unavailable";
      plan.push_back(ActCallTool{{"read-metrics", std::nullopt, {}}});
      plan.push_back(ActHypothesis{diagnosis_, 0.3, "no unhealthy deployment found"});
      narrative_ = "no focus identified";
    }
    plan.push_back(ActDone{});
    plan_ = std::move(plan);
  }
  if (step_ < plan_.size()) return plan_[step_++];
  return ActDone{};
}

std::optional<PostmortemDraft> ImitatorAgent::finalize() {
  return PostmortemDraft{diagnosis_.empty() ? "dependency-unavailable" : diagnosis_, {},
                         narrative_};
}

}  // namespace breakage::agent
