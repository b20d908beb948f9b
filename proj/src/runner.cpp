// SPDX-License-Identifier: Apache-2.0

#include "breakage/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "breakage/injector.hpp"

namespace breakage::runner {

std::uint64_t run_seed(std::uint64_t base_seed, const std::string& scenario_id,
                       const std::string& arm, int rep) {
  return StableHash{}
      .mix(base_seed)
      .mix(scenario_id)
      .mix(arm)
      .mix(static_cast<std::uint64_t>(rep))
      .digest();
}

// ---------------------------------------------------------------------------
// Oracle scripting
// ---------------------------------------------------------------------------

sim::ResourceKey affected_deployment(const scenario::ScenarioSpec& spec,
                                     const sim::ClusterState& fixture) {
  const auto& target = spec.injector.target;
  if (target.kind == sim::ResourceKind::Deployment) return target;
  if (target.kind == sim::ResourceKind::FeatureFlag) {
    auto it = fixture.resources.find(target);
    if (it != fixture.resources.end())
      return {sim::ResourceKind::Deployment, target.ns,
              std::get<sim::FeatureFlagSpec>(it->second).target};
  }
  if (target.kind == sim::ResourceKind::NetworkPolicy) {
    auto it = spec.injector.params.find("deny");
    if (it != spec.injector.params.end())
      if (const auto* s = std::get_if<std::string>(&it->second)) {
        auto arrow = s->find("->");
        if (arrow != std::string::npos)
          return {sim::ResourceKind::Deployment, target.ns, s->substr(0, arrow)};
      }
  }
  // Secret/ConfigMap: the deployment whose env references the resource.
  for (const auto& [key, res] : fixture.resources) {
    const auto* d = std::get_if<sim::DeploymentSpec>(&res);
    if (!d) continue;
    for (const auto& [_, src] : d->env) {
      bool is_secret_ref = src.kind == sim::EnvSource::Kind::SecretKeyRef &&
                           target.kind == sim::ResourceKind::Secret;
      bool is_cm_ref = src.kind == sim::EnvSource::Kind::ConfigMapKeyRef &&
                       target.kind == sim::ResourceKind::ConfigMap;
      if ((is_secret_ref || is_cm_ref) && src.value == target.name) return key;
    }
  }
  for (const auto& [key, res] : fixture.resources)
    if (std::holds_alternative<sim::DeploymentSpec>(res)) return key;
  return target;
}

std::vector<agent::ToolCall> oracle_probes(const scenario::ScenarioSpec& spec,
                                           const sim::ClusterState& fixture) {
  std::vector<agent::ToolCall> probes;
  auto focus = affected_deployment(spec, fixture);
  for (const auto& name : spec.expected_actions) {
    auto info = agent::tool_info(name);
    if (!info || info->tier != agent::Tier::T1Read) continue;
    agent::ToolCall call{name, std::nullopt, {}};
    if (name == "get-resource") call.target = spec.injector.target;
    if (name == "read-logs") call.target = focus;
    probes.push_back(call);
  }
  return probes;
}

std::vector<agent::ToolCall> oracle_fix(const scenario::ScenarioSpec& spec,
                                        const sim::ClusterState& fixture) {
  // Dry-run the injection against the fixture to learn the reverse patch.
  auto result = injector::inject(fixture, spec.injector);
  if (result.handle.status != injector::HandleStatus::Active) return {};
  const auto& undo = result.handle.undo;

  if (undo.clear_eviction) return {agent::ToolCall{"restart", undo.key, {}}};
  if (undo.remove_resource)
    return {agent::ToolCall{"apply-networkpolicy", undo.key,
                            {{"denied_edges", std::string("")}}}};

  std::map<std::string, Value> args(undo.reverse_fields.begin(), undo.reverse_fields.end());
  switch (undo.key.kind) {
    case sim::ResourceKind::Deployment:
      return {agent::ToolCall{"patch-deployment", undo.key, args}};
    case sim::ResourceKind::Secret: return {agent::ToolCall{"patch-secret", undo.key, args}};
    case sim::ResourceKind::ConfigMap:
      return {agent::ToolCall{"patch-configmap", undo.key, args}};
    case sim::ResourceKind::FeatureFlag: return {agent::ToolCall{"set-flag", undo.key, args}};
    case sim::ResourceKind::NetworkPolicy:
      return {agent::ToolCall{"apply-networkpolicy", undo.key, args}};
    default: return {};
  }
}

AgentFactory make_agent_factory(const std::string& name, const sim::ClusterState& fixture,
                                double noisy_p_wrong, double imitator_p_slip) {
  if (name == "oracle")
    return [fixture](const scenario::ScenarioSpec& spec, std::uint64_t) {
      return std::make_unique<agent::OracleAgent>(spec.ground_truth, oracle_probes(spec, fixture),
                                                  oracle_fix(spec, fixture));
    };
  if (name == "null")
    return [](const scenario::ScenarioSpec&, std::uint64_t) {
      return std::make_unique<agent::NullAgent>();
    };
  if (name == "noisy-oracle")
    return [fixture, noisy_p_wrong](const scenario::ScenarioSpec& spec, std::uint64_t seed) {
      return std::make_unique<agent::NoisyOracleAgent>(spec.ground_truth,
                                                       oracle_probes(spec, fixture),
                                                       oracle_fix(spec, fixture), noisy_p_wrong,
                                                       seed);
    };
  if (name == "imitator")
    return [imitator_p_slip](const scenario::ScenarioSpec&, std::uint64_t seed) {
      return std::make_unique<agent::ImitatorAgent>(imitator_p_slip, seed);
    };
  throw Error(ErrorKind::BadPlan, "unknown agent behavior: " + name);
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

Runner::Runner(RunnerConfig cfg, experience::Store* store)
    : cfg_(std::move(cfg)), store_(store) {}

RunRecord Runner::run_scenario(const scenario::ScenarioSpec& spec, const std::string& agent_name,
                               const AgentFactory& factory, const ArmConfig& arm, int rep,
                               std::uint64_t seed) {
  if (active_)
    throw Error(ErrorKind::BadPlan, "runner already has an active scenario (single-active model)");
  active_ = true;
  struct Release {
    bool* flag;
    ~Release() { *flag = false; }
  } release{&active_};

  RunRecord record;
  record.run_id = hex16(StableHash{}
                            .mix(spec.id)
                            .mix(arm.name)
                            .mix(static_cast<std::uint64_t>(rep))
                            .mix(seed)
                            .digest());
  record.scenario_id = spec.id;
  record.arm = arm.name;
  record.rep = rep;
  record.seed = static_cast<std::int64_t>(seed);

  auto retrieval_cfg = experience::apply_env_overrides(arm.retrieval);
  record.embedder =
      retrieval_cfg.embedder == experience::EmbedderKind::Deterministic ? "deterministic"
                                                                        : "external";
  record.pool_cap = retrieval_cfg.pool_cap;

  sim::ClusterState state = cfg_.fixture;
  state.metric_weights = spec.metric_weights;

  auto framework_error_record = [&](const std::string& why, std::int64_t ticks) {
    record.score = scorer::ScoreResult{};
    record.score.framework_error = true;
    record.outcome = experience::Outcome::Inconclusive;
    record.end_reason = agent::EndReason::FrameworkError;
    record.wall_ticks = ticks;
    last_transcript_ = agent::AgentTranscript{};
    last_transcript_.end_reason = agent::EndReason::FrameworkError;
    last_transcript_.framework_error = why;
    last_transcript_.events.push_back({ticks, "framework-error", why});
    if (store_) {
      experience::Postmortem pm;
      pm.id = record.run_id;
      pm.scenario_id = spec.id;
      pm.created_tick = ticks;
      pm.primary_category = scenario::kFrameworkErrorCategory;
      pm.narrative = why;
      pm.outcome = experience::Outcome::Inconclusive;
      auto embedder = experience::make_embedder(retrieval_cfg.embedder, store_->dimension());
      pm.embedding = embedder->embed(experience::embedding_text(pm));
      pm.arm = arm.name;
      pm.run_seed = record.seed;
      store_->store_postmortem(pm);
    }
    return record;
  };

  try {
    std::int64_t ticks_used = 0;
    sim::MetricSample last_sample;
    for (int i = 0; i < cfg_.settle_ticks; ++i) {
      auto [next, sample] = sim::tick(state);
      state = std::move(next);
      last_sample = sample;
      ticks_used += 1;
    }

    auto injected = injector::inject(state, spec.injector);
    if (injected.handle.status == injector::HandleStatus::Failed)
      return framework_error_record("injection failed: " + injected.handle.failure, ticks_used);
    state = std::move(injected.state);
    auto handle = injected.handle;

    detector::ScenarioDetector det(spec.fixed_when, spec.regressed_when);
    for (int i = 0; i < cfg_.manifest_ticks; ++i) {
      auto [next, sample] = sim::tick(state);
      state = std::move(next);
      last_sample = sample;
      ticks_used += 1;
      det.observe(state, last_sample, cfg_.backends);
    }

    // Retrieval happens here, before the agent's first tool call.
    agent::AgentContext ctx;
    ctx.incident_brief = agent::incident_brief(state, last_sample);
    ctx.focus = agent::focus_deployment(state);
    if (cfg_.vocab) ctx.vocabulary = cfg_.vocab->render();
    ctx.remaining_budget_s = spec.time_budget_s - static_cast<int>(ticks_used);
    std::vector<experience::Retrieved> retrieved;
    if (store_) {
      auto embedder = experience::make_embedder(retrieval_cfg.embedder, store_->dimension());
      retrieved = store_->retrieve(ctx.incident_brief, *embedder, retrieval_cfg);
    }
    ctx.exemplars = retrieved;

    auto behavior = factory(spec, seed);
    agent::LoopConfig loop_cfg;
    loop_cfg.guard = cfg_.guard;
    loop_cfg.approver = cfg_.approver;
    loop_cfg.approver.seed = StableHash{}.mix(seed).mix("approver").digest();
    loop_cfg.backends = cfg_.backends;
    auto loop = agent::run_agent_loop(*behavior, spec, std::move(state), det, ctx, loop_cfg,
                                      ticks_used);
    state = std::move(loop.state);
    last_sample = loop.last_sample;
    ticks_used = loop.ticks_used;

    // Settlement: give sustained fixed_when windows time to close, still
    // inside the budget and still before the injection undo.
    if (loop.transcript.end_reason == agent::EndReason::AgentDone) {
      while (ticks_used < spec.time_budget_s && !det.verdict().all_fixed) {
        auto [next, sample] = sim::tick(state);
        state = std::move(next);
        last_sample = sample;
        ticks_used += 1;
        det.observe(state, last_sample, cfg_.backends);
      }
    }
    auto verdict = det.verdict();  // final evaluation precedes undo

    scorer::RunOutput output;
    output.hypotheses = loop.transcript.hypotheses;
    output.actions = loop.transcript.tool_calls;
    output.postmortem_missing = loop.transcript.postmortem_synthesized;
    if (loop.transcript.postmortem) {
      output.pm_primary = loop.transcript.postmortem->primary_category;
      output.pm_secondaries = loop.transcript.postmortem->secondary_categories;
    }
    record.score = scorer::score_run(output, verdict, spec, *cfg_.vocab, retrieved);
    record.outcome = scorer::outcome_label(record.score);
    record.end_reason = loop.transcript.end_reason;
    record.wall_ticks = ticks_used;

    state = injector::undo(state, handle);

    if (store_) {
      experience::Postmortem pm;
      pm.id = record.run_id;
      pm.scenario_id = spec.id;
      pm.created_tick = state.clock.tick;
      pm.primary_category = loop.transcript.postmortem->primary_category;
      pm.secondary_categories = loop.transcript.postmortem->secondary_categories;
      pm.narrative = loop.transcript.postmortem->narrative;
      pm.actions_taken = loop.transcript.tool_calls;
      pm.outcome = record.outcome;
      pm.hypotheses = loop.transcript.hypotheses;
      auto embedder = experience::make_embedder(retrieval_cfg.embedder, store_->dimension());
      pm.embedding = embedder->embed(experience::embedding_text(pm));
      pm.arm = arm.name;
      pm.run_seed = record.seed;
      store_->store_postmortem(pm);
    }

    last_transcript_ = loop.transcript;
    if (!cfg_.transcript_dir.empty()) {
      std::filesystem::create_directories(cfg_.transcript_dir);
      std::ofstream out(cfg_.transcript_dir + "/" + record.run_id + ".jsonl");
      out << loop.transcript.to_jsonl();
    }
    (void)agent_name;
    return record;
  } catch (const std::exception& e) {
    // Substrate faults become framework-error records, never crashes.
    return framework_error_record(std::string("substrate failure: ") + e.what(), 0);
  }
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

const std::vector<std::string> kManifestColumns = {
    "run_id", "scenario", "arm", "embedder", "pool_cap", "rep",
    "seed", "composite", "detected", "diagnosis_credit", "fixed", "no_regressions",
    "retrieval_used", "channel_disagreement", "framework_error", "outcome", "end_reason",
    "wall_ticks"};

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += "\"";
  return out;
}

std::string fmt_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      row.push_back(field);
      field.clear();
      rows.push_back(row);
      row.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string manifest_header() {
  std::string out;
  for (size_t i = 0; i < kManifestColumns.size(); ++i) {
    if (i) out += ",";
    out += kManifestColumns[i];
  }
  return out + "\n";
}

std::string manifest_row(const RunRecord& r) {
  std::vector<std::string> fields = {
      r.run_id,
      r.scenario_id,
      r.arm,
      r.embedder,
      r.pool_cap ? std::to_string(*r.pool_cap) : "unlimited",
      std::to_string(r.rep),
      std::to_string(r.seed),
      fmt_double(r.score.composite, "%.6f"),
      std::to_string(r.score.detected),
      fmt_double(r.score.diagnosis_credit, "%.2f"),
      std::to_string(r.score.fixed),
      std::to_string(r.score.no_regressions),
      r.score.retrieval_used ? "true" : "false",
      r.score.channel_disagreement ? "true" : "false",
      r.score.framework_error ? "true" : "false",
      experience::outcome_to_string(r.outcome),
      agent::end_reason_to_string(r.end_reason),
      std::to_string(r.wall_ticks),
  };
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    out += csv_escape(fields[i]);
  }
  return out + "\n";
}

std::string render_manifest(const std::vector<RunRecord>& rows) {
  std::string out = manifest_header();
  for (const auto& r : rows) out += manifest_row(r);
  return out;
}

std::vector<ManifestRow> parse_manifest(const std::string& csv_text) {
  auto rows = parse_csv(csv_text);
  std::vector<ManifestRow> out;
  if (rows.empty()) return out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != kManifestColumns.size())
      throw Error(ErrorKind::Syntax,
                  "manifest row has " + std::to_string(r.size()) + " fields, expected " +
                      std::to_string(kManifestColumns.size()));
    ManifestRow m;
    m.run_id = r[0];
    m.scenario = r[1];
    m.arm = r[2];
    m.embedder = r[3];
    m.pool_cap = r[4];
    m.rep = std::stoi(r[5]);
    m.seed = std::stoll(r[6]);
    m.composite = std::stod(r[7]);
    m.detected = std::stoi(r[8]);
    m.diagnosis_credit = std::stod(r[9]);
    m.fixed = std::stoi(r[10]);
    m.no_regressions = std::stoi(r[11]);
    m.retrieval_used = r[12] == "true";
    m.channel_disagreement = r[13] == "true";
    m.framework_error = r[14] == "true";
    m.outcome = r[15];
    m.end_reason = r[16];
    m.wall_ticks = std::stoll(r[17]);
    out.push_back(std::move(m));
  }
  return out;
}

ManifestWriter::ManifestWriter(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::ostringstream os;
    os << in.rdbuf();
    auto existing = os.str();
    if (!existing.empty())
      for (const auto& row : parse_manifest(existing))
        keys_.insert(row.scenario + "|" + row.arm + "|" + std::to_string(row.rep));
    if (!existing.empty()) return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot create manifest " + path);
  out << manifest_header();
}

bool ManifestWriter::contains(const std::string& scenario_id, const std::string& arm,
                              int rep) const {
  return keys_.count(scenario_id + "|" + arm + "|" + std::to_string(rep)) > 0;
}

void ManifestWriter::append(const RunRecord& record) {
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot append to manifest " + path_);
  out << manifest_row(record);
  keys_.insert(record.scenario_id + "|" + record.arm + "|" + std::to_string(record.rep));
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

void validate_plan(const ExperimentPlan& plan) {
  if (plan.reps < 1) throw Error(ErrorKind::BadPlan, "reps must be >= 1");
  if (plan.scenarios.empty()) throw Error(ErrorKind::BadPlan, "plan has no scenarios");
  std::set<std::string> names;
  for (const auto& arm : plan.arms)
    if (!names.insert(arm.name).second)
      throw Error(ErrorKind::BadPlan, "duplicate arm name: " + arm.name);
  if (plan.arms.empty()) throw Error(ErrorKind::BadPlan, "plan has no arms");
}

ExperimentResult run_experiment(const ExperimentPlan& plan,
                                const std::map<std::string, scenario::ScenarioSpec>& library,
                                const RunnerConfig& cfg, experience::Store& store,
                                const AgentFactory& factory, ManifestWriter& manifest) {
  validate_plan(plan);
  ExperimentResult result;
  Runner runner(cfg, &store);
  for (const auto& scenario_id : plan.scenarios) {
    auto it = library.find(scenario_id);
    if (it == library.end())
      throw Error(ErrorKind::BadPlan, "plan names unknown scenario: " + scenario_id);
    for (const auto& arm : plan.arms) {
      for (int rep = 0; rep < plan.reps; ++rep) {
        if (manifest.contains(scenario_id, arm.name, rep)) {
          result.skipped += 1;
          continue;
        }
        auto seed = run_seed(plan.base_seed, scenario_id, arm.name, rep);
        auto record = runner.run_scenario(it->second, plan.agent, factory, arm, rep, seed);
        if (record.score.framework_error) result.framework_errors += 1;
        manifest.append(record);
        result.records.push_back(std::move(record));
      }
    }
  }
  return result;
}

}  // namespace breakage::runner
