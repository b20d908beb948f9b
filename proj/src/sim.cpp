// SPDX-License-Identifier: Apache-2.0

#include "breakage/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace breakage::sim {

std::string kind_to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::Deployment: return "Deployment";
    case ResourceKind::Secret: return "Secret";
    case ResourceKind::ConfigMap: return "ConfigMap";
    case ResourceKind::NetworkPolicy: return "NetworkPolicy";
    case ResourceKind::ServiceAccount: return "ServiceAccount";
    case ResourceKind::FeatureFlag: return "FeatureFlag";
  }
  return "?";
}

std::optional<ResourceKind> kind_from_string(const std::string& s) {
  if (s == "Deployment") return ResourceKind::Deployment;
  if (s == "Secret") return ResourceKind::Secret;
  if (s == "ConfigMap") return ResourceKind::ConfigMap;
  if (s == "NetworkPolicy") return ResourceKind::NetworkPolicy;
  if (s == "ServiceAccount") return ResourceKind::ServiceAccount;
  if (s == "FeatureFlag") return ResourceKind::FeatureFlag;
  return std::nullopt;
}

std::string ResourceKey::str() const { return kind_to_string(kind) + "/" + ns + "/" + name; }

ResourceKind resource_kind(const Resource& r) {
  return static_cast<ResourceKind>(r.index());
}

Resource default_resource(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::Deployment: return DeploymentSpec{};
    case ResourceKind::Secret: return SecretSpec{};
    case ResourceKind::ConfigMap: return ConfigMapSpec{};
    case ResourceKind::NetworkPolicy: return NetworkPolicySpec{};
    case ResourceKind::ServiceAccount: return ServiceAccountSpec{};
    case ResourceKind::FeatureFlag: return FeatureFlagSpec{};
  }
  return ServiceAccountSpec{};
}

std::string phase_to_string(PodPhase p) {
  switch (p) {
    case PodPhase::Running: return "Running";
    case PodPhase::Pending: return "Pending";
    case PodPhase::CrashLoop: return "CrashLoop";
    case PodPhase::ImagePullError: return "ImagePullError";
    case PodPhase::OOMKilled: return "OOMKilled";
    case PodPhase::NotReady: return "NotReady";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Field paths
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

[[noreturn]] void type_mismatch(const std::string& path, const char* expected) {
  throw Error(ErrorKind::TypeMismatch, "field " + path + " expects " + expected);
}

int expect_int(const Value& v, const std::string& path) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<int>(*i);
  type_mismatch(path, "integer");
}

double expect_number(const Value& v, const std::string& path) {
  if (auto n = value_as_number(v)) return *n;
  type_mismatch(path, "number");
}

std::string expect_string(const Value& v, const std::string& path) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  type_mismatch(path, "string");
}

bool expect_bool(const Value& v, const std::string& path) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  type_mismatch(path, "bool");
}

std::string env_source_to_string(const EnvSource& e) {
  switch (e.kind) {
    case EnvSource::Kind::Literal: return e.value;
    case EnvSource::Kind::SecretKeyRef: return "secret:" + e.value + "/" + e.key;
    case EnvSource::Kind::ConfigMapKeyRef: return "configmap:" + e.value + "/" + e.key;
  }
  return "";
}

EnvSource env_source_from_string(const std::string& s) {
  EnvSource e;
  auto parse_ref = [&](const std::string& body, EnvSource::Kind kind) {
    auto slash = body.find('/');
    if (slash == std::string::npos)
      throw Error(ErrorKind::TypeMismatch, "env ref needs <resource>/<key>: " + s);
    e.kind = kind;
    e.value = body.substr(0, slash);
    e.key = body.substr(slash + 1);
  };
  if (s.rfind("secret:", 0) == 0) {
    parse_ref(s.substr(7), EnvSource::Kind::SecretKeyRef);
  } else if (s.rfind("configmap:", 0) == 0) {
    parse_ref(s.substr(10), EnvSource::Kind::ConfigMapKeyRef);
  } else {
    e.kind = EnvSource::Kind::Literal;
    e.value = s;
  }
  return e;
}

std::string edges_to_string(const std::vector<DependencyEdge>& edges) {
  std::vector<std::string> parts;
  for (const auto& e : edges) parts.push_back(e.from + "->" + e.to);
  return join(parts, ",");
}

std::vector<DependencyEdge> edges_from_string(const std::string& s) {
  std::vector<DependencyEdge> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ',')) {
    auto arrow = part.find("->");
    if (arrow == std::string::npos)
      throw Error(ErrorKind::TypeMismatch, "edge needs from->to: " + part);
    out.push_back({part.substr(0, arrow), part.substr(arrow + 2)});
  }
  return out;
}

std::optional<Value> get_probe_field(const std::optional<ProbeSpec>& probe,
                                     const std::string& sub) {
  if (!probe) return std::nullopt;
  if (sub == "path") return Value{probe->path};
  if (sub == "port") return Value{static_cast<std::int64_t>(probe->port)};
  return std::nullopt;
}

void set_probe_field(std::optional<ProbeSpec>& probe, const std::string& sub, const Value& v,
                     const std::string& path) {
  if (!probe) type_mismatch(path, "an existing probe");
  if (sub == "path") {
    probe->path = expect_string(v, path);
  } else if (sub == "port") {
    probe->port = expect_int(v, path);
  } else {
    type_mismatch(path, "path or port");
  }
}

std::optional<Value> get_field_on(const Resource& r, const std::string& path) {
  auto parts = split(path, '.');
  const std::string& head = parts[0];
  if (head == "metadata") return std::nullopt;  // handled by caller

  if (const auto* d = std::get_if<DeploymentSpec>(&r)) {
    if (head == "replicas_desired") return Value{static_cast<std::int64_t>(d->replicas_desired)};
    if (head == "image") return Value{d->image};
    if (head == "command") return Value{join(d->command, " ")};
    if (head == "cpu_limit_millicores")
      return d->cpu_limit_millicores ? std::optional<Value>{Value{
                                           static_cast<std::int64_t>(*d->cpu_limit_millicores)}}
                                     : std::nullopt;
    if (head == "memory_limit_mib")
      return d->memory_limit_mib
                 ? std::optional<Value>{Value{static_cast<std::int64_t>(*d->memory_limit_mib)}}
                 : std::nullopt;
    if (head == "cpu_demand_millicores")
      return Value{static_cast<std::int64_t>(d->cpu_demand_millicores)};
    if (head == "memory_working_set_mib")
      return Value{static_cast<std::int64_t>(d->memory_working_set_mib)};
    if (head == "base_latency_ms") return Value{d->base_latency_ms};
    if (head == "serviceaccount")
      return d->serviceaccount ? std::optional<Value>{Value{*d->serviceaccount}} : std::nullopt;
    if (head == "env" && parts.size() == 2) {
      auto it = d->env.find(parts[1]);
      if (it == d->env.end()) return std::nullopt;
      return Value{env_source_to_string(it->second)};
    }
    if (head == "liveness_probe" && parts.size() == 2)
      return get_probe_field(d->liveness_probe, parts[1]);
    if (head == "readiness_probe" && parts.size() == 2)
      return get_probe_field(d->readiness_probe, parts[1]);
    return std::nullopt;
  }
  if (const auto* s = std::get_if<SecretSpec>(&r)) {
    if (head == "data" && parts.size() == 2) {
      auto it = s->data.find(parts[1]);
      if (it == s->data.end()) return std::nullopt;
      return Value{it->second};
    }
    return std::nullopt;
  }
  if (const auto* c = std::get_if<ConfigMapSpec>(&r)) {
    if (head == "data" && parts.size() == 2) {
      auto it = c->data.find(parts[1]);
      if (it == c->data.end()) return std::nullopt;
      return Value{it->second};
    }
    return std::nullopt;
  }
  if (const auto* n = std::get_if<NetworkPolicySpec>(&r)) {
    if (head == "denied_edges") return Value{edges_to_string(n->denied_edges)};
    return std::nullopt;
  }
  if (const auto* f = std::get_if<FeatureFlagSpec>(&r)) {
    if (head == "target") return Value{f->target};
    if (head == "enabled") return Value{f->enabled};
    if (head == "error_rate_impact") return Value{f->error_rate_impact};
    if (head == "latency_impact_ms") return Value{f->latency_impact_ms};
    return std::nullopt;
  }
  return std::nullopt;
}

void set_field_on(Resource& r, const std::string& path, const Value& v) {
  auto parts = split(path, '.');
  const std::string& head = parts[0];

  if (auto* d = std::get_if<DeploymentSpec>(&r)) {
    if (head == "replicas_desired") {
      d->replicas_desired = expect_int(v, path);
      if (d->replicas_desired < 0) type_mismatch(path, "a non-negative integer");
      return;
    }
    if (head == "image") { d->image = expect_string(v, path); return; }
    if (head == "command") { d->command = split(expect_string(v, path), ' '); return; }
    if (head == "cpu_limit_millicores") {
      if (is_absent(v)) d->cpu_limit_millicores.reset();
      else d->cpu_limit_millicores = expect_int(v, path);
      return;
    }
    if (head == "memory_limit_mib") {
      if (is_absent(v)) d->memory_limit_mib.reset();
      else d->memory_limit_mib = expect_int(v, path);
      return;
    }
    if (head == "cpu_demand_millicores") { d->cpu_demand_millicores = expect_int(v, path); return; }
    if (head == "memory_working_set_mib") {
      d->memory_working_set_mib = expect_int(v, path);
      return;
    }
    if (head == "base_latency_ms") { d->base_latency_ms = expect_number(v, path); return; }
    if (head == "serviceaccount") {
      if (is_absent(v)) d->serviceaccount.reset();
      else d->serviceaccount = expect_string(v, path);
      return;
    }
    if (head == "env" && parts.size() == 2) {
      if (is_absent(v)) d->env.erase(parts[1]);
      else d->env[parts[1]] = env_source_from_string(expect_string(v, path));
      return;
    }
    if (head == "liveness_probe" && parts.size() == 2) {
      set_probe_field(d->liveness_probe, parts[1], v, path);
      return;
    }
    if (head == "readiness_probe" && parts.size() == 2) {
      set_probe_field(d->readiness_probe, parts[1], v, path);
      return;
    }
    type_mismatch(path, "a known Deployment field");
  }
  if (auto* s = std::get_if<SecretSpec>(&r)) {
    if (head == "data" && parts.size() == 2) {
      if (is_absent(v)) s->data.erase(parts[1]);
      else s->data[parts[1]] = expect_string(v, path);
      return;
    }
    type_mismatch(path, "data.<key>");
  }
  if (auto* c = std::get_if<ConfigMapSpec>(&r)) {
    if (head == "data" && parts.size() == 2) {
      if (is_absent(v)) c->data.erase(parts[1]);
      else c->data[parts[1]] = expect_string(v, path);
      return;
    }
    type_mismatch(path, "data.<key>");
  }
  if (auto* n = std::get_if<NetworkPolicySpec>(&r)) {
    if (head == "denied_edges") {
      n->denied_edges = edges_from_string(expect_string(v, path));
      return;
    }
    type_mismatch(path, "denied_edges");
  }
  if (auto* f = std::get_if<FeatureFlagSpec>(&r)) {
    if (head == "target") { f->target = expect_string(v, path); return; }
    if (head == "enabled") { f->enabled = expect_bool(v, path); return; }
    if (head == "error_rate_impact") { f->error_rate_impact = expect_number(v, path); return; }
    if (head == "latency_impact_ms") { f->latency_impact_ms = expect_number(v, path); return; }
    type_mismatch(path, "a known FeatureFlag field");
  }
  type_mismatch(path, "a patchable resource");
}

}  // namespace

ClusterState apply_mutation(const ClusterState& state, const ResourceKey& key,
                            const FieldPatch& patch, bool create) {
  ClusterState next = state;
  auto it = next.resources.find(key);
  if (it == next.resources.end()) {
    if (!create)
      throw Error(ErrorKind::UnknownKey, "no such resource: " + key.str());
    it = next.resources.emplace(key, default_resource(key.kind)).first;
  }
  for (const auto& [path, value] : patch) set_field_on(it->second, path, value);
  return next;
}

std::optional<Value> read_field(const ClusterState& state, const ResourceKey& key,
                                const std::string& field_path) {
  auto it = state.resources.find(key);
  if (it == state.resources.end()) return std::nullopt;
  if (field_path == "metadata.name") return Value{key.name};
  if (field_path.rfind("derived.", 0) == 0) {
    auto dit = state.derived.find(key);
    if (dit == state.derived.end()) return std::nullopt;
    const PodStatus& ps = dit->second;
    std::string sub = field_path.substr(8);
    if (sub == "phase") return Value{phase_to_string(ps.phase)};
    if (sub == "ready_replicas") return Value{static_cast<std::int64_t>(ps.ready_replicas)};
    if (sub == "restart_count") return Value{static_cast<std::int64_t>(ps.restart_count)};
    if (sub == "cpu_throttled") return Value{ps.cpu_throttled};
    return std::nullopt;
  }
  return get_field_on(it->second, field_path);
}

// ---------------------------------------------------------------------------
// Health rules
// ---------------------------------------------------------------------------

namespace {

struct EnvProblem {
  std::string var;
  std::string detail;
};

// First env problem for the deployment: a ref to an absent Secret/ConfigMap
// key, or a required env var missing entirely.
std::optional<EnvProblem> find_env_problem(const ClusterState& state, const std::string& ns,
                                           const DeploymentSpec& d) {
  for (const auto& [name, src] : d.env) {
    if (src.kind == EnvSource::Kind::Literal) continue;
    ResourceKind kind = src.kind == EnvSource::Kind::SecretKeyRef ? ResourceKind::Secret
                                                                  : ResourceKind::ConfigMap;
    auto it = state.resources.find({kind, ns, src.value});
    if (it == state.resources.end())
      return EnvProblem{name, kind_to_string(kind) + " " + src.value + " absent"};
    bool has_key = false;
    if (kind == ResourceKind::Secret)
      has_key = std::get<SecretSpec>(it->second).data.count(src.key) > 0;
    else
      has_key = std::get<ConfigMapSpec>(it->second).data.count(src.key) > 0;
    if (!has_key)
      return EnvProblem{name, kind_to_string(kind) + " " + src.value + " key " + src.key +
                                  " absent"};
  }
  for (const auto& req : d.required_env)
    if (!d.env.count(req)) return EnvProblem{req, "required env var unset"};
  return std::nullopt;
}

bool probe_failing(const std::optional<ProbeSpec>& probe) {
  return probe && !probe->healthy_paths.count(probe->path);
}

struct DeploymentEval {
  PodStatus status;
  double availability = 0.0;
  double error_rate = 0.0;
  double latency_ms = 0.0;
};

}  // namespace

std::pair<ClusterState, MetricSample> tick(const ClusterState& state) {
  ClusterState next = state;
  next.clock.tick += 1;
  const std::int64_t now = next.clock.tick;

  // Collect denied edges across all NetworkPolicy resources.
  std::vector<DependencyEdge> denied;
  for (const auto& [key, res] : next.resources)
    if (const auto* np = std::get_if<NetworkPolicySpec>(&res))
      denied.insert(denied.end(), np->denied_edges.begin(), np->denied_edges.end());

  std::map<ResourceKey, PodStatus> derived;
  std::map<std::string, DeploymentEval> evals;  // by deployment name

  // Pass 1: phases, readiness, restart counters.
  for (const auto& [key, res] : next.resources) {
    const auto* d = std::get_if<DeploymentSpec>(&res);
    if (!d) continue;
    RuleCounters& c = next.counters[key];

    // Probe streaks update every tick so a fixed probe clears promptly.
    if (probe_failing(d->liveness_probe))
      c.liveness_fail_streak += 1;
    else
      c.liveness_fail_streak = 0;

    PodStatus ps;
    ps.cpu_throttled =
        d->cpu_limit_millicores && *d->cpu_limit_millicores < d->cpu_demand_millicores;

    const int desired = d->replicas_desired;
    ps.phase = PodPhase::Running;
    ps.ready_replicas = desired;
    bool counts_restarts_per_tick = false;

    const bool sa_missing =
        d->serviceaccount &&
        !next.resources.count({ResourceKind::ServiceAccount, key.ns, *d->serviceaccount});
    const bool image_invalid = !next.valid_images.empty() && !next.valid_images.count(d->image);
    const bool command_invalid = !d->command.empty() && !next.valid_entrypoints.empty() &&
                                 !next.valid_entrypoints.count(d->command.front());
    const bool over_capacity = d->cpu_demand_millicores > next.node_capacity_millicores;
    const auto env_problem = find_env_problem(next, key.ns, *d);
    const bool oom = d->memory_limit_mib && *d->memory_limit_mib < d->memory_working_set_mib;

    if (sa_missing || over_capacity) {
      ps.phase = PodPhase::Pending;
      ps.ready_replicas = 0;
    } else if (image_invalid) {
      ps.phase = PodPhase::ImagePullError;
      ps.ready_replicas = 0;
    } else if (command_invalid || env_problem) {
      ps.phase = PodPhase::CrashLoop;
      ps.ready_replicas = 0;
      counts_restarts_per_tick = true;
    } else if (oom) {
      ps.phase = PodPhase::OOMKilled;
      ps.ready_replicas = 0;
      c.ticks_in_oom += 1;
      if (c.ticks_in_oom % 5 == 1) c.restart_count += 1;
    } else if (c.liveness_fail_streak >= 3) {
      ps.phase = PodPhase::CrashLoop;
      ps.ready_replicas = 0;
      counts_restarts_per_tick = true;
    } else if (probe_failing(d->readiness_probe)) {
      ps.phase = PodPhase::NotReady;
      ps.ready_replicas = 0;
    }

    if (ps.phase != PodPhase::OOMKilled) c.ticks_in_oom = 0;
    if (counts_restarts_per_tick) c.restart_count += 1;

    if (desired == 0) ps.ready_replicas = 0;
    if (c.evicted_until_tick >= now && ps.ready_replicas > 0) ps.ready_replicas -= 1;
    ps.ready_replicas = std::min(ps.ready_replicas, desired);
    ps.restart_count = c.restart_count;

    DeploymentEval ev;
    ev.status = ps;
    ev.availability = (desired > 0 && ps.phase == PodPhase::Running)
                          ? static_cast<double>(ps.ready_replicas) / desired
                          : 0.0;
    double factor = 1.0;
    if (ps.cpu_throttled)
      factor = static_cast<double>(d->cpu_demand_millicores) / *d->cpu_limit_millicores;
    ev.latency_ms = d->base_latency_ms * factor;
    evals[key.name] = ev;
    derived[key] = ps;
  }

  // Pass 2: error rates from denied edges, unavailable dependencies, flags.
  for (const auto& [key, res] : next.resources) {
    const auto* d = std::get_if<DeploymentSpec>(&res);
    if (!d) continue;
    DeploymentEval& ev = evals[key.name];
    for (const auto& dep : d->depends_on) {
      bool edge_denied = false;
      for (const auto& e : denied)
        if (e.from == key.name && e.to == dep) edge_denied = true;
      if (edge_denied)
        ev.error_rate += 0.5;
      else if (auto it = evals.find(dep); it != evals.end() && it->second.availability == 0.0)
        ev.error_rate += 0.3;
    }
  }
  for (const auto& [key, res] : next.resources) {
    const auto* f = std::get_if<FeatureFlagSpec>(&res);
    if (!f || !f->enabled) continue;
    auto it = evals.find(f->target);
    if (it == evals.end()) continue;
    it->second.error_rate += f->error_rate_impact;
    it->second.latency_ms += f->latency_impact_ms;
  }

  MetricSample sample;
  sample.tick = now;
  double total_w = 0.0, err = 0.0, avail = 0.0, lat = 0.0;
  for (const auto& [name, ev] : evals) {
    auto wit = next.metric_weights.find(name);
    double w = wit == next.metric_weights.end() ? 1.0 : wit->second;
    total_w += w;
    err += w * std::min(1.0, ev.error_rate);
    avail += w * ev.availability;
    lat += w * ev.latency_ms;
  }
  if (total_w > 0) {
    sample.error_rate = err / total_w;
    sample.availability = avail / total_w;
    sample.p99_latency_ms = lat / total_w;
  }

  next.derived = std::move(derived);
  return {std::move(next), sample};
}

SnapshotRecord snapshot(const ClusterState& state, const std::set<ResourceKey>& keys) {
  if (keys.empty()) throw Error(ErrorKind::BadArity, "snapshot needs at least one key");
  SnapshotRecord snap;
  snap.taken_at_tick = state.clock.tick;
  for (const auto& key : keys) {
    auto it = state.resources.find(key);
    if (it == state.resources.end())
      throw Error(ErrorKind::UnknownKey, "snapshot of unknown resource: " + key.str());
    snap.resources.emplace(key, it->second);
  }
  return snap;
}

ClusterState restore(const ClusterState& state, const SnapshotRecord& snap) {
  ClusterState next = state;
  for (const auto& [key, res] : snap.resources) next.resources[key] = res;
  return next;
}

ClusterState evict_pods(const ClusterState& state, const ResourceKey& deployment, int dip_ticks) {
  auto it = state.resources.find(deployment);
  if (it == state.resources.end() || !std::holds_alternative<DeploymentSpec>(it->second))
    throw Error(ErrorKind::UnknownKey, "evict target is not a deployment: " + deployment.str());
  ClusterState next = state;
  RuleCounters& c = next.counters[deployment];
  c.evicted_until_tick = next.clock.tick + dip_ticks;
  c.restart_count += 1;
  return next;
}

ClusterState restart_deployment(const ClusterState& state, const ResourceKey& deployment) {
  auto it = state.resources.find(deployment);
  if (it == state.resources.end() || !std::holds_alternative<DeploymentSpec>(it->second))
    throw Error(ErrorKind::UnknownKey, "restart target is not a deployment: " + deployment.str());
  ClusterState next = state;
  RuleCounters& c = next.counters[deployment];
  c.liveness_fail_streak = 0;
  c.ticks_in_oom = 0;
  c.evicted_until_tick = -1;
  return next;
}

std::vector<std::string> render_logs(const ClusterState& state, const ResourceKey& key) {
  std::vector<std::string> lines;
  auto it = state.resources.find(key);
  if (it == state.resources.end()) return {"no such deployment"};
  const auto* d = std::get_if<DeploymentSpec>(&it->second);
  if (!d) return {"not a deployment"};

  if (d->serviceaccount &&
      !state.resources.count({ResourceKind::ServiceAccount, key.ns, *d->serviceaccount}))
    lines.push_back("FATAL serviceaccount " + *d->serviceaccount + " not found; pod Pending");
  if (!state.valid_images.empty() && !state.valid_images.count(d->image))
    lines.push_back("ErrImagePull: image " + d->image + " not found in registry");
  if (!d->command.empty() && !state.valid_entrypoints.empty() &&
      !state.valid_entrypoints.count(d->command.front()))
    lines.push_back("exec: \"" + d->command.front() + "\": not found; container exited");
  if (d->cpu_demand_millicores > state.node_capacity_millicores)
    lines.push_back("0/1 nodes available: insufficient cpu (requested " +
                    std::to_string(d->cpu_demand_millicores) + "m)");
  if (auto prob = find_env_problem(state, key.ns, *d))
    lines.push_back("FATAL missing required env " + prob->var + " (" + prob->detail + ")");
  if (d->memory_limit_mib && *d->memory_limit_mib < d->memory_working_set_mib)
    lines.push_back("container killed: OOMKilled (working set " +
                    std::to_string(d->memory_working_set_mib) + "Mi over limit " +
                    std::to_string(*d->memory_limit_mib) + "Mi)");
  if (probe_failing(d->liveness_probe))
    lines.push_back("liveness probe failed: GET " + d->liveness_probe->path +
                    " -> 503; restarting container");
  if (probe_failing(d->readiness_probe))
    lines.push_back("readiness probe failed: GET " + d->readiness_probe->path + " -> 503");
  if (d->cpu_limit_millicores && *d->cpu_limit_millicores < d->cpu_demand_millicores)
    lines.push_back("cpu throttled: demand " + std::to_string(d->cpu_demand_millicores) +
                    "m over limit " + std::to_string(*d->cpu_limit_millicores) + "m");
  for (const auto& [k, res] : state.resources) {
    if (const auto* f = std::get_if<FeatureFlagSpec>(&res))
      if (f->enabled && f->target == key.name)
        lines.push_back("feature flag " + k.name + " enabled: fault injected");
    if (const auto* np = std::get_if<NetworkPolicySpec>(&res))
      for (const auto& e : np->denied_edges)
        if (e.from == key.name)
          lines.push_back("connection refused calling " + e.to + " (networkpolicy " + k.name +
                          ")");
  }
  if (lines.empty()) lines.push_back("ok: serving traffic");
  return lines;
}

std::string render_resource(const Resource& r) {
  std::ostringstream os;
  if (const auto* d = std::get_if<DeploymentSpec>(&r)) {
    os << "replicas_desired=" << d->replicas_desired << " image=" << d->image;
    if (!d->command.empty()) os << " command=" << join(d->command, " ");
    os << " cpu_demand_millicores=" << d->cpu_demand_millicores;
    if (d->cpu_limit_millicores) os << " cpu_limit_millicores=" << *d->cpu_limit_millicores;
    os << " memory_working_set_mib=" << d->memory_working_set_mib;
    if (d->memory_limit_mib) os << " memory_limit_mib=" << *d->memory_limit_mib;
    if (d->serviceaccount) os << " serviceaccount=" << *d->serviceaccount;
    for (const auto& [name, src] : d->env)
      os << " env." << name << "=" << env_source_to_string(src);
    if (d->liveness_probe)
      os << " liveness_probe.path=" << d->liveness_probe->path;
    if (d->readiness_probe)
      os << " readiness_probe.path=" << d->readiness_probe->path;
    if (!d->depends_on.empty()) os << " depends_on=" << join(d->depends_on, ",");
  } else if (const auto* s = std::get_if<SecretSpec>(&r)) {
    os << "secret keys:";
    for (const auto& [k, _] : s->data) os << " " << k;
  } else if (const auto* c = std::get_if<ConfigMapSpec>(&r)) {
    os << "configmap data:";
    for (const auto& [k, v] : c->data) os << " " << k << "=" << v;
  } else if (const auto* n = std::get_if<NetworkPolicySpec>(&r)) {
    os << "denied_edges=" << edges_to_string(n->denied_edges);
  } else if (std::holds_alternative<ServiceAccountSpec>(r)) {
    os << "serviceaccount";
  } else if (const auto* f = std::get_if<FeatureFlagSpec>(&r)) {
    os << "flag target=" << f->target << " enabled=" << (f->enabled ? "true" : "false")
       << " error_rate_impact=" << f->error_rate_impact
       << " latency_impact_ms=" << f->latency_impact_ms;
  }
  return os.str();
}

std::string render_pods(const ClusterState& state) {
  std::ostringstream os;
  for (const auto& [key, ps] : state.derived) {
    const auto* d = std::get_if<DeploymentSpec>(&state.resources.at(key));
    os << key.ns << "/" << key.name << " phase=" << phase_to_string(ps.phase) << " ready="
       << ps.ready_replicas << "/" << (d ? d->replicas_desired : 0)
       << " restarts=" << ps.restart_count;
    if (ps.cpu_throttled) os << " cpu_throttled";
    os << "\n";
  }
  return os.str();
}

std::string render_metrics(const MetricSample& s) {
  std::ostringstream os;
  os << "tick=" << s.tick << " error_rate=" << s.error_rate
     << " p99_latency_ms=" << s.p99_latency_ms << " availability=" << s.availability;
  return os.str();
}

}  // namespace breakage::sim
