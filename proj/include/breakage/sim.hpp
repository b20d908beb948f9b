// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "breakage/core.hpp"

namespace breakage::sim {

enum class ResourceKind {
  Deployment,
  Secret,
  ConfigMap,
  NetworkPolicy,
  ServiceAccount,
  FeatureFlag,
};

std::string kind_to_string(ResourceKind k);
std::optional<ResourceKind> kind_from_string(const std::string& s);

struct ResourceKey {
  ResourceKind kind{};
  std::string ns;
  std::string name;

  auto operator<=>(const ResourceKey&) const = default;
  std::string str() const;  // "Deployment/default/cart"
};

inline ResourceKey deployment_key(const std::string& name, const std::string& ns = "default") {
  return {ResourceKind::Deployment, ns, name};
}

struct ProbeSpec {
  std::string path;
  int port = 80;
  std::set<std::string> healthy_paths;

  bool operator==(const ProbeSpec&) const = default;
};

// Source of one environment variable.
struct EnvSource {
  enum class Kind { Literal, SecretKeyRef, ConfigMapKeyRef };
  Kind kind = Kind::Literal;
  std::string value;  // literal value, or referenced resource name
  std::string key;    // key within the referenced Secret/ConfigMap

  bool operator==(const EnvSource&) const = default;
};

struct DeploymentSpec {
  int replicas_desired = 1;
  std::string image;
  std::vector<std::string> command;
  std::map<std::string, EnvSource> env;
  std::optional<int> cpu_limit_millicores;
  std::optional<int> memory_limit_mib;
  int cpu_demand_millicores = 100;
  int memory_working_set_mib = 64;
  std::optional<ProbeSpec> liveness_probe;
  std::optional<ProbeSpec> readiness_probe;
  std::optional<std::string> serviceaccount;
  // Fixture-declared workload facts the health rules need: per-service base
  // latency, the env vars the process refuses to start without, and the
  // services this one calls.
  double base_latency_ms = 100.0;
  std::vector<std::string> required_env;
  std::vector<std::string> depends_on;

  bool operator==(const DeploymentSpec&) const = default;
};

struct SecretSpec {
  std::map<std::string, std::string> data;
  bool operator==(const SecretSpec&) const = default;
};

struct ConfigMapSpec {
  std::map<std::string, std::string> data;
  bool operator==(const ConfigMapSpec&) const = default;
};

struct DependencyEdge {
  std::string from;  // dependent deployment name
  std::string to;    // dependency deployment name
  auto operator<=>(const DependencyEdge&) const = default;
};

struct NetworkPolicySpec {
  std::vector<DependencyEdge> denied_edges;
  bool operator==(const NetworkPolicySpec&) const = default;
};

struct ServiceAccountSpec {
  bool operator==(const ServiceAccountSpec&) const = default;
};

// One feature flag; when enabled it feeds error-rate / latency contributions
// into its target deployment's metrics.
struct FeatureFlagSpec {
  std::string target;  // deployment name
  bool enabled = false;
  double error_rate_impact = 0.0;
  double latency_impact_ms = 0.0;
  bool operator==(const FeatureFlagSpec&) const = default;
};

using Resource = std::variant<DeploymentSpec, SecretSpec, ConfigMapSpec, NetworkPolicySpec,
                              ServiceAccountSpec, FeatureFlagSpec>;

ResourceKind resource_kind(const Resource& r);
Resource default_resource(ResourceKind kind);

enum class PodPhase { Running, Pending, CrashLoop, ImagePullError, OOMKilled, NotReady };

std::string phase_to_string(PodPhase p);

struct PodStatus {
  PodPhase phase = PodPhase::Running;
  int ready_replicas = 0;
  int restart_count = 0;
  bool cpu_throttled = false;

  bool operator==(const PodStatus&) const = default;
};

struct MetricSample {
  std::int64_t tick = 0;  // simulated seconds
  double error_rate = 0.0;
  double p99_latency_ms = 0.0;
  double availability = 1.0;

  bool operator==(const MetricSample&) const = default;
};

struct LogicalClock {
  std::int64_t tick = 0;
  bool operator==(const LogicalClock&) const = default;
};

// Per-deployment counters the health rules carry across ticks (probe-failure
// streaks, restart counters, eviction windows). Deterministic state, owned by
// the ClusterState value.
struct RuleCounters {
  int liveness_fail_streak = 0;
  int ticks_in_oom = 0;
  int restart_count = 0;
  std::int64_t evicted_until_tick = -1;

  bool operator==(const RuleCounters&) const = default;
};

struct ClusterState {
  std::map<ResourceKey, Resource> resources;
  LogicalClock clock;
  std::map<ResourceKey, PodStatus> derived;
  std::map<ResourceKey, RuleCounters> counters;

  // Fixture-level cluster facts.
  std::set<std::string> valid_images;
  std::set<std::string> valid_entrypoints;
  int node_capacity_millicores = 8000;

  // Per-deployment metric weights; empty means equal weights.
  std::map<std::string, double> metric_weights;

  bool operator==(const ClusterState&) const = default;
};

struct SnapshotRecord {
  std::int64_t taken_at_tick = 0;
  std::map<ResourceKey, Resource> resources;
};

// --- Operations -------------------------------------------------------------

// Applies a field patch to one resource. Value semantics: the input state is
// untouched; derived pod states refresh on the next tick. When `create` is
// set and the key is absent, the patch is applied to a default-constructed
// resource of the key's kind.
ClusterState apply_mutation(const ClusterState& state, const ResourceKey& key,
                            const FieldPatch& patch, bool create = false);

// Pure read. Absent resource or path yields nullopt. Supports spec fields
// plus the derived surface ("derived.phase", "derived.ready_replicas",
// "derived.restart_count", "derived.cpu_throttled") on deployments.
std::optional<Value> read_field(const ClusterState& state, const ResourceKey& key,
                                const std::string& field_path);

std::pair<ClusterState, MetricSample> tick(const ClusterState& state);

SnapshotRecord snapshot(const ClusterState& state, const std::set<ResourceKey>& keys);

ClusterState restore(const ClusterState& state, const SnapshotRecord& snap);

// Marks the deployment's pods evicted for `dip_ticks` ticks starting at the
// next tick: ready replicas drop and one restart is charged.
ClusterState evict_pods(const ClusterState& state, const ResourceKey& deployment, int dip_ticks);

// Rollout-style restart: clears probe-failure streaks and eviction windows
// for the deployment. Does not change the resource spec.
ClusterState restart_deployment(const ClusterState& state, const ResourceKey& deployment);

// Synthesized per-deployment diagnostics derived from whichever health rule
// is firing; the read-logs tool surfaces these.
std::vector<std::string> render_logs(const ClusterState& state, const ResourceKey& deployment);

// Human-readable one-line summaries used by read-style tools.
std::string render_resource(const Resource& r);
std::string render_pods(const ClusterState& state);
std::string render_metrics(const MetricSample& s);

}  // namespace breakage::sim
