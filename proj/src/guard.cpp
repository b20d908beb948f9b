// SPDX-License-Identifier: Apache-2.0

#include "breakage/guard.hpp"

#include <sstream>

namespace breakage::guard {

std::string RevertReason::str() const {
  std::ostringstream os;
  os << "auto-revert at tick " << at_tick << ": condition ["
     << scenario::serialize_condition(triggered_condition) << "] observed " << observed_value
     << "; restored";
  for (const auto& k : reverted_keys) os << " " << k.str();
  return os.str();
}

namespace {

std::string observed_value_of(const scenario::Condition& cond, const sim::ClusterState& state,
                              const sim::MetricSample& sample) {
  if (const auto* k8s = std::get_if<scenario::K8sSource>(&cond.source)) {
    auto v = sim::read_field(state, k8s->key, k8s->field_path);
    return v ? value_to_string(*v) : "absent";
  }
  const auto& name = std::get<scenario::MetricSource>(cond.source).name;
  if (name == "error_rate") return value_to_string(Value{sample.error_rate});
  if (name == "p99_latency_ms") return value_to_string(Value{sample.p99_latency_ms});
  if (name == "availability") return value_to_string(Value{sample.availability});
  return "unknown-metric";
}

}  // namespace

GuardOutcome guard_mutation(sim::ClusterState& state, GuardState& guard, const Mutation& mutation,
                            detector::ScenarioDetector& det, int max_watch_ticks,
                            sim::MetricSample* last_sample,
                            const detector::BackendAvailability& backends) {
  GuardOutcome outcome;
  if (guard.reverts_so_far >= guard.cap) {
    outcome.kind = GuardOutcomeKind::Paused;
    return outcome;
  }

  sim::SnapshotRecord snap;
  try {
    snap = sim::snapshot(state, {mutation.target});
  } catch (const Error& e) {
    outcome.kind = GuardOutcomeKind::FrameworkError;
    outcome.error = std::string("snapshot failed: ") + e.what();
    return outcome;
  }

  try {
    if (mutation.restart)
      state = sim::restart_deployment(state, mutation.target);
    else
      state = sim::apply_mutation(state, mutation.target, mutation.patch);
  } catch (const Error& e) {
    // The mutation itself was ill-formed; surface it to the agent as a tool
    // failure rather than burning a revert.
    outcome.kind = GuardOutcomeKind::FrameworkError;
    outcome.error = std::string("mutation failed: ") + e.what();
    return outcome;
  }

  int window = std::min(guard.watch_window_s, max_watch_ticks);
  for (int i = 0; i < window; ++i) {
    auto [next, sample] = sim::tick(state);
    state = std::move(next);
    if (last_sample) *last_sample = sample;
    outcome.ticks_consumed += 1;
    det.observe(state, sample, backends);
    if (const auto* firing = det.firing_regression()) {
      RevertReason reason;
      reason.triggered_condition = firing->condition;
      reason.observed_value = observed_value_of(firing->condition, state, sample);
      reason.at_tick = state.clock.tick;
      reason.reverted_keys = {mutation.target};
      state = sim::restore(state, snap);
      guard.reverts_so_far += 1;
      guard.last_revert_reason = reason;
      outcome.kind = GuardOutcomeKind::Reverted;
      outcome.reason = reason;
      return outcome;
    }
  }
  outcome.kind = GuardOutcomeKind::Applied;
  return outcome;
}

}  // namespace breakage::guard
