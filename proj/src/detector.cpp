// SPDX-License-Identifier: Apache-2.0

#include "breakage/detector.hpp"

namespace breakage::detector {

namespace {

using scenario::Comparator;

// Raw comparison; nullopt when the comparison cannot be made (ordered
// comparator against absent or non-numeric mismatch).
std::optional<bool> compare(Comparator cmp, const std::optional<Value>& observed,
                            const std::optional<Value>& expected) {
  if (cmp == Comparator::Exists) return observed.has_value();
  if (cmp == Comparator::Absent) return !observed.has_value();
  if (!observed || !expected) return std::nullopt;
  switch (cmp) {
    case Comparator::Eq: return value_eq(*observed, *expected);
    case Comparator::Ne: return !value_eq(*observed, *expected);
    default: break;
  }
  auto a = value_as_number(*observed);
  auto b = value_as_number(*expected);
  if (!a || !b) return std::nullopt;
  switch (cmp) {
    case Comparator::Lt: return *a < *b;
    case Comparator::Le: return *a <= *b;
    case Comparator::Gt: return *a > *b;
    case Comparator::Ge: return *a >= *b;
    default: return std::nullopt;
  }
}

std::optional<Value> read_metric(const sim::MetricSample& sample, const std::string& name) {
  if (name == "error_rate") return Value{sample.error_rate};
  if (name == "p99_latency_ms") return Value{sample.p99_latency_ms};
  if (name == "availability") return Value{sample.availability};
  return std::nullopt;
}

}  // namespace

ConditionStatus evaluate_condition(ConditionTracker& tracker, const sim::ClusterState& state,
                                   const sim::MetricSample& sample,
                                   const BackendAvailability& backends) {
  const auto& cond = tracker.condition;
  std::optional<bool> raw;
  bool backend_down = false;

  if (const auto* k8s = std::get_if<scenario::K8sSource>(&cond.source)) {
    if (!backends.k8s) {
      backend_down = true;
    } else {
      raw = compare(cond.comparator, sim::read_field(state, k8s->key, k8s->field_path),
                    cond.value);
    }
  } else {
    const auto& metric = std::get<scenario::MetricSource>(cond.source);
    if (!backends.metrics) {
      backend_down = true;
    } else {
      raw = compare(cond.comparator, read_metric(sample, metric.name), cond.value);
    }
  }

  ConditionStatus status;
  if (backend_down || !raw.has_value()) {
    // Missing data is distinguished from failing data only through the
    // skip_if_unevaluable flag.
    status = cond.skip_if_unevaluable ? ConditionStatus::Pass : ConditionStatus::Fail;
    if (!cond.skip_if_unevaluable) {
      tracker.consecutive_pass_ticks = 0;
      tracker.last_status = ConditionStatus::Unevaluable;
      return ConditionStatus::Unevaluable;
    }
  } else {
    status = *raw ? ConditionStatus::Pass : ConditionStatus::Fail;
  }

  if (status == ConditionStatus::Pass)
    tracker.consecutive_pass_ticks += 1;
  else
    tracker.consecutive_pass_ticks = 0;
  tracker.last_status = status;
  return status;
}

ScenarioDetector::ScenarioDetector(const std::vector<scenario::Condition>& fixed_when,
                                   const std::vector<scenario::Condition>& regressed_when) {
  for (const auto& c : fixed_when) fixed_.push_back(ConditionTracker{c});
  for (const auto& c : regressed_when) regressed_.push_back(ConditionTracker{c});
}

DetectorVerdict ScenarioDetector::observe(const sim::ClusterState& state,
                                          const sim::MetricSample& sample,
                                          const BackendAvailability& backends) {
  bool all_fixed = true;
  for (auto& tracker : fixed_) {
    evaluate_condition(tracker, state, sample, backends);
    all_fixed = all_fixed && tracker.sustained_pass();
  }
  verdict_.all_fixed = all_fixed;

  for (auto& tracker : regressed_) {
    evaluate_condition(tracker, state, sample, backends);
    // Latch: once any regressed_when fires it stays fired for the run.
    if (tracker.sustained_pass() && !verdict_.any_regressed) {
      verdict_.any_regressed = true;
      verdict_.regression_trigger = tracker.condition;
    }
  }
  return verdict_;
}

}  // namespace breakage::detector
