// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "breakage/scenario.hpp"
#include "breakage/sim.hpp"

namespace breakage::detector {

enum class ConditionStatus { Pass, Fail, Unevaluable };

struct ConditionTracker {
  scenario::Condition condition;
  int consecutive_pass_ticks = 0;
  ConditionStatus last_status = ConditionStatus::Fail;

  // Effective verdict under the sustained window.
  bool sustained_pass() const {
    return last_status == ConditionStatus::Pass &&
           consecutive_pass_ticks >= condition.sustained_for_s;
  }
};

// Which backends are reachable this run; exercised by skip_if_unevaluable.
struct BackendAvailability {
  bool k8s = true;
  bool metrics = true;
};

// One tick of evaluation. Unevaluable + skip_if_unevaluable reports Pass
// (and counts toward the window); unevaluable without the flag reports Fail.
ConditionStatus evaluate_condition(ConditionTracker& tracker, const sim::ClusterState& state,
                                   const sim::MetricSample& sample,
                                   const BackendAvailability& backends = {});

struct DetectorVerdict {
  bool all_fixed = false;
  bool any_regressed = false;
  std::optional<scenario::Condition> regression_trigger;
};

// Per-run detector set: fixed_when conjunction with sustained windows,
// regressed_when disjunction latching for the whole run.
class ScenarioDetector {
 public:
  ScenarioDetector(const std::vector<scenario::Condition>& fixed_when,
                   const std::vector<scenario::Condition>& regressed_when);

  // Evaluates every tracker against the post-tick state; returns the verdict
  // as it stands after this tick.
  DetectorVerdict observe(const sim::ClusterState& state, const sim::MetricSample& sample,
                          const BackendAvailability& backends = {});

  DetectorVerdict verdict() const { return verdict_; }
  const std::vector<ConditionTracker>& fixed_trackers() const { return fixed_; }
  const std::vector<ConditionTracker>& regressed_trackers() const { return regressed_; }

  // Live (non-latched) signal: some regressed_when condition stands
  // triggered at the most recent tick. The guard watches this.
  const ConditionTracker* firing_regression() const {
    for (const auto& t : regressed_)
      if (t.sustained_pass()) return &t;
    return nullptr;
  }

 private:
  std::vector<ConditionTracker> fixed_;
  std::vector<ConditionTracker> regressed_;
  DetectorVerdict verdict_;
};

}  // namespace breakage::detector
