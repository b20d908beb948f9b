// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "breakage/detector.hpp"
#include "breakage/scenario.hpp"
#include "breakage/sim.hpp"

namespace breakage::guard {

// Mechanical record of an auto-revert; no semantic interpretation.
struct RevertReason {
  scenario::Condition triggered_condition;
  std::string observed_value;
  std::int64_t at_tick = 0;
  std::vector<sim::ResourceKey> reverted_keys;

  std::string str() const;
};

struct GuardState {
  int reverts_so_far = 0;
  int cap = 2;
  int watch_window_s = 30;
  std::optional<RevertReason> last_revert_reason;
};

inline std::optional<RevertReason> read_last_revert_reason(const GuardState& g) {
  return g.last_revert_reason;
}

// A single-resource Tier-2 mutation. `restart` is a rollout restart (no
// resource fields change); otherwise `patch` is applied to `target`.
struct Mutation {
  sim::ResourceKey target;
  FieldPatch patch;
  bool restart = false;
};

enum class GuardOutcomeKind { Applied, Reverted, Paused, FrameworkError };

struct GuardOutcome {
  GuardOutcomeKind kind = GuardOutcomeKind::Applied;
  std::optional<RevertReason> reason;  // set when kind == Reverted
  std::string error;                   // set when kind == FrameworkError
  int ticks_consumed = 0;
};

// Snapshot -> apply -> watch. Advances the simulation up to
// min(guard.watch_window_s, max_watch_ticks) ticks, evaluating the run's
// detector each tick; on the first tick where any regressed_when condition
// stands triggered, restores the snapshot and reports the mechanical reason.
// A guard that has already spent its revert cap refuses further mutations
// (Paused) without applying them.
GuardOutcome guard_mutation(sim::ClusterState& state, GuardState& guard, const Mutation& mutation,
                            detector::ScenarioDetector& det, int max_watch_ticks,
                            sim::MetricSample* last_sample = nullptr,
                            const detector::BackendAvailability& backends = {});

}  // namespace breakage::guard
