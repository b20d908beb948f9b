// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "breakage/scenario.hpp"
#include "breakage/sim.hpp"

namespace breakage::injector {

enum class HandleStatus { Active, Undone, Failed };

// Stored reverse patch: plain data, serializable and replayable. Exactly the
// injected field paths are restored on undo; a resource created by the
// injection is deleted instead.
struct UndoAction {
  sim::ResourceKey key;
  FieldPatch reverse_fields;     // prior values; monostate restores "absent"
  bool remove_resource = false;  // injection created the resource
  bool clear_eviction = false;   // pod-evict is undone by ending the dip
};

struct InjectionHandle {
  std::int64_t applied_at_tick = 0;
  UndoAction undo;
  HandleStatus status = HandleStatus::Failed;
  std::string failure;  // set when status == Failed
};

struct InjectionResult {
  sim::ClusterState state;
  InjectionHandle handle;
};

// Applies the scenario's fault. A failed injection (unknown target, bad
// params) returns status=Failed with the original state; the runner records
// such runs as framework errors.
InjectionResult inject(const sim::ClusterState& state, const scenario::InjectorSpec& spec);

// Restores exactly the injected fields to their pre-injection values. Other
// mutations made since (agent fixes elsewhere) are preserved. Double undo is
// a no-op.
sim::ClusterState undo(const sim::ClusterState& state, InjectionHandle& handle);

}  // namespace breakage::injector
