// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "breakage/detector.hpp"
#include "breakage/experience.hpp"
#include "breakage/guard.hpp"
#include "breakage/scenario.hpp"
#include "breakage/sim.hpp"

namespace breakage::agent {

enum class Tier { T1Read, T2Mutate, T3Approved };
enum class Reversibility { Reversible, Irreversible };

std::string tier_to_string(Tier t);

struct ToolInfo {
  scenario::ToolName name;
  Tier tier = Tier::T1Read;
  Reversibility reversibility = Reversibility::Reversible;
};

// Closed tool vocabulary. Tier-2 tools are reversible by construction;
// irreversible tools are Tier-3 gated.
const std::vector<ToolInfo>& tool_registry();
std::optional<ToolInfo> tool_info(const scenario::ToolName& name);
std::vector<scenario::ToolName> tool_names();

struct ToolCall {
  scenario::ToolName tool;
  std::optional<sim::ResourceKey> target;
  std::map<std::string, Value> args;
};

struct PostmortemDraft {
  scenario::CategoryId primary_category;
  std::vector<scenario::CategoryId> secondary_categories;
  std::string narrative;
};

struct ActCallTool {
  ToolCall call;
};
struct ActHypothesis {
  scenario::CategoryId category;
  double confidence = 0.5;
  std::string note;
};
struct ActIdle {};
struct ActDone {};
using AgentAction = std::variant<ActCallTool, ActHypothesis, ActIdle, ActDone>;

// Handed to the agent once, before its first tool call.
struct AgentContext {
  std::vector<experience::Retrieved> exemplars;
  std::string vocabulary;  // rendered category list
  std::string incident_brief;
  // Subject of the incident (the alerting deployment), as an alert would name it.
  std::optional<sim::ResourceKey> focus;
  int remaining_budget_s = 0;
};

struct Observation {
  std::string tool;
  std::string result;
  bool ok = true;
};

// Per-cycle view. `read` is the Tier-1 read surface (equivalent to a
// get-resource field read); mutations only flow through returned tool calls.
struct AgentView {
  const std::vector<Observation>& observations;
  std::optional<guard::RevertReason> last_revert_reason;
  int remaining_budget_s = 0;
  int denials = 0;
  std::function<std::optional<Value>(const sim::ResourceKey&, const std::string&)> read;
};

class AgentBehavior {
 public:
  virtual ~AgentBehavior() = default;
  virtual std::string name() const = 0;
  virtual void begin(const AgentContext& ctx) = 0;
  virtual AgentAction next(const AgentView& view) = 0;
  virtual std::optional<PostmortemDraft> finalize() = 0;
};

// ---------------------------------------------------------------------------
// Synthetic approver
// ---------------------------------------------------------------------------

struct ApproverConfig {
  int delay_s = 0;
  double deny_rate = 0.0;
  std::uint64_t seed = 0;
};

struct AuditEntry {
  std::int64_t tick = 0;
  scenario::ToolName tool;
  bool approved = false;
  int latency_s = 0;
};

struct Decision {
  bool approved = false;
  int latency_s = 0;
  AuditEntry audit;
};

class SyntheticApprover {
 public:
  explicit SyntheticApprover(const ApproverConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}
  Decision approve(const ToolCall& call, std::int64_t tick);
  const std::vector<AuditEntry>& audit_log() const { return audit_; }

 private:
  ApproverConfig cfg_;
  Rng rng_;
  std::vector<AuditEntry> audit_;
};

// ---------------------------------------------------------------------------
// Transcript and loop
// ---------------------------------------------------------------------------

enum class EndReason { AgentDone, BudgetExhausted, GuardPaused, FrameworkError };

std::string end_reason_to_string(EndReason r);

struct TranscriptEvent {
  std::int64_t tick = 0;
  std::string kind;  // retrieval | tool | observation | hypothesis | revert | approval | denial | pause | postmortem
  std::string detail;
};

struct AgentTranscript {
  std::vector<TranscriptEvent> events;
  std::vector<experience::HypothesisRecord> hypotheses;
  std::vector<scenario::ToolName> tool_calls;  // names, in call order
  std::optional<PostmortemDraft> postmortem;
  bool postmortem_synthesized = false;  // agent failed to emit one
  EndReason end_reason = EndReason::BudgetExhausted;
  std::string framework_error;  // non-empty when end_reason == FrameworkError

  std::string to_jsonl() const;
};

struct LoopConfig {
  guard::GuardState guard;
  ApproverConfig approver;
  detector::BackendAvailability backends;
};

struct LoopResult {
  sim::ClusterState state;  // final, pre-undo
  sim::MetricSample last_sample;
  AgentTranscript transcript;
  guard::GuardState guard;
  std::int64_t ticks_used = 0;
};

// Runs the agent loop: T1 calls are pure reads, T2 calls go through the
// speculative-execution guard, T3 calls through the synthetic approver. The
// loop ends when the agent declares done, the budget exhausts, or the guard
// pauses. Context (with retrieval results) must be assembled by the caller
// before the loop starts, which is what pins retrieval before the first tool
// call.
LoopResult run_agent_loop(AgentBehavior& agent, const scenario::ScenarioSpec& spec,
                          sim::ClusterState state, detector::ScenarioDetector& det,
                          const AgentContext& ctx, const LoopConfig& cfg,
                          std::int64_t ticks_used);

// Mechanical symptom summary of the current state; the retrieval query.
std::string incident_brief(const sim::ClusterState& state, const sim::MetricSample& sample);

// ---------------------------------------------------------------------------
// Reference agents (deterministic policies; no LLM)
// ---------------------------------------------------------------------------

// Framework self-test agent: constructed with the scenario's ground truth and
// the exact corrective calls (derived by the runner from the injection's
// reverse patch -- a test-only channel).
class OracleAgent : public AgentBehavior {
 public:
  OracleAgent(scenario::GroundTruth truth, std::vector<ToolCall> probes,
              std::vector<ToolCall> fix);
  std::string name() const override { return "oracle"; }
  void begin(const AgentContext& ctx) override;
  AgentAction next(const AgentView& view) override;
  std::optional<PostmortemDraft> finalize() override;

 protected:
  scenario::GroundTruth truth_;
  std::vector<ToolCall> probes_;
  std::vector<ToolCall> fix_;
  size_t step_ = 0;
  bool hypothesis_emitted_ = false;
  bool done_ = false;
};

// No actions; a minimal wrong-category postmortem at the end.
class NullAgent : public AgentBehavior {
 public:
  std::string name() const override { return "null"; }
  void begin(const AgentContext&) override {}
  AgentAction next(const AgentView&) override { return ActIdle{}; }
  std::optional<PostmortemDraft> finalize() override;
};

// Oracle that goes wrong with probability p_wrong: picks a secondary (or
// unrelated) category and applies the same fix tool with harmless wrong
// arguments. Deterministic from the seed.
class NoisyOracleAgent : public OracleAgent {
 public:
  NoisyOracleAgent(scenario::GroundTruth truth, std::vector<ToolCall> probes,
                   std::vector<ToolCall> fix, double p_wrong, std::uint64_t seed);
  std::string name() const override { return "noisy-oracle"; }
  void begin(const AgentContext& ctx) override;
  std::optional<PostmortemDraft> finalize() override;

 private:
  bool wrong_ = false;
};

// Replays the nearest resolved exemplar's action list, materializing the fix
// from the exemplar's remedy tag; falls back to a fixed probe sequence and a
// phase-based heuristic when retrieval returns nothing. p_slip botches the
// fix with that probability (per-run, seeded).
class ImitatorAgent : public AgentBehavior {
 public:
  explicit ImitatorAgent(double p_slip = 0.0, std::uint64_t seed = 0);
  std::string name() const override { return "imitator"; }
  void begin(const AgentContext& ctx) override;
  AgentAction next(const AgentView& view) override;
  std::optional<PostmortemDraft> finalize() override;

 private:
  double p_slip_;
  Rng rng_;
  bool slipped_ = false;
  bool planned_ = false;
  std::optional<sim::ResourceKey> focus_;
  std::optional<experience::Postmortem> exemplar_;
  scenario::CategoryId diagnosis_;
  std::vector<AgentAction> plan_;
  size_t step_ = 0;
  std::string narrative_;
};

// Remedy tags carried in postmortem narratives ("remedy=<name>[:<args>]");
// the imitator turns them into concrete tool calls against the focus
// deployment. Returns nullopt for an unknown or inapplicable remedy.
std::optional<ToolCall> materialize_remedy(
    const std::string& remedy, const sim::ResourceKey& focus,
    const std::function<std::optional<Value>(const sim::ResourceKey&, const std::string&)>& read);

std::optional<std::string> extract_remedy(const std::string& narrative);

// The unhealthy deployment the reference agents investigate: first by key
// order with a non-Running phase, else a throttled one, else one with a
// ready-replica gap.
std::optional<sim::ResourceKey> focus_deployment(const sim::ClusterState& state);

}  // namespace breakage::agent
