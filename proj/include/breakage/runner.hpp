// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "breakage/agent.hpp"
#include "breakage/experience.hpp"
#include "breakage/scenario.hpp"
#include "breakage/scorer.hpp"

namespace breakage::runner {

struct RunRecord {
  std::string run_id;
  std::string scenario_id;
  std::string arm;
  std::string embedder;
  std::optional<int> pool_cap;  // nullopt = unlimited
  int rep = 0;
  std::int64_t seed = 0;
  scorer::ScoreResult score;
  experience::Outcome outcome = experience::Outcome::Inconclusive;
  agent::EndReason end_reason = agent::EndReason::BudgetExhausted;
  std::int64_t wall_ticks = 0;
};

struct ArmConfig {
  std::string name;
  experience::RetrievalConfig retrieval;
};

// Builds an agent for one run. NoisyOracle-style agents receive the per-run
// seed; oracle-style agents are built by the runner itself because they need
// the injection's reverse patch.
using AgentFactory =
    std::function<std::unique_ptr<agent::AgentBehavior>(const scenario::ScenarioSpec&,
                                                        std::uint64_t run_seed)>;

struct RunnerConfig {
  sim::ClusterState fixture;
  const scenario::Vocabulary* vocab = nullptr;
  agent::ApproverConfig approver;
  guard::GuardState guard;
  detector::BackendAvailability backends;
  int settle_ticks = 3;    // healthy baseline before injection
  int manifest_ticks = 5;  // fault-manifestation window before the agent starts
  std::string transcript_dir;  // empty: transcripts not written
};

// Stable per-run seed from (base_seed, scenario, arm, rep).
std::uint64_t run_seed(std::uint64_t base_seed, const std::string& scenario_id,
                       const std::string& arm, int rep);

// One runner instance executes one scenario at a time.
class Runner {
 public:
  Runner(RunnerConfig cfg, experience::Store* store);

  // Full lifecycle: fixture -> inject -> retrieve -> agent loop -> final
  // detector evaluation (pre-undo) -> score -> undo -> postmortem append.
  // Substrate failures surface as framework-error records, never as crashes.
  RunRecord run_scenario(const scenario::ScenarioSpec& spec, const std::string& agent_name,
                         const AgentFactory& factory, const ArmConfig& arm, int rep,
                         std::uint64_t seed);

  const agent::AgentTranscript& last_transcript() const { return last_transcript_; }

 private:
  RunnerConfig cfg_;
  experience::Store* store_;
  bool active_ = false;
  agent::AgentTranscript last_transcript_;
};

struct ExperimentPlan {
  std::string name;
  std::vector<std::string> scenarios;
  std::vector<ArmConfig> arms;
  int reps = 1;
  std::uint64_t base_seed = 0;
  std::string agent;  // behavior name: oracle | null | noisy-oracle | imitator
};

void validate_plan(const ExperimentPlan& plan);

// Manifest CSV, RFC-4180, fixed column order.
extern const std::vector<std::string> kManifestColumns;

std::string manifest_header();
std::string manifest_row(const RunRecord& r);

struct ManifestRow {
  std::string run_id;
  std::string scenario;
  std::string arm;
  std::string embedder;
  std::string pool_cap;
  int rep = 0;
  std::int64_t seed = 0;
  double composite = 0.0;
  int detected = 0;
  double diagnosis_credit = 0.0;
  int fixed = 0;
  int no_regressions = 0;
  bool retrieval_used = false;
  bool channel_disagreement = false;
  bool framework_error = false;
  std::string outcome;
  std::string end_reason;
  std::int64_t wall_ticks = 0;
};

std::vector<ManifestRow> parse_manifest(const std::string& csv_text);
std::string render_manifest(const std::vector<RunRecord>& rows);

// Incremental, crash-resumable manifest writer: existing (scenario, arm, rep)
// keys are skipped on resume.
class ManifestWriter {
 public:
  explicit ManifestWriter(const std::string& path);
  bool contains(const std::string& scenario_id, const std::string& arm, int rep) const;
  void append(const RunRecord& record);
  size_t rows_written() const { return keys_.size(); }

 private:
  std::string path_;
  std::set<std::string> keys_;
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // records executed in this invocation
  int framework_errors = 0;
  int skipped = 0;  // already present in the manifest
};

// Executes the full grid (scenarios x arms x reps), appending to the manifest
// incrementally. The store accumulates this experiment's postmortems on top
// of whatever corpus seeding put there.
ExperimentResult run_experiment(const ExperimentPlan& plan,
                                const std::map<std::string, scenario::ScenarioSpec>& library,
                                const RunnerConfig& cfg, experience::Store& store,
                                const AgentFactory& factory, ManifestWriter& manifest);

// Reference-agent factories by name; oracle variants are built per-run from
// the scenario (test-only ground-truth channel).
AgentFactory make_agent_factory(const std::string& name, const sim::ClusterState& fixture,
                                double noisy_p_wrong = 0.3, double imitator_p_slip = 0.15);

// Oracle scripting: probe calls from the scenario's expected Tier-1 actions
// and corrective calls derived from the injection's reverse patch.
std::vector<agent::ToolCall> oracle_probes(const scenario::ScenarioSpec& spec,
                                           const sim::ClusterState& fixture);
std::vector<agent::ToolCall> oracle_fix(const scenario::ScenarioSpec& spec,
                                        const sim::ClusterState& fixture);

// The deployment a scenario's fault surfaces on (the injector target itself,
// a flag's target, a denied edge's dependent, or the deployment whose env
// references the injected Secret/ConfigMap).
sim::ResourceKey affected_deployment(const scenario::ScenarioSpec& spec,
                                     const sim::ClusterState& fixture);

}  // namespace breakage::runner
