// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "breakage/runner.hpp"
#include "breakage/stats.hpp"

namespace breakage::experiments {

// Everything packaged plans need from disk.
struct DataPaths {
  std::string scenarios_dir;
  std::string vocab_file;
  std::string fixture_file;
};

// BREAKAGE_DATA_DIR, else the compiled-in source data directory.
std::string default_data_dir();
DataPaths default_paths();

struct LoadedLibrary {
  scenario::Vocabulary vocab;
  sim::ClusterState fixture;
  std::map<std::string, scenario::ScenarioSpec> scenarios;
};

LoadedLibrary load_library(const DataPaths& paths);

enum class CorpusProfile { Aligned, Misaligned, Mixed };

std::string profile_to_string(CorpusProfile p);

// Seeds `size` synthetic postmortems for the scenario's mechanism into the
// store, embedded with the external (token-hash) embedder. Aligned corpora
// carry the correct remedy for the mechanism; misaligned corpora carry a
// lexically-near sibling mechanism's remedy (the raise-memory-limit pattern
// against a CPU fault); mixed corpora interleave the two.
void seed_corpus(experience::Store& store, CorpusProfile profile,
                 const scenario::ScenarioSpec& spec, const sim::ClusterState& fixture, int size,
                 std::uint64_t seed);

struct CorpusSeedSpec {
  std::string scenario;
  CorpusProfile profile = CorpusProfile::Aligned;
  int size = 0;
};

// One grid experiment: a plan plus the corpus seeded before its first run.
struct GridExperiment {
  runner::ExperimentPlan plan;
  std::vector<CorpusSeedSpec> corpus;
  double imitator_p_slip = 0.15;
  double noisy_p_wrong = 0.3;
};

GridExperiment load_plan_file(const std::string& path);

struct PackagedResult {
  std::vector<runner::RunRecord> records;
  std::string report;
  std::vector<std::string> manifest_paths;
};

// Runs the grid against a per-experiment store and manifest under out_dir;
// resumable (existing manifest rows are skipped, the store file is replayed).
PackagedResult run_grid_experiment(const GridExperiment& grid, const LoadedLibrary& lib,
                                   const std::string& out_dir);

// Named, packaged experiment designs.
//   falsification: 3 scenarios x 2 arms
//   density-sweep: 3 scenarios x 3 pool caps {5, 15, unlimited} x 2 arms
//   n40-rerun:     2 scenarios x 2 arms (reps default 40)
//   bias-audit-demo: correlated + uncorrelated populations, noisy oracle
//   small-sample-demo: subsample spread on a synthetic sigma=0.12 population
const std::vector<std::string>& packaged_names();

PackagedResult run_packaged(const std::string& name, int reps, std::uint64_t seed,
                            const DataPaths& paths, const std::string& out_dir);

// Table-shaped per-scenario / pooled comparison over manifest rows, plus the
// decision verdict when exactly three scenarios are present and the
// substrate-health line. Rows with framework_error are excluded from the
// arithmetic and counted separately.
std::string render_comparison_report(const std::vector<runner::ManifestRow>& rows,
                                     const std::string& treatment_arm,
                                     const std::string& control_arm);

// Per-scenario treatment-vs-control Welch result over manifest rows; arms are
// matched by exact name or by "<arm>-" prefix (density tiers).
stats::WelchResult scenario_welch(const std::vector<runner::ManifestRow>& rows,
                                  const std::string& scenario_id,
                                  const std::string& treatment_arm,
                                  const std::string& control_arm);

std::vector<double> composites_of(const std::vector<runner::ManifestRow>& rows,
                                  const std::string& scenario_id, const std::string& arm_prefix);

}  // namespace breakage::experiments
