// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "breakage/experiments.hpp"
#include "breakage/runner.hpp"

namespace {

using namespace breakage;

runner::ArmConfig arm_by_name(const std::string& name) {
  runner::ArmConfig arm;
  arm.name = name;
  // Convention mirrored in the packaged experiments: the control arm runs
  // the deterministic embedder, everything else the external one. Env vars
  // (BREAKAGE_EMBEDDER, ...) override on top.
  arm.retrieval.embedder = name == "control" ? experience::EmbedderKind::Deterministic
                                             : experience::EmbedderKind::External;
  return arm;
}

int cmd_run(const std::string& data_dir, const std::string& scenario_id,
            const std::string& agent_name, const std::string& arm_name, std::uint64_t seed,
            const std::string& store_path, const std::string& transcript_dir) {
  experiments::DataPaths paths{data_dir + "/scenarios", data_dir + "/vocab/root-cause-categories.yaml",
                               data_dir + "/fixtures/baseline-topology.yaml"};
  auto lib = experiments::load_library(paths);
  auto it = lib.scenarios.find(scenario_id);
  if (it == lib.scenarios.end()) {
    std::fprintf(stderr, "unknown scenario: %s\n", scenario_id.c_str());
    return 2;
  }
  runner::RunnerConfig cfg;
  cfg.fixture = lib.fixture;
  cfg.vocab = &lib.vocab;
  cfg.transcript_dir = transcript_dir;
  auto store = store_path.empty() ? experience::Store()
                                  : experience::Store::open(store_path);
  runner::Runner instance(cfg, &store);
  auto factory = runner::make_agent_factory(agent_name, lib.fixture);
  auto record = instance.run_scenario(it->second, agent_name, factory, arm_by_name(arm_name),
                                      /*rep=*/0, seed);
  std::cout << runner::manifest_header() << runner::manifest_row(record);
  std::cout << "-- transcript --\n" << instance.last_transcript().to_jsonl();
  return record.score.framework_error ? 1 : 0;
}

int cmd_experiment(const std::string& data_dir, const std::string& plan_path,
                   const std::string& packaged, int reps, std::uint64_t seed,
                   const std::string& out_dir) {
  experiments::DataPaths paths{data_dir + "/scenarios", data_dir + "/vocab/root-cause-categories.yaml",
                               data_dir + "/fixtures/baseline-topology.yaml"};
  experiments::PackagedResult result;
  if (!packaged.empty()) {
    result = experiments::run_packaged(packaged, reps, seed, paths, out_dir);
  } else {
    auto grid = experiments::load_plan_file(plan_path);
    if (reps > 0) grid.plan.reps = reps;
    grid.plan.base_seed = seed;
    auto lib = experiments::load_library(paths);
    result = experiments::run_grid_experiment(grid, lib, out_dir);
  }
  std::cout << result.report;
  for (const auto& m : result.manifest_paths) std::cout << "manifest: " << m << "\n";
  return 0;
}

int cmd_analyze(const std::string& manifest_path, const std::string& treatment,
                const std::string& control) {
  auto rows = runner::parse_manifest(scenario::read_text_file(manifest_path));
  std::cout << experiments::render_comparison_report(rows, treatment, control);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"breakage: fault-injection measurement harness for operations agents"};
  app.require_subcommand(1);

  std::string data_dir = experiments::default_data_dir();

  auto* run = app.add_subcommand("run", "run one scenario lifecycle");
  std::string scenario_id, agent_name = "oracle", arm_name = "tei";
  std::uint64_t seed = 0;
  std::string store_path, transcript_dir;
  run->add_option("--scenario", scenario_id, "scenario id")->required();
  run->add_option("--agent", agent_name, "oracle | null | noisy-oracle | imitator");
  run->add_option("--arm", arm_name, "arm name; 'control' selects the deterministic embedder");
  run->add_option("--seed", seed, "run seed");
  run->add_option("--store", store_path, "experience store file (jsonl)");
  run->add_option("--transcripts", transcript_dir, "directory for transcript jsonl files");
  run->add_option("--data-dir", data_dir, "data directory");

  auto* experiment = app.add_subcommand("experiment", "run an experiment grid");
  std::string plan_path, packaged;
  int reps = 0;
  std::uint64_t base_seed = 42;
  std::string out_dir = "/tmp/breakage";
  experiment->add_option("--plan", plan_path, "experiment plan yaml");
  experiment->add_option("--packaged", packaged, "falsification | density-sweep | n40-rerun | bias-audit-demo | small-sample-demo");
  experiment->add_option("--reps", reps, "reps per cell (packaged defaults: 20; n40-rerun: 40)");
  experiment->add_option("--seed", base_seed, "base seed");
  experiment->add_option("--out", out_dir, "output directory for manifest + store");
  experiment->add_option("--data-dir", data_dir, "data directory");

  auto* analyze = app.add_subcommand("analyze", "per-scenario and pooled tables from a manifest");
  std::string manifest_path, treatment = "tei", control = "control";
  analyze->add_option("--manifest", manifest_path, "manifest csv")->required();
  analyze->add_option("--treatment", treatment, "treatment arm name or prefix");
  analyze->add_option("--control", control, "control arm name or prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(data_dir, scenario_id, agent_name, arm_name, seed, store_path,
                     transcript_dir);
    if (experiment->parsed()) {
      if (plan_path.empty() == packaged.empty()) {
        std::fprintf(stderr, "experiment needs exactly one of --plan or --packaged\n");
        return 2;
      }
      if (reps == 0) reps = packaged == "n40-rerun" ? 40 : 20;
      return cmd_experiment(data_dir, plan_path, packaged, reps, base_seed, out_dir);
    }
    if (analyze->parsed()) return cmd_analyze(manifest_path, treatment, control);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
