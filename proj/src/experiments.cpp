// SPDX-License-Identifier: Apache-2.0

#include "breakage/experiments.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#ifndef BREAKAGE_DATA_DIR
#define BREAKAGE_DATA_DIR "data"
#endif

namespace breakage::experiments {

std::string default_data_dir() {
  if (const char* env = std::getenv("BREAKAGE_DATA_DIR")) return env;
  return BREAKAGE_DATA_DIR;
}

DataPaths default_paths() {
  auto dir = default_data_dir();
  return {dir + "/scenarios", dir + "/vocab/root-cause-categories.yaml",
          dir + "/fixtures/baseline-topology.yaml"};
}

LoadedLibrary load_library(const DataPaths& paths) {
  auto vocab = scenario::load_vocabulary(scenario::read_text_file(paths.vocab_file));
  auto fixture = scenario::load_fixture(scenario::read_text_file(paths.fixture_file));
  auto scenarios = scenario::load_scenario_dir(paths.scenarios_dir, vocab);
  return {std::move(vocab), std::move(fixture), std::move(scenarios)};
}

std::string profile_to_string(CorpusProfile p) {
  switch (p) {
    case CorpusProfile::Aligned: return "aligned";
    case CorpusProfile::Misaligned: return "misaligned";
    case CorpusProfile::Mixed: return "mixed";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Corpus seeding
// ---------------------------------------------------------------------------

namespace {

struct CorpusTemplate {
  std::string symptom;  // brief-flavored symptom text
  std::string remedy;   // remedy token ("" = none)
  scenario::CategoryId category;
  std::vector<scenario::ToolName> actions;
};

std::string fixture_string(const sim::ClusterState& fixture, const sim::ResourceKey& key,
                           const std::string& path, const std::string& fallback) {
  auto v = sim::read_field(fixture, key, path);
  return v ? value_to_string(*v) : fallback;
}

// The symptom text and correct remedy for the scenario's own mechanism.
CorpusTemplate aligned_template(const scenario::ScenarioSpec& spec,
                                const sim::ClusterState& fixture) {
  using scenario::InjectorType;
  CorpusTemplate t;
  t.category = spec.ground_truth.primary_category;
  t.actions = spec.expected_actions;
  auto svc = runner::affected_deployment(spec, fixture);
  const auto& target = spec.injector.target;
  std::string svc_ref = "deployment " + svc.ns + "/" + svc.name;

  switch (spec.injector.type) {
    case InjectorType::SecretContent: {
      std::string key;
      if (auto it = spec.injector.params.find("key"); it != spec.injector.params.end())
        key = value_to_string(it->second);
      std::string op;
      if (auto it = spec.injector.params.find("op"); it != spec.injector.params.end())
        op = value_to_string(it->second);
      if (op == "remove-key") {
        t.symptom = svc_ref + " phase=CrashLoop ready=0 pods crashlooping logs FATAL missing " +
                    "required env Secret " + target.name + " key " + key +
                    " absent restarts climbing";
        t.remedy = "restore-secret-key:" + target.name + "/" + key;
      } else {
        std::string orig = fixture_string(fixture, target, "data." + key, "rotated");
        t.symptom = svc_ref + " phase=CrashLoop pods crashlooping logs FATAL required env Secret " +
                    target.name + " key " + key + " value rejected auth failure restarts";
        t.remedy = "restore-secret-value:" + target.name + "/" + key + "=" + orig;
      }
      break;
    }
    case InjectorType::ConfigMapPatch: {
      std::string key;
      if (auto it = spec.injector.params.find("key"); it != spec.injector.params.end())
        key = value_to_string(it->second);
      std::string orig = fixture_string(fixture, target, "data." + key, "default");
      t.symptom = svc_ref + " phase=CrashLoop logs FATAL missing required env ConfigMap " +
                  target.name + " key " + key + " absent restarts climbing";
      t.remedy = "";  // configmap restores need the original value
      if (!orig.empty()) t.remedy = "";
      break;
    }
    case InjectorType::FlagdFlag: {
      t.symptom = svc_ref + " healthy pods but error_rate elevated logs feature flag " +
                  target.name + " enabled fault injected latency";
      t.remedy = "disable-flag:" + target.name;
      break;
    }
    case InjectorType::NetworkPolicy: {
      t.symptom = svc_ref + " error_rate elevated logs connection refused networkpolicy " +
                  target.name + " denied dependency edge";
      t.remedy = "";
      break;
    }
    case InjectorType::PodEvict: {
      t.symptom = svc_ref + " ready dip restarts pod evicted availability reduced " +
                  "dependents error rate elevated";
      t.remedy = "restart";
      break;
    }
    case InjectorType::DeploymentPatch: {
      const auto& params = spec.injector.params;
      auto has = [&](const std::string& field) { return params.count(field) > 0; };
      if (has("cpu_limit_millicores")) {
        t.symptom = svc_ref + " phase=Running cpu_throttled logs cpu throttled demand over " +
                    "limit latency degraded p99 high container resource";
        t.remedy = "raise-cpu-limit";
      } else if (has("memory_limit_mib")) {
        t.symptom = svc_ref + " phase=OOMKilled logs container killed OOMKilled working set " +
                    "over memory limit restarts climbing resource";
        t.remedy = "raise-memory-limit";
      } else if (has("replicas_desired")) {
        t.symptom = svc_ref + " phase=Running ready=0/0 scaled to zero replicas availability " +
                    "zero dependents error rate";
        t.remedy = "scale-up";
      } else if (has("image")) {
        std::string orig = fixture_string(fixture, target, "image", "latest");
        t.symptom = svc_ref + " phase=ImagePullError logs ErrImagePull image not found in " +
                    "registry ready zero";
        t.remedy = "fix-image:" + orig;
      } else if (has("liveness_probe.path")) {
        std::string orig = fixture_string(fixture, target, "liveness_probe.path", "/healthz");
        t.symptom = svc_ref + " phase=CrashLoop logs liveness probe failed GET 503 restarting " +
                    "container restarts climbing";
        t.remedy = "fix-probe-path:liveness=" + orig;
      } else if (has("readiness_probe.path")) {
        std::string orig = fixture_string(fixture, target, "readiness_probe.path", "/ready");
        t.symptom = svc_ref + " phase=NotReady logs readiness probe failed GET 503 availability " +
                    "zero pods running not ready";
        t.remedy = "fix-probe-path:readiness=" + orig;
      } else if (has("cpu_demand_millicores")) {
        std::string orig = fixture_string(fixture, target, "cpu_demand_millicores", "100");
        t.symptom = svc_ref + " phase=Pending logs insufficient cpu requested nodes available";
        t.remedy = "lower-cpu-demand:" + orig;
      } else if (has("serviceaccount")) {
        t.symptom = svc_ref + " phase=Pending logs serviceaccount not found pod blocked";
        t.remedy = "";
      } else {
        // env.<NAME> removal or another field-level fault
        std::string var, value;
        for (const auto& [path, _] : params) {
          if (path.rfind("env.", 0) == 0) {
            var = path.substr(4);
            value = fixture_string(fixture, target, path, "restored");
          }
        }
        if (!var.empty()) {
          t.symptom = svc_ref + " phase=CrashLoop logs FATAL missing required env " + var +
                      " required env var unset restarts climbing";
          t.remedy = "fix-env-var:" + var + "=" + value;
        } else {
          t.symptom = svc_ref + " degraded";
        }
      }
      break;
    }
  }
  return t;
}

// Lexically-near sibling with the wrong mechanism. The canonical case is the
// memory-OOM precedent pool sitting next to a CPU-throttling fault: same
// category, same resource-limit vocabulary, wrong fix.
CorpusTemplate misaligned_template(const scenario::ScenarioSpec& spec,
                                   const sim::ClusterState& fixture) {
  CorpusTemplate t;
  t.category = spec.ground_truth.primary_category;
  auto svc = runner::affected_deployment(spec, fixture);
  std::string svc_ref = "deployment " + svc.ns + "/" + svc.name;
  bool cpu_family = spec.injector.params.count("cpu_limit_millicores") > 0;
  if (cpu_family) {
    t.symptom = svc_ref + " phase=Running degraded logs container resource limit " +
                "misconfigured memory working set over limit OOMKilled restarts latency " +
                "elevated p99 high";
    t.remedy = "raise-memory-limit";
    t.actions = {"get-resource", "read-logs", "patch-deployment"};
  } else {
    auto aligned = aligned_template(spec, fixture);
    t.symptom = aligned.symptom + " transient mitigated";
    t.remedy = "restart";
    t.actions = {"get-resource", "list-pods", "restart"};
  }
  return t;
}

}  // namespace

void seed_corpus(experience::Store& store, CorpusProfile profile,
                 const scenario::ScenarioSpec& spec, const sim::ClusterState& fixture, int size,
                 std::uint64_t seed) {
  if (size <= 0) return;
  experience::TokenHashEmbedder embedder(store.dimension());
  auto aligned = aligned_template(spec, fixture);
  auto misaligned = misaligned_template(spec, fixture);
  Rng rng(StableHash{}.mix(seed).mix(spec.id).mix(profile_to_string(profile)).digest());

  for (int i = 0; i < size; ++i) {
    bool use_misaligned = profile == CorpusProfile::Misaligned ||
                          (profile == CorpusProfile::Mixed && i % 2 == 1);
    const auto& t = use_misaligned ? misaligned : aligned;

    experience::Postmortem pm;
    pm.id = "pm-" + spec.id + "-" + profile_to_string(profile) + "-" + std::to_string(i) + "-" +
            hex16(seed).substr(8);
    pm.scenario_id = spec.id;
    pm.created_tick = 0;
    pm.primary_category = t.category;
    pm.secondary_categories = {};
    std::ostringstream narrative;
    narrative << "incident case-" << i << ": " << t.symptom
              << " metrics error_rate p99_latency_ms availability; diagnosed " << t.category
              << "; resolved";
    if (!t.remedy.empty()) narrative << "; remedy=" << t.remedy;
    pm.narrative = narrative.str();
    pm.actions_taken = t.actions;
    pm.outcome = experience::Outcome::Resolved;
    pm.arm = "corpus";
    pm.run_seed = static_cast<std::int64_t>(rng.next_u64());
    pm.embedding = embedder.embed(experience::embedding_text(pm));
    store.store_postmortem(pm);
  }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::vector<double> composites_of(const std::vector<runner::ManifestRow>& rows,
                                  const std::string& scenario_id, const std::string& arm_prefix) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.framework_error) continue;
    if (!scenario_id.empty() && r.scenario != scenario_id) continue;
    if (r.arm == arm_prefix || r.arm.rfind(arm_prefix + "-", 0) == 0) out.push_back(r.composite);
  }
  return out;
}

stats::WelchResult scenario_welch(const std::vector<runner::ManifestRow>& rows,
                                  const std::string& scenario_id,
                                  const std::string& treatment_arm,
                                  const std::string& control_arm) {
  auto a = composites_of(rows, scenario_id, treatment_arm);
  auto b = composites_of(rows, scenario_id, control_arm);
  return stats::welch_t(stats::summarize(a), stats::summarize(b));
}

namespace {

std::string fmt(double v, const char* f) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string sig_label(const stats::WelchResult& r) {
  if (!r.significant) return "ns";
  return r.p_two_tailed < 0.01 ? "p<0.01" : "p<0.05";
}

void render_row(std::ostringstream& os, const std::string& label,
                const stats::SampleSummary& a, const stats::SampleSummary& b,
                const stats::WelchResult& w) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-44s %3d %7.3f %7.3f %3d %7.3f %7.3f %+8.3f %+7.2f %7.4f  %s\n", label.c_str(),
                a.n, a.mean, a.sd, b.n, b.mean, b.sd, w.delta, w.t, w.p_two_tailed,
                sig_label(w).c_str());
  os << buf;
}

}  // namespace

std::string render_comparison_report(const std::vector<runner::ManifestRow>& rows,
                                     const std::string& treatment_arm,
                                     const std::string& control_arm) {
  std::ostringstream os;
  std::set<std::string> scenario_ids;
  int framework_errors = 0;
  for (const auto& r : rows) {
    if (r.framework_error) framework_errors += 1;
    else scenario_ids.insert(r.scenario);
  }
  char header[256];
  std::snprintf(header, sizeof(header), "%-44s %3s %7s %7s %3s %7s %7s %8s %7s %7s  %s\n",
                "scenario", "nT", "muT", "sdT", "nC", "muC", "sdC", "delta", "t", "p", "sig");
  os << header;

  std::vector<stats::WelchResult> per_scenario;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pooled_values;
  for (const auto& id : scenario_ids) {
    auto a = composites_of(rows, id, treatment_arm);
    auto b = composites_of(rows, id, control_arm);
    if (a.empty() || b.empty()) continue;
    auto sa = stats::summarize(a);
    auto sb = stats::summarize(b);
    auto w = stats::welch_t(sa, sb);
    render_row(os, id, sa, sb, w);
    per_scenario.push_back(w);
    pooled_values.emplace_back(a, b);
  }
  if (!pooled_values.empty()) {
    std::vector<double> a, b;
    for (auto& [va, vb] : pooled_values) {
      a.insert(a.end(), va.begin(), va.end());
      b.insert(b.end(), vb.begin(), vb.end());
    }
    auto sa = stats::summarize(a);
    auto sb = stats::summarize(b);
    auto w = stats::welch_t(sa, sb);
    render_row(os, "POOLED", sa, sb, w);
    if (per_scenario.size() == 3) {
      auto decision = stats::decide(per_scenario, w);
      os << "decision: " << stats::verdict_to_string(decision.verdict) << "\n";
    }
  }
  os << "substrate-health: framework-error rows = " << framework_errors << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Packaged experiments
// ---------------------------------------------------------------------------

const std::vector<std::string>& packaged_names() {
  static const std::vector<std::string> kNames = {"falsification", "density-sweep", "n40-rerun",
                                                  "bias-audit-demo", "small-sample-demo"};
  return kNames;
}

namespace {

runner::ArmConfig tei_arm(const std::string& name, std::optional<int> pool_cap) {
  runner::ArmConfig arm;
  arm.name = name;
  arm.retrieval.embedder = experience::EmbedderKind::External;
  arm.retrieval.pool_cap = pool_cap;
  return arm;
}

runner::ArmConfig control_arm(const std::string& name, std::optional<int> pool_cap) {
  runner::ArmConfig arm;
  arm.name = name;
  arm.retrieval.embedder = experience::EmbedderKind::Deterministic;
  arm.retrieval.pool_cap = pool_cap;
  return arm;
}

runner::RunnerConfig runner_config(const LoadedLibrary& lib) {
  runner::RunnerConfig cfg;
  cfg.fixture = lib.fixture;
  cfg.vocab = &lib.vocab;
  return cfg;
}

GridExperiment falsification_grid(int reps, std::uint64_t seed) {
  GridExperiment g;
  g.plan.name = "falsification";
  g.plan.scenarios = {"secret-missing-key-advocate", "cpu-limit-throttling-advocate",
                      "readiness-probe-misconfigured-advocate"};
  g.plan.arms = {tei_arm("tei", std::nullopt), control_arm("control", std::nullopt)};
  g.plan.reps = reps;
  g.plan.base_seed = seed;
  g.plan.agent = "imitator";
  g.corpus = {{"secret-missing-key-advocate", CorpusProfile::Aligned, 30},
              {"cpu-limit-throttling-advocate", CorpusProfile::Misaligned, 30},
              {"readiness-probe-misconfigured-advocate", CorpusProfile::Mixed, 12}};
  return g;
}

GridExperiment density_sweep_grid(int reps, std::uint64_t seed) {
  GridExperiment g;
  g.plan.name = "density-sweep";
  g.plan.scenarios = {"secret-missing-key-advocate", "liveness-probe-always-fails-advocate",
                      "cpu-limit-throttling-advocate"};
  g.plan.arms = {tei_arm("tei-pool5", 5),    control_arm("control-pool5", 5),
                 tei_arm("tei-pool15", 15),  control_arm("control-pool15", 15),
                 tei_arm("tei-full", std::nullopt), control_arm("control-full", std::nullopt)};
  g.plan.reps = reps;
  g.plan.base_seed = seed;
  g.plan.agent = "imitator";
  g.corpus = {{"secret-missing-key-advocate", CorpusProfile::Aligned, 30},
              {"liveness-probe-always-fails-advocate", CorpusProfile::Mixed, 16},
              {"cpu-limit-throttling-advocate", CorpusProfile::Misaligned, 30}};
  return g;
}

GridExperiment n40_grid(int reps, std::uint64_t seed) {
  GridExperiment g;
  g.plan.name = "n40-rerun";
  g.plan.scenarios = {"cpu-limit-throttling-advocate", "replicas-zero-advocate"};
  g.plan.arms = {tei_arm("tei", std::nullopt), control_arm("control", std::nullopt)};
  g.plan.reps = reps;
  g.plan.base_seed = seed;
  g.plan.agent = "imitator";
  g.corpus = {{"cpu-limit-throttling-advocate", CorpusProfile::Misaligned, 30},
              {"replicas-zero-advocate", CorpusProfile::Aligned, 20}};
  return g;
}

}  // namespace

PackagedResult run_grid_experiment(const GridExperiment& grid, const LoadedLibrary& lib,
                                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto store_path = out_dir + "/" + grid.plan.name + "-store.jsonl";
  auto manifest_path = out_dir + "/" + grid.plan.name + "-manifest.csv";
  auto store = experience::Store::open(store_path);
  if (store.size() == 0)
    for (const auto& seed_spec : grid.corpus)
      seed_corpus(store, seed_spec.profile, lib.scenarios.at(seed_spec.scenario), lib.fixture,
                  seed_spec.size, grid.plan.base_seed);

  auto cfg = runner_config(lib);
  auto factory = runner::make_agent_factory(grid.plan.agent, lib.fixture, grid.noisy_p_wrong,
                                            grid.imitator_p_slip);
  runner::ManifestWriter manifest(manifest_path);
  auto result = runner::run_experiment(grid.plan, lib.scenarios, cfg, store, factory, manifest);

  PackagedResult out;
  out.records = std::move(result.records);
  out.manifest_paths = {manifest_path};
  auto rows = runner::parse_manifest(scenario::read_text_file(manifest_path));
  std::ostringstream report;
  report << "== " << grid.plan.name << " (reps=" << grid.plan.reps
         << ", seed=" << grid.plan.base_seed << ") ==\n";
  if (grid.plan.name == "density-sweep") {
    for (const auto& tier : {"pool5", "pool15", "full"}) {
      report << "-- density tier " << tier << " --\n";
      std::vector<runner::ManifestRow> tier_rows;
      for (const auto& r : rows)
        if (r.arm == std::string("tei-") + tier || r.arm == std::string("control-") + tier)
          tier_rows.push_back(r);
      report << render_comparison_report(tier_rows, std::string("tei-") + tier,
                                         std::string("control-") + tier);
    }
    report << "-- per-scenario pooled across tiers --\n";
    report << render_comparison_report(rows, "tei", "control");
  } else {
    report << render_comparison_report(rows, "tei", "control");
  }
  out.report = report.str();
  return out;
}

namespace {

PackagedResult run_bias_audit_demo(int reps, std::uint64_t seed, const LoadedLibrary& lib,
                                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  PackagedResult out;
  std::ostringstream report;
  report << "== bias-audit-demo (reps=" << reps << ", seed=" << seed << ") ==\n";

  struct Population {
    std::string name;
    std::map<std::string, double> p_wrong;  // per scenario
  };
  // Correlated: corpus coverage (secret only) coincides with the easier
  // scenario. Uncorrelated: same coverage, equal difficulty.
  std::vector<Population> populations = {
      {"correlated",
       {{"secret-missing-key-advocate", 0.1}, {"cpu-limit-throttling-advocate", 0.6}}},
      {"uncorrelated",
       {{"secret-missing-key-advocate", 0.3}, {"cpu-limit-throttling-advocate", 0.3}}},
  };

  for (const auto& pop : populations) {
    auto store_path = out_dir + "/bias-audit-" + pop.name + "-store.jsonl";
    auto manifest_path = out_dir + "/bias-audit-" + pop.name + "-manifest.csv";
    auto store = experience::Store::open(store_path);
    if (store.size() == 0)
      seed_corpus(store, CorpusProfile::Aligned, lib.scenarios.at("secret-missing-key-advocate"),
                  lib.fixture, 30, seed);

    runner::ExperimentPlan plan;
    plan.name = "bias-audit-" + pop.name;
    plan.scenarios = {"secret-missing-key-advocate", "cpu-limit-throttling-advocate"};
    plan.arms = {tei_arm("tei", std::nullopt), control_arm("control", std::nullopt)};
    plan.reps = reps;
    plan.base_seed = seed;
    plan.agent = "noisy-oracle";

    const auto& fixture = lib.fixture;
    auto p_map = pop.p_wrong;
    runner::AgentFactory factory = [&fixture, p_map](const scenario::ScenarioSpec& spec,
                                                     std::uint64_t run_seed) {
      return std::make_unique<agent::NoisyOracleAgent>(
          spec.ground_truth, runner::oracle_probes(spec, fixture),
          runner::oracle_fix(spec, fixture), p_map.at(spec.id), run_seed);
    };

    auto cfg = runner_config(lib);
    runner::ManifestWriter manifest(manifest_path);
    auto result = runner::run_experiment(plan, lib.scenarios, cfg, store, factory, manifest);
    out.records.insert(out.records.end(), result.records.begin(), result.records.end());
    out.manifest_paths.push_back(manifest_path);

    auto rows = runner::parse_manifest(scenario::read_text_file(manifest_path));
    std::vector<stats::AuditRow> audit_rows;
    for (const auto& r : rows)
      audit_rows.push_back({r.arm, r.retrieval_used, r.framework_error, r.composite});
    auto audit = stats::bias_audit(audit_rows);
    report << "-- population " << pop.name << " --\n";
    auto fmt_opt = [](const std::optional<double>& v) {
      return v ? fmt(*v, "%+.4f") : std::string("absent");
    };
    report << "observational delta (used vs unused, treatment arm): "
           << fmt_opt(audit.observational_delta) << "\n";
    report << "controlled delta (treatment vs control):             "
           << fmt_opt(audit.controlled_delta) << "\n";
    report << "gap (observational - controlled):                    " << fmt_opt(audit.gap);
    if (audit.gap_se) report << "  (se " << fmt(*audit.gap_se, "%.4f") << ")";
    report << "\n";
  }
  out.report = report.str();
  return out;
}

PackagedResult run_small_sample_demo(std::uint64_t seed) {
  // Synthetic sigma ~= 0.12 score population, the noise level the four-axis
  // composite shows per scenario.
  constexpr int kPopulation = 500;
  Rng rng(seed == 0 ? 7 : seed);
  std::vector<double> values;
  values.reserve(kPopulation);
  while (static_cast<int>(values.size()) < kPopulation) {
    double u1 = rng.next_unit();
    double u2 = rng.next_unit();
    if (u1 <= 0.0) continue;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    double v = 0.70 + 0.12 * z;
    values.push_back(std::min(1.0, std::max(0.0, v)));
  }
  auto spread = stats::small_sample_report(values, {3, 5, 10, 20}, 2000, seed + 1);
  PackagedResult out;
  std::ostringstream report;
  report << "== small-sample-demo (population n=" << kPopulation
         << ", sd=" << fmt(stats::summarize(values).sd, "%.4f") << ") ==\n";
  report << "subsample_size  se_of_mean\n";
  for (const auto& s : spread) {
    char line[64];
    std::snprintf(line, sizeof(line), "%14d  %.4f\n", s.subsample_size, s.se_of_mean);
    report << line;
  }
  out.report = report.str();
  return out;
}

GridExperiment parse_plan_document(const std::string& doc) {
  YAML::Node root;
  try {
    root = YAML::Load(doc);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Syntax, std::string("plan yaml error: ") + e.what());
  }
  GridExperiment g;
  if (!root["name"] || !root["agent"] || !root["scenarios"] || !root["arms"])
    throw Error(ErrorKind::BadPlan, "plan needs name, agent, scenarios, arms");
  g.plan.name = root["name"].as<std::string>();
  g.plan.agent = root["agent"].as<std::string>();
  for (const auto& s : root["scenarios"]) g.plan.scenarios.push_back(s.as<std::string>());
  if (root["reps"]) g.plan.reps = root["reps"].as<int>();
  if (root["base_seed"]) g.plan.base_seed = root["base_seed"].as<std::uint64_t>();
  if (root["imitator_p_slip"]) g.imitator_p_slip = root["imitator_p_slip"].as<double>();
  if (root["noisy_p_wrong"]) g.noisy_p_wrong = root["noisy_p_wrong"].as<double>();
  for (const auto& a : root["arms"]) {
    runner::ArmConfig arm;
    arm.name = a["name"].as<std::string>();
    std::string embedder = a["embedder"] ? a["embedder"].as<std::string>() : "external";
    if (embedder == "deterministic")
      arm.retrieval.embedder = experience::EmbedderKind::Deterministic;
    else if (embedder == "external")
      arm.retrieval.embedder = experience::EmbedderKind::External;
    else
      throw Error(ErrorKind::BadPlan, "arm embedder must be deterministic|external");
    if (a["max_distance"]) arm.retrieval.max_distance = a["max_distance"].as<double>();
    if (a["k"]) arm.retrieval.k = a["k"].as<int>();
    if (a["pool_cap"]) {
      auto v = a["pool_cap"].as<std::string>();
      if (v != "unlimited") arm.retrieval.pool_cap = std::stoi(v);
    }
    g.plan.arms.push_back(std::move(arm));
  }
  for (const auto& c : root["corpus"]) {
    CorpusSeedSpec spec;
    spec.scenario = c["scenario"].as<std::string>();
    auto profile = c["profile"].as<std::string>();
    if (profile == "aligned") spec.profile = CorpusProfile::Aligned;
    else if (profile == "misaligned") spec.profile = CorpusProfile::Misaligned;
    else if (profile == "mixed") spec.profile = CorpusProfile::Mixed;
    else throw Error(ErrorKind::BadPlan, "corpus profile must be aligned|misaligned|mixed");
    spec.size = c["size"].as<int>();
    g.corpus.push_back(spec);
  }
  runner::validate_plan(g.plan);
  return g;
}

}  // namespace

PackagedResult run_packaged(const std::string& name, int reps, std::uint64_t seed,
                            const DataPaths& paths, const std::string& out_dir) {
  if (name == "small-sample-demo") return run_small_sample_demo(seed);
  auto lib = load_library(paths);
  if (name == "falsification")
    return run_grid_experiment(falsification_grid(reps, seed), lib, out_dir);
  if (name == "density-sweep")
    return run_grid_experiment(density_sweep_grid(reps, seed), lib, out_dir);
  if (name == "n40-rerun") return run_grid_experiment(n40_grid(reps, seed), lib, out_dir);
  if (name == "bias-audit-demo") return run_bias_audit_demo(reps, seed, lib, out_dir);
  throw Error(ErrorKind::BadPlan, "unknown packaged experiment: " + name);
}

GridExperiment load_plan_file(const std::string& path) {
  auto doc = scenario::read_text_file(path);
  return parse_plan_document(doc);
}

}  // namespace breakage::experiments
