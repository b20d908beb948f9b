// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "breakage/core.hpp"
#include "breakage/sim.hpp"

namespace breakage::scenario {

using CategoryId = std::string;
using ToolName = std::string;

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge, Exists, Absent };

std::string comparator_to_string(Comparator c);
std::optional<Comparator> comparator_from_string(const std::string& s);

struct K8sSource {
  sim::ResourceKey key;
  std::string field_path;
  bool operator==(const K8sSource&) const = default;
};

struct MetricSource {
  std::string name;  // error_rate | p99_latency_ms | availability
  bool operator==(const MetricSource&) const = default;
};

// One detector condition. Single-line grammar (documented in the README):
//   k8s:<kind>/<namespace>/<name>:<field_path> <comparator> <value>
//       [sustained_for_s=<int>] [skip_if_unevaluable]
//   metric:<name> <comparator> <value> [sustained_for_s=<int>] [skip_if_unevaluable]
// exists/absent carry no value.
struct Condition {
  std::variant<K8sSource, MetricSource> source;
  Comparator comparator = Comparator::Eq;
  std::optional<Value> value;
  int sustained_for_s = 0;
  bool skip_if_unevaluable = false;

  bool operator==(const Condition&) const = default;
};

Condition parse_condition(const std::string& line);
std::string serialize_condition(const Condition& c);

struct GroundTruth {
  CategoryId primary_category;
  std::vector<CategoryId> secondary_categories;
  bool operator==(const GroundTruth&) const = default;
};

enum class InjectorType {
  DeploymentPatch,
  SecretContent,
  ConfigMapPatch,
  FlagdFlag,
  NetworkPolicy,
  PodEvict,
};

std::string injector_type_to_string(InjectorType t);
std::optional<InjectorType> injector_type_from_string(const std::string& s);

struct InjectorSpec {
  InjectorType type = InjectorType::DeploymentPatch;
  sim::ResourceKey target;
  std::map<std::string, Value> params;

  bool operator==(const InjectorSpec&) const = default;
};

struct ScenarioSpec {
  std::string id;
  InjectorSpec injector;
  std::vector<Condition> fixed_when;
  std::vector<Condition> regressed_when;
  GroundTruth ground_truth;
  std::vector<ToolName> expected_actions;
  int time_budget_s = 600;
  std::map<std::string, double> metric_weights;

  bool operator==(const ScenarioSpec&) const = default;
};

struct VocabularyEntry {
  CategoryId id;
  std::string description;
  std::vector<std::string> example_incidents;
  // Cause/effect pairing used for near-miss adjudication in the scorer.
  std::vector<CategoryId> related;
};

inline constexpr const char* kFrameworkErrorCategory = "framework-error";
inline constexpr int kVocabularySize = 24;

class Vocabulary {
 public:
  explicit Vocabulary(std::vector<VocabularyEntry> entries);

  bool contains(const CategoryId& id) const;
  // True when a and b are linked cause/effect categories (symmetric).
  bool related(const CategoryId& a, const CategoryId& b) const;
  const std::vector<VocabularyEntry>& entries() const { return entries_; }

  // Stable, ordered rendering for agent prompts.
  std::string render() const;

 private:
  std::vector<VocabularyEntry> entries_;
  std::map<CategoryId, size_t> index_;
};

ScenarioSpec parse_scenario(const std::string& document, const Vocabulary& vocab);
std::string serialize_scenario(const ScenarioSpec& spec);

Vocabulary load_vocabulary(const std::string& document);

struct ValidationFinding {
  std::string kind;  // "dangling-ref" | "unknown-tool"
  std::string detail;
};

std::vector<ValidationFinding> validate_scenario(const ScenarioSpec& spec, const Vocabulary& vocab,
                                                 const sim::ClusterState& topology,
                                                 const std::vector<ToolName>& known_tools);

// Baseline topology fixture, same document family as scenarios.
sim::ClusterState load_fixture(const std::string& document);

// File helpers.
std::string read_text_file(const std::string& path);
ScenarioSpec load_scenario_file(const std::string& path, const Vocabulary& vocab);

// Loads every *.yaml under dir (recursive), keyed by scenario id.
std::map<std::string, ScenarioSpec> load_scenario_dir(const std::string& dir,
                                                      const Vocabulary& vocab);

}  // namespace breakage::scenario
