// SPDX-License-Identifier: Apache-2.0

#include "breakage/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace breakage::scenario {

std::string comparator_to_string(Comparator c) {
  switch (c) {
    case Comparator::Eq: return "eq";
    case Comparator::Ne: return "ne";
    case Comparator::Lt: return "lt";
    case Comparator::Le: return "le";
    case Comparator::Gt: return "gt";
    case Comparator::Ge: return "ge";
    case Comparator::Exists: return "exists";
    case Comparator::Absent: return "absent";
  }
  return "?";
}

std::optional<Comparator> comparator_from_string(const std::string& s) {
  if (s == "eq") return Comparator::Eq;
  if (s == "ne") return Comparator::Ne;
  if (s == "lt") return Comparator::Lt;
  if (s == "le") return Comparator::Le;
  if (s == "gt") return Comparator::Gt;
  if (s == "ge") return Comparator::Ge;
  if (s == "exists") return Comparator::Exists;
  if (s == "absent") return Comparator::Absent;
  return std::nullopt;
}

std::string injector_type_to_string(InjectorType t) {
  switch (t) {
    case InjectorType::DeploymentPatch: return "deployment-patch";
    case InjectorType::SecretContent: return "secret-content";
    case InjectorType::ConfigMapPatch: return "configmap-patch";
    case InjectorType::FlagdFlag: return "flagd-flag";
    case InjectorType::NetworkPolicy: return "network-policy";
    case InjectorType::PodEvict: return "pod-evict";
  }
  return "?";
}

std::optional<InjectorType> injector_type_from_string(const std::string& s) {
  if (s == "deployment-patch") return InjectorType::DeploymentPatch;
  if (s == "secret-content") return InjectorType::SecretContent;
  if (s == "configmap-patch") return InjectorType::ConfigMapPatch;
  if (s == "flagd-flag") return InjectorType::FlagdFlag;
  if (s == "network-policy") return InjectorType::NetworkPolicy;
  if (s == "pod-evict") return InjectorType::PodEvict;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Condition grammar
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) tokens.push_back(tok);
  return tokens;
}

sim::ResourceKey parse_resource_ref(const std::string& ref) {
  auto first = ref.find('/');
  auto second = ref.find('/', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw Error(ErrorKind::Syntax, "resource ref needs <kind>/<namespace>/<name>: " + ref);
  auto kind = sim::kind_from_string(ref.substr(0, first));
  if (!kind) throw Error(ErrorKind::Syntax, "unknown resource kind in: " + ref);
  return {*kind, ref.substr(first + 1, second - first - 1), ref.substr(second + 1)};
}

}  // namespace

Condition parse_condition(const std::string& line) {
  auto tokens = tokenize(line);
  if (tokens.size() < 2) throw Error(ErrorKind::Syntax, "condition too short: " + line);

  Condition c;
  const std::string& src = tokens[0];
  if (src.rfind("k8s:", 0) == 0) {
    std::string body = src.substr(4);
    auto colon = body.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorKind::Syntax, "k8s source needs :<field_path>: " + line);
    K8sSource s;
    s.key = parse_resource_ref(body.substr(0, colon));
    s.field_path = body.substr(colon + 1);
    if (s.field_path.empty()) throw Error(ErrorKind::Syntax, "empty field path: " + line);
    c.source = s;
  } else if (src.rfind("metric:", 0) == 0) {
    MetricSource s{src.substr(7)};
    if (s.name.empty()) throw Error(ErrorKind::Syntax, "empty metric name: " + line);
    c.source = s;
  } else {
    throw Error(ErrorKind::Syntax, "condition source must be k8s: or metric:, got: " + line);
  }

  auto cmp = comparator_from_string(tokens[1]);
  if (!cmp) throw Error(ErrorKind::Schema, "bad comparator '" + tokens[1] + "' in: " + line);
  c.comparator = *cmp;

  size_t next = 2;
  const bool takes_value = c.comparator != Comparator::Exists && c.comparator != Comparator::Absent;
  if (takes_value) {
    if (tokens.size() < 3)
      throw Error(ErrorKind::Schema, "comparator " + tokens[1] + " needs a value: " + line);
    c.value = parse_scalar(tokens[2]);
    next = 3;
  }

  for (; next < tokens.size(); ++next) {
    const std::string& tok = tokens[next];
    if (tok.rfind("sustained_for_s=", 0) == 0) {
      c.sustained_for_s = static_cast<int>(std::stol(tok.substr(16)));
      if (c.sustained_for_s < 0) throw Error(ErrorKind::Schema, "negative window: " + line);
    } else if (tok == "skip_if_unevaluable") {
      c.skip_if_unevaluable = true;
    } else if (!takes_value) {
      throw Error(ErrorKind::Schema,
                  "exists/absent carry no value, got '" + tok + "' in: " + line);
    } else {
      throw Error(ErrorKind::Schema, "unexpected token '" + tok + "' in: " + line);
    }
  }
  return c;
}

std::string serialize_condition(const Condition& c) {
  std::ostringstream os;
  if (const auto* k = std::get_if<K8sSource>(&c.source)) {
    os << "k8s:" << k->key.str() << ":" << k->field_path;
  } else {
    os << "metric:" << std::get<MetricSource>(c.source).name;
  }
  os << " " << comparator_to_string(c.comparator);
  if (c.value) os << " " << value_to_string(*c.value);
  if (c.sustained_for_s > 0) os << " sustained_for_s=" << c.sustained_for_s;
  if (c.skip_if_unevaluable) os << " skip_if_unevaluable";
  return os.str();
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<VocabularyEntry> entries) : entries_(std::move(entries)) {
  int reserved = 0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].id, i).second)
      throw Error(ErrorKind::DuplicateId, "duplicate vocabulary id: " + entries_[i].id);
    if (entries_[i].id == kFrameworkErrorCategory) reserved++;
  }
  if (reserved != 1)
    throw Error(ErrorKind::Vocabulary, "vocabulary must reserve exactly one framework-error entry");
}

bool Vocabulary::contains(const CategoryId& id) const { return index_.count(id) > 0; }

bool Vocabulary::related(const CategoryId& a, const CategoryId& b) const {
  auto linked = [&](const CategoryId& x, const CategoryId& y) {
    auto it = index_.find(x);
    if (it == index_.end()) return false;
    const auto& rel = entries_[it->second].related;
    return std::find(rel.begin(), rel.end(), y) != rel.end();
  };
  return linked(a, b) || linked(b, a);
}

std::string Vocabulary::render() const {
  std::ostringstream os;
  for (const auto& e : entries_) os << "- " << e.id << ": " << e.description << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// YAML helpers (strict: unknown fields rejected)
// ---------------------------------------------------------------------------

namespace {

void require_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                  const std::string& context) {
  if (!node.IsMap()) throw Error(ErrorKind::Schema, context + " must be a map");
  for (const auto& kv : node) {
    auto key = kv.first.as<std::string>();
    if (!allowed.count(key))
      throw Error(ErrorKind::Schema, "unknown field '" + key + "' in " + context);
  }
}

YAML::Node require(const YAML::Node& node, const std::string& key, const std::string& context) {
  auto child = node[key];
  if (!child) throw Error(ErrorKind::Schema, "missing field '" + key + "' in " + context);
  return child;
}

Value yaml_scalar_to_value(const YAML::Node& node) {
  if (!node.IsScalar()) throw Error(ErrorKind::Schema, "expected a scalar value");
  // Respect explicit quoting: quoted scalars stay strings.
  if (node.Tag() == "!") return node.as<std::string>();
  return parse_scalar(node.as<std::string>());
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& context) {
  std::vector<std::string> out;
  if (!node) return out;
  if (!node.IsSequence()) throw Error(ErrorKind::Schema, context + " must be a list");
  for (const auto& item : node) out.push_back(item.as<std::string>());
  return out;
}

YAML::Node parse_yaml(const std::string& document) {
  try {
    return YAML::Load(document);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Syntax, std::string("yaml syntax error: ") + e.what());
  }
}

}  // namespace

Vocabulary load_vocabulary(const std::string& document) {
  auto root = parse_yaml(document);
  require_keys(root, {"categories"}, "vocabulary");
  auto cats = require(root, "categories", "vocabulary");
  if (!cats.IsSequence()) throw Error(ErrorKind::Schema, "categories must be a list");
  std::vector<VocabularyEntry> entries;
  for (const auto& node : cats) {
    require_keys(node, {"id", "description", "example_incidents", "related"}, "vocabulary entry");
    VocabularyEntry e;
    e.id = require(node, "id", "vocabulary entry").as<std::string>();
    e.description = require(node, "description", e.id).as<std::string>();
    e.example_incidents = string_list(node["example_incidents"], e.id + ".example_incidents");
    e.related = string_list(node["related"], e.id + ".related");
    entries.push_back(std::move(e));
  }
  Vocabulary vocab(std::move(entries));
  if (!vocab.contains(kFrameworkErrorCategory))
    throw Error(ErrorKind::Vocabulary, "vocabulary lacks the reserved framework-error entry");
  if (static_cast<int>(vocab.entries().size()) != kVocabularySize)
    throw Error(ErrorKind::Vocabulary,
                "vocabulary must have exactly " + std::to_string(kVocabularySize) +
                    " entries, got " + std::to_string(vocab.entries().size()));
  for (const auto& e : vocab.entries())
    for (const auto& rel : e.related)
      if (!vocab.contains(rel))
        throw Error(ErrorKind::Vocabulary, "related category unknown: " + rel + " (in " + e.id +
                                               ")");
  return vocab;
}

ScenarioSpec parse_scenario(const std::string& document, const Vocabulary& vocab) {
  auto root = parse_yaml(document);
  require_keys(root,
               {"id", "injector", "fixed_when", "regressed_when", "ground_truth",
                "expected_actions", "time_budget_s", "metric_weights"},
               "scenario");
  ScenarioSpec spec;
  spec.id = require(root, "id", "scenario").as<std::string>();

  auto inj = require(root, "injector", spec.id);
  require_keys(inj, {"type", "target", "params"}, spec.id + ".injector");
  auto type = injector_type_from_string(require(inj, "type", "injector").as<std::string>());
  if (!type) throw Error(ErrorKind::Schema, "unknown injector type in " + spec.id);
  spec.injector.type = *type;
  spec.injector.target = parse_resource_ref(require(inj, "target", "injector").as<std::string>());
  if (auto params = inj["params"]) {
    if (!params.IsMap()) throw Error(ErrorKind::Schema, "injector params must be a map");
    for (const auto& kv : params)
      spec.injector.params[kv.first.as<std::string>()] = yaml_scalar_to_value(kv.second);
  }

  auto fixed = require(root, "fixed_when", spec.id);
  if (!fixed.IsSequence() || fixed.size() == 0)
    throw Error(ErrorKind::Schema, "fixed_when must be a non-empty list in " + spec.id);
  for (const auto& line : fixed) spec.fixed_when.push_back(parse_condition(line.as<std::string>()));
  if (auto regressed = root["regressed_when"])
    for (const auto& line : regressed)
      spec.regressed_when.push_back(parse_condition(line.as<std::string>()));

  auto gt = require(root, "ground_truth", spec.id);
  require_keys(gt, {"primary_category", "secondary_categories"}, spec.id + ".ground_truth");
  spec.ground_truth.primary_category =
      require(gt, "primary_category", "ground_truth").as<std::string>();
  spec.ground_truth.secondary_categories =
      string_list(gt["secondary_categories"], "secondary_categories");

  if (spec.ground_truth.primary_category == kFrameworkErrorCategory)
    throw Error(ErrorKind::Vocabulary,
                "framework-error is reserved and cannot be a ground truth in " + spec.id);
  if (!vocab.contains(spec.ground_truth.primary_category))
    throw Error(ErrorKind::Vocabulary,
                "unknown primary_category '" + spec.ground_truth.primary_category + "' in " +
                    spec.id);
  for (const auto& sec : spec.ground_truth.secondary_categories) {
    if (!vocab.contains(sec))
      throw Error(ErrorKind::Vocabulary, "unknown secondary category '" + sec + "' in " + spec.id);
    if (sec == spec.ground_truth.primary_category)
      throw Error(ErrorKind::Vocabulary, "primary repeated in secondaries in " + spec.id);
  }

  spec.expected_actions = string_list(root["expected_actions"], spec.id + ".expected_actions");
  if (auto budget = root["time_budget_s"]) {
    spec.time_budget_s = budget.as<int>();
    if (spec.time_budget_s <= 0)
      throw Error(ErrorKind::Schema, "time_budget_s must be positive in " + spec.id);
  }
  if (auto weights = root["metric_weights"]) {
    if (!weights.IsMap()) throw Error(ErrorKind::Schema, "metric_weights must be a map");
    for (const auto& kv : weights)
      spec.metric_weights[kv.first.as<std::string>()] = kv.second.as<double>();
  }
  return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << spec.id;
  out << YAML::Key << "injector" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "type" << YAML::Value << injector_type_to_string(spec.injector.type);
  out << YAML::Key << "target" << YAML::Value << spec.injector.target.str();
  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : spec.injector.params) {
    out << YAML::Key << k << YAML::Value;
    if (std::holds_alternative<std::string>(v))
      out << YAML::DoubleQuoted << std::get<std::string>(v);
    else
      out << value_to_string(v);
  }
  out << YAML::EndMap << YAML::EndMap;
  out << YAML::Key << "fixed_when" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : spec.fixed_when) out << serialize_condition(c);
  out << YAML::EndSeq;
  out << YAML::Key << "regressed_when" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : spec.regressed_when) out << serialize_condition(c);
  out << YAML::EndSeq;
  out << YAML::Key << "ground_truth" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "primary_category" << YAML::Value << spec.ground_truth.primary_category;
  out << YAML::Key << "secondary_categories" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : spec.ground_truth.secondary_categories) out << s;
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::Key << "expected_actions" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : spec.expected_actions) out << a;
  out << YAML::EndSeq;
  out << YAML::Key << "time_budget_s" << YAML::Value << spec.time_budget_s;
  if (!spec.metric_weights.empty()) {
    out << YAML::Key << "metric_weights" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : spec.metric_weights) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<ValidationFinding> validate_scenario(const ScenarioSpec& spec, const Vocabulary& vocab,
                                                 const sim::ClusterState& topology,
                                                 const std::vector<ToolName>& known_tools) {
  std::vector<ValidationFinding> findings;
  auto check_key = [&](const sim::ResourceKey& key, const std::string& where) {
    if (!topology.resources.count(key))
      findings.push_back({"dangling-ref", where + " names absent resource " + key.str()});
  };
  check_key(spec.injector.target, spec.id + ".injector.target");
  for (const auto* conds : {&spec.fixed_when, &spec.regressed_when})
    for (const auto& c : *conds)
      if (const auto* k = std::get_if<K8sSource>(&c.source))
        check_key(k->key, spec.id + " condition");
  for (const auto& tool : spec.expected_actions)
    if (std::find(known_tools.begin(), known_tools.end(), tool) == known_tools.end())
      findings.push_back({"unknown-tool", spec.id + " expects unknown tool " + tool});
  if (!vocab.contains(spec.ground_truth.primary_category))
    findings.push_back({"unknown-category", spec.ground_truth.primary_category});
  for (const auto& [name, w] : spec.metric_weights) {
    (void)w;
    check_key(sim::deployment_key(name), spec.id + ".metric_weights");
  }
  return findings;
}

// ---------------------------------------------------------------------------
// Fixture
// ---------------------------------------------------------------------------

namespace {

sim::ProbeSpec parse_probe(const YAML::Node& node, const std::string& context) {
  require_keys(node, {"path", "port", "healthy_paths"}, context);
  sim::ProbeSpec probe;
  probe.path = require(node, "path", context).as<std::string>();
  probe.port = require(node, "port", context).as<int>();
  if (probe.port < 1 || probe.port > 65535)
    throw Error(ErrorKind::Schema, context + ": probe port out of range");
  for (const auto& p : string_list(require(node, "healthy_paths", context), context))
    probe.healthy_paths.insert(p);
  if (probe.healthy_paths.empty())
    throw Error(ErrorKind::Schema, context + ": healthy_paths must be non-empty");
  return probe;
}

}  // namespace

sim::ClusterState load_fixture(const std::string& document) {
  auto root = parse_yaml(document);
  require_keys(root,
               {"namespace", "cluster", "deployments", "secrets", "configmaps", "serviceaccounts",
                "feature_flags", "network_policies"},
               "fixture");
  sim::ClusterState state;
  std::string ns = require(root, "namespace", "fixture").as<std::string>();

  if (auto cluster = root["cluster"]) {
    require_keys(cluster, {"node_capacity_millicores", "valid_images", "valid_entrypoints"},
                 "fixture.cluster");
    if (auto cap = cluster["node_capacity_millicores"])
      state.node_capacity_millicores = cap.as<int>();
    for (const auto& img : string_list(cluster["valid_images"], "valid_images"))
      state.valid_images.insert(img);
    for (const auto& cmd : string_list(cluster["valid_entrypoints"], "valid_entrypoints"))
      state.valid_entrypoints.insert(cmd);
  }

  for (const auto& node : root["deployments"]) {
    require_keys(node,
                 {"name", "replicas", "image", "command", "env", "cpu_limit_millicores",
                  "memory_limit_mib", "cpu_demand_millicores", "memory_working_set_mib",
                  "liveness_probe", "readiness_probe", "serviceaccount", "base_latency_ms",
                  "required_env", "depends_on"},
                 "deployment");
    std::string name = require(node, "name", "deployment").as<std::string>();
    sim::DeploymentSpec d;
    d.replicas_desired = require(node, "replicas", name).as<int>();
    d.image = require(node, "image", name).as<std::string>();
    d.command = string_list(node["command"], name + ".command");
    d.cpu_demand_millicores = require(node, "cpu_demand_millicores", name).as<int>();
    d.memory_working_set_mib = require(node, "memory_working_set_mib", name).as<int>();
    if (d.cpu_demand_millicores <= 0 || d.memory_working_set_mib <= 0)
      throw Error(ErrorKind::Schema, name + ": demand fields must be positive");
    if (auto v = node["cpu_limit_millicores"]) d.cpu_limit_millicores = v.as<int>();
    if (auto v = node["memory_limit_mib"]) d.memory_limit_mib = v.as<int>();
    if (auto v = node["base_latency_ms"]) d.base_latency_ms = v.as<double>();
    if (auto v = node["serviceaccount"]) d.serviceaccount = v.as<std::string>();
    if (auto v = node["liveness_probe"]) d.liveness_probe = parse_probe(v, name + ".liveness");
    if (auto v = node["readiness_probe"]) d.readiness_probe = parse_probe(v, name + ".readiness");
    d.required_env = string_list(node["required_env"], name + ".required_env");
    d.depends_on = string_list(node["depends_on"], name + ".depends_on");
    if (auto env = node["env"]) {
      for (const auto& kv : env) {
        auto var = kv.first.as<std::string>();
        const auto& src = kv.second;
        require_keys(src, {"literal", "secret", "configmap", "key"}, name + ".env." + var);
        sim::EnvSource e;
        if (auto lit = src["literal"]) {
          e.kind = sim::EnvSource::Kind::Literal;
          e.value = lit.as<std::string>();
        } else if (auto sec = src["secret"]) {
          e.kind = sim::EnvSource::Kind::SecretKeyRef;
          e.value = sec.as<std::string>();
          e.key = require(src, "key", name + ".env." + var).as<std::string>();
        } else if (auto cm = src["configmap"]) {
          e.kind = sim::EnvSource::Kind::ConfigMapKeyRef;
          e.value = cm.as<std::string>();
          e.key = require(src, "key", name + ".env." + var).as<std::string>();
        } else {
          throw Error(ErrorKind::Schema, name + ".env." + var + " needs literal/secret/configmap");
        }
        d.env[var] = e;
      }
    }
    state.resources[{sim::ResourceKind::Deployment, ns, name}] = d;
  }

  for (const auto& node : root["secrets"]) {
    require_keys(node, {"name", "data"}, "secret");
    sim::SecretSpec s;
    for (const auto& kv : require(node, "data", "secret"))
      s.data[kv.first.as<std::string>()] = kv.second.as<std::string>();
    state.resources[{sim::ResourceKind::Secret, ns, node["name"].as<std::string>()}] = s;
  }
  for (const auto& node : root["configmaps"]) {
    require_keys(node, {"name", "data"}, "configmap");
    sim::ConfigMapSpec c;
    for (const auto& kv : require(node, "data", "configmap"))
      c.data[kv.first.as<std::string>()] = kv.second.as<std::string>();
    state.resources[{sim::ResourceKind::ConfigMap, ns, node["name"].as<std::string>()}] = c;
  }
  for (const auto& name : string_list(root["serviceaccounts"], "serviceaccounts"))
    state.resources[{sim::ResourceKind::ServiceAccount, ns, name}] = sim::ServiceAccountSpec{};
  for (const auto& node : root["feature_flags"]) {
    require_keys(node, {"name", "target", "enabled", "error_rate_impact", "latency_impact_ms"},
                 "feature flag");
    sim::FeatureFlagSpec f;
    f.target = require(node, "target", "flag").as<std::string>();
    if (auto v = node["enabled"]) f.enabled = v.as<bool>();
    if (auto v = node["error_rate_impact"]) f.error_rate_impact = v.as<double>();
    if (auto v = node["latency_impact_ms"]) f.latency_impact_ms = v.as<double>();
    state.resources[{sim::ResourceKind::FeatureFlag, ns, node["name"].as<std::string>()}] = f;
  }
  for (const auto& node : root["network_policies"]) {
    require_keys(node, {"name", "denied_edges"}, "network policy");
    sim::NetworkPolicySpec np;
    for (const auto& e : string_list(node["denied_edges"], "denied_edges")) {
      auto arrow = e.find("->");
      if (arrow == std::string::npos)
        throw Error(ErrorKind::Schema, "denied edge needs from->to: " + e);
      np.denied_edges.push_back({e.substr(0, arrow), e.substr(arrow + 2)});
    }
    state.resources[{sim::ResourceKind::NetworkPolicy, ns, node["name"].as<std::string>()}] = np;
  }
  return state;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScenarioSpec load_scenario_file(const std::string& path, const Vocabulary& vocab) {
  try {
    return parse_scenario(read_text_file(path), vocab);
  } catch (const Error& e) {
    throw Error(e.kind, path + ": " + e.what());
  }
}

std::map<std::string, ScenarioSpec> load_scenario_dir(const std::string& dir,
                                                      const Vocabulary& vocab) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".yaml")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  std::map<std::string, ScenarioSpec> out;
  for (const auto& path : paths) {
    auto spec = load_scenario_file(path, vocab);
    if (!out.emplace(spec.id, spec).second)
      throw Error(ErrorKind::DuplicateId, "duplicate scenario id: " + spec.id);
  }
  return out;
}

}  // namespace breakage::scenario
