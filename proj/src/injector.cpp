// SPDX-License-Identifier: Apache-2.0

#include "breakage/injector.hpp"

#include <cstdio>

namespace breakage::injector {

namespace {

using scenario::InjectorSpec;
using scenario::InjectorType;
using sim::ResourceKind;

Value param(const InjectorSpec& spec, const std::string& name) {
  auto it = spec.params.find(name);
  if (it == spec.params.end())
    throw Error(ErrorKind::Schema, "injector param '" + name + "' missing");
  return it->second;
}

std::string param_string(const InjectorSpec& spec, const std::string& name) {
  auto v = param(spec, name);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw Error(ErrorKind::Schema, "injector param '" + name + "' must be a string");
}

void require_target_kind(const InjectorSpec& spec, ResourceKind kind) {
  if (spec.target.kind != kind)
    throw Error(ErrorKind::Schema, "injector " + injector_type_to_string(spec.type) +
                                       " cannot target " + spec.target.str());
}

void require_target_exists(const sim::ClusterState& state, const InjectorSpec& spec) {
  if (!state.resources.count(spec.target))
    throw Error(ErrorKind::UnknownKey, "injection target absent: " + spec.target.str());
}

// Builds the reverse patch for the fields about to be written.
FieldPatch reverse_of(const sim::ClusterState& state, const sim::ResourceKey& key,
                      const FieldPatch& forward) {
  FieldPatch reverse;
  for (const auto& [path, _] : forward) {
    auto prior = sim::read_field(state, key, path);
    reverse[path] = prior ? *prior : Value{std::monostate{}};
  }
  return reverse;
}

InjectionResult apply_field_fault(const sim::ClusterState& state, const InjectorSpec& spec,
                                  const FieldPatch& forward) {
  InjectionResult result{state, {}};
  result.handle.applied_at_tick = state.clock.tick;
  result.handle.undo.key = spec.target;
  result.handle.undo.reverse_fields = reverse_of(state, spec.target, forward);
  result.state = sim::apply_mutation(state, spec.target, forward);
  result.handle.status = HandleStatus::Active;
  return result;
}

FieldPatch keyed_data_patch(const InjectorSpec& spec) {
  std::string op = param_string(spec, "op");
  std::string key = param_string(spec, "key");
  FieldPatch patch;
  if (op == "remove-key") {
    patch["data." + key] = std::monostate{};
  } else if (op == "set-key") {
    patch["data." + key] = param_string(spec, "value");
  } else {
    throw Error(ErrorKind::Schema, "op must be set-key or remove-key, got " + op);
  }
  return patch;
}

InjectionResult dispatch(const sim::ClusterState& state, const InjectorSpec& spec) {
  switch (spec.type) {
    case InjectorType::DeploymentPatch: {
      require_target_kind(spec, ResourceKind::Deployment);
      require_target_exists(state, spec);
      if (spec.params.empty())
        throw Error(ErrorKind::Schema, "deployment-patch needs at least one field");
      return apply_field_fault(state, spec, FieldPatch(spec.params.begin(), spec.params.end()));
    }
    case InjectorType::SecretContent: {
      require_target_kind(spec, ResourceKind::Secret);
      require_target_exists(state, spec);
      return apply_field_fault(state, spec, keyed_data_patch(spec));
    }
    case InjectorType::ConfigMapPatch: {
      require_target_kind(spec, ResourceKind::ConfigMap);
      require_target_exists(state, spec);
      return apply_field_fault(state, spec, keyed_data_patch(spec));
    }
    case InjectorType::FlagdFlag: {
      require_target_kind(spec, ResourceKind::FeatureFlag);
      require_target_exists(state, spec);
      auto v = param(spec, "enabled");
      if (!std::holds_alternative<bool>(v))
        throw Error(ErrorKind::Schema, "flagd-flag param 'enabled' must be a bool");
      return apply_field_fault(state, spec, {{"enabled", v}});
    }
    case InjectorType::NetworkPolicy: {
      require_target_kind(spec, ResourceKind::NetworkPolicy);
      std::string deny = param_string(spec, "deny");
      const bool exists = state.resources.count(spec.target) > 0;
      InjectionResult result{state, {}};
      result.handle.applied_at_tick = state.clock.tick;
      result.handle.undo.key = spec.target;
      FieldPatch forward{{"denied_edges", deny}};
      if (exists) {
        result.handle.undo.reverse_fields = reverse_of(state, spec.target, forward);
      } else {
        result.handle.undo.remove_resource = true;
      }
      result.state = sim::apply_mutation(state, spec.target, forward, /*create=*/!exists);
      result.handle.status = HandleStatus::Active;
      return result;
    }
    case InjectorType::PodEvict: {
      require_target_kind(spec, ResourceKind::Deployment);
      require_target_exists(state, spec);
      int dip = 10;
      if (auto it = spec.params.find("dip_ticks"); it != spec.params.end()) {
        if (const auto* i = std::get_if<std::int64_t>(&it->second))
          dip = static_cast<int>(*i);
        else
          throw Error(ErrorKind::Schema, "dip_ticks must be an integer");
      }
      InjectionResult result{state, {}};
      result.handle.applied_at_tick = state.clock.tick;
      result.handle.undo.key = spec.target;
      result.handle.undo.clear_eviction = true;
      result.state = sim::evict_pods(state, spec.target, dip);
      result.handle.status = HandleStatus::Active;
      return result;
    }
  }
  throw Error(ErrorKind::Schema, "unhandled injector type");
}

}  // namespace

InjectionResult inject(const sim::ClusterState& state, const scenario::InjectorSpec& spec) {
  try {
    return dispatch(state, spec);
  } catch (const Error& e) {
    InjectionResult failed{state, {}};
    failed.handle.status = HandleStatus::Failed;
    failed.handle.failure = e.what();
    return failed;
  }
}

sim::ClusterState undo(const sim::ClusterState& state, InjectionHandle& handle) {
  if (handle.status == HandleStatus::Undone) {
    std::fprintf(stderr, "warning: injection undo called twice; ignoring\n");
    return state;
  }
  if (handle.status == HandleStatus::Failed) return state;

  sim::ClusterState next = state;
  const auto& action = handle.undo;
  if (action.remove_resource) {
    next.resources.erase(action.key);
  } else if (action.clear_eviction) {
    next = sim::restart_deployment(next, action.key);
  } else {
    next = sim::apply_mutation(next, action.key, action.reverse_fields, /*create=*/true);
  }
  handle.status = HandleStatus::Undone;
  return next;
}

}  // namespace breakage::injector
