#include "devsim/validator.hpp"

#include <algorithm>
#include <cmath>

namespace devsim {

namespace {

std::string child_path(std::string_view parent, std::string_view instance) {
  std::string out(parent);
  out += '.';
  out += instance;
  return out;
}

void check_disjoint_ports(const std::vector<Port>& inports, const std::vector<Port>& outports, std::string_view path,
                          std::vector<Violation>& out) {
  for (const auto& in : inports) {
    if (find_port(outports, in.name)) {
      out.push_back({RuleId::R2, std::string(path), "port `" + in.name + "` is declared both as inport and outport"});
    }
  }
}

// Port type at a coupling endpoint, or nullptr when the endpoint cannot be resolved.
const Port* endpoint(const CoupledModel& m, const PortRef& ref, bool source) {
  if (ref.instance.empty()) return find_port(source ? m.inports : m.outports, ref.port);
  const Submodel* sub = m.find_submodel(ref.instance);
  if (!sub || !sub->model) return nullptr;
  return find_port(source ? model_outports(*sub->model) : model_inports(*sub->model), ref.port);
}

void structure(const ModelPtr& model, const std::string& path, std::vector<std::string>& ancestors,
               std::vector<Violation>& out) {
  if (model.index() == 0) {
    auto v = validate_atomic_ports(*std::get<0>(model), path);
    out.insert(out.end(), v.begin(), v.end());
    return;
  }
  const CoupledModel& coupled = *std::get<1>(model);
  auto v = validate_coupled_level(coupled, path);
  out.insert(out.end(), v.begin(), v.end());

  ancestors.push_back(coupled.name);
  for (const auto& sub : coupled.submodels) {
    if (!sub.model) continue;
    const auto& name = model_name(*sub.model);
    if (name != coupled.name && std::find(ancestors.begin(), ancestors.end(), name) != ancestors.end()) {
      out.push_back({RuleId::R3, child_path(path, sub.instance),
                     "instance `" + sub.instance + "` contains its ancestor `" + name + "`"});
      continue;
    }
    if (name == coupled.name) continue;  // reported by validate_coupled_level
    structure(*sub.model, child_path(path, sub.instance), ancestors, out);
  }
  ancestors.pop_back();
}

void sort_violations(std::vector<Violation>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    if (a.location != b.location) return a.location < b.location;
    return a.rule < b.rule;
  });
}

bool constant_true(const std::optional<Expr>& condition, std::span<const double> params) {
  if (!condition) return true;
  auto v = fold_constant(*condition, params);
  return v && std::get<bool>(*v);
}

void behaviors(const ModelPtr& model, const std::string& path, std::vector<std::string>& ancestors,
               std::vector<Violation>& out) {
  if (model.index() == 0) {
    auto v = validate_behavior(std::get<0>(model)->behavior, path);
    out.insert(out.end(), v.begin(), v.end());
    return;
  }
  const CoupledModel& coupled = *std::get<1>(model);
  ancestors.push_back(coupled.name);
  for (const auto& sub : coupled.submodels) {
    if (!sub.model) continue;
    if (std::find(ancestors.begin(), ancestors.end(), model_name(*sub.model)) != ancestors.end()) continue;
    behaviors(*sub.model, child_path(path, sub.instance), ancestors, out);
  }
  ancestors.pop_back();
}

}  // namespace

PhaseActivity classify_phase(const BehaviorSpec& spec, PhaseId phase) {
  const auto& lifetime = spec.phase(phase).lifetime;
  if (!lifetime) return PhaseActivity::passive;
  auto params = spec.param_values();
  auto v = fold_constant(*lifetime, params);
  if (!v) return PhaseActivity::dynamic;
  return std::isinf(as_real(*v)) && as_real(*v) > 0 ? PhaseActivity::passive : PhaseActivity::active;
}

std::vector<Violation> validate_atomic_ports(const AtomicModel& model, std::string_view path) {
  std::vector<Violation> out;
  check_disjoint_ports(model.inports, model.outports, path, out);
  return out;
}

std::vector<Violation> validate_coupled_level(const CoupledModel& m, std::string_view path) {
  std::vector<Violation> out;
  const std::string here(path);
  check_disjoint_ports(m.inports, m.outports, path, out);

  if (m.submodels.empty()) out.push_back({RuleId::R3, here, "coupled model has no submodels"});
  for (const auto& sub : m.submodels) {
    if (!sub.model) {
      out.push_back({RuleId::R3, here,
                     "instance `" + sub.instance + "` refers to `" + sub.model_name + "`, which encloses this model"});
    } else if (model_name(*sub.model) == m.name) {
      out.push_back({RuleId::R3, here, "coupled model contains itself as instance `" + sub.instance + "`"});
    } else if (model_formalism(*sub.model) != m.formalism) {
      out.push_back({RuleId::R3, here,
                     "instance `" + sub.instance + "` uses formalism `" + model_formalism(*sub.model) + "`, expected `" +
                         m.formalism + "`"});
    }
  }

  for (const auto& c : m.ic) {
    if (c.from.instance == c.to.instance) {
      out.push_back({RuleId::R1, here,
                     "coupling " + to_string(c.from) + " -> " + to_string(c.to) + " feeds an output of `" +
                         c.from.instance + "` back into its own input"});
    }
  }

  for (const auto* list : {&m.eic, &m.ic, &m.eoc}) {
    for (const auto& c : *list) {
      const Port* src = endpoint(m, c.from, true);
      const Port* dst = endpoint(m, c.to, false);
      if (src && dst && !coupling_compatible(src->type, dst->type)) {
        out.push_back({RuleId::RP, here,
                       "coupling " + to_string(c.from) + " -> " + to_string(c.to) + " sends " + to_string(src->type) +
                           " into " + to_string(dst->type)});
      }
    }
  }
  return out;
}

std::vector<Violation> validate_structure(const ModelPtr& model) {
  std::vector<Violation> out;
  std::vector<std::string> ancestors;
  structure(model, model_name(model), ancestors, out);
  sort_violations(out);
  return out;
}

std::vector<Violation> validate_behavior(const BehaviorSpec& spec, std::string_view path) {
  std::vector<Violation> out;
  const auto params = spec.param_values();
  const std::string base(path);

  for (std::uint32_t i = 0; i < spec.phases.size(); ++i) {
    const PhaseId id{i};
    const auto& phase = spec.phases[i];
    const auto where = base + "/" + phase.name;
    const auto internal_count = std::count_if(spec.transitions.begin(), spec.transitions.end(), [&](const auto& t) {
      return t.kind == TransitionKind::internal && t.source_id == id;
    });
    switch (classify_phase(spec, id)) {
      case PhaseActivity::passive:
        if (internal_count > 0) {
          out.push_back({RuleId::R4, where, "passive phase (infinite lifetime) has internal transitions"});
        }
        break;
      case PhaseActivity::active: {
        if (internal_count == 0) {
          out.push_back({RuleId::R4, where, "active phase (finite lifetime) has no internal transition"});
        }
        const double ta = as_real(*fold_constant(*phase.lifetime, params));
        if (std::isnan(ta) || ta < 0.0) {
          out.push_back({RuleId::R5, where, "lifetime " + to_string(*phase.lifetime) + " is negative"});
        }
        break;
      }
      case PhaseActivity::dynamic: break;
    }
  }

  for (std::size_t i = 0; i < spec.transitions.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.transitions.size(); ++j) {
      const auto& a = spec.transitions[i];
      const auto& b = spec.transitions[j];
      if (a.kind != b.kind || a.source_id != b.source_id || a.trigger != b.trigger) continue;
      const bool both_true = constant_true(a.condition, params) && constant_true(b.condition, params);
      const bool identical = a.condition && b.condition && *a.condition == *b.condition;
      if (both_true || identical) {
        out.push_back({RuleId::RD, base + "/" + a.source,
                       "transitions #" + std::to_string(i + 1) + " and #" + std::to_string(j + 1) + " on `" +
                           a.trigger + "` can both fire"});
      }
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> validate_model(const ModelDef& def) {
  auto out = validate_structure(def.root);
  std::vector<std::string> ancestors;
  behaviors(def.root, def.name(), ancestors, out);
  sort_violations(out);
  return out;
}

std::optional<Violation> check_runtime_invariants(const BehaviorSpec& spec, const TotalState& state,
                                                  std::span<const double> params, std::string_view path) {
  const EvalEnv env{state.vars, params, state.elapsed};
  for (const auto& inv : spec.invariants) {
    if (!std::get<bool>(eval(inv, env))) {
      return Violation{RuleId::RI, std::string(path), "invariant `" + to_string(inv) + "` does not hold"};
    }
  }
  return std::nullopt;
}

ValidatedModel ValidatedModel::check(ModelDef def) {
  if (auto violations = validate_model(def); !violations.empty()) throw ModelError(std::move(violations));
  return ValidatedModel(std::move(def));
}

}  // namespace devsim
