#include "devsim/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "devsim/validator.hpp"

namespace devsim {

std::optional<PhaseId> BehaviorSpec::find_phase(std::string_view n) const {
  for (std::uint32_t i = 0; i < phases.size(); ++i) {
    if (phases[i].name == n) return PhaseId{i};
  }
  return std::nullopt;
}

std::optional<InputId> BehaviorSpec::find_input(std::string_view n) const {
  for (std::uint32_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i] == n) return InputId{i};
  }
  return std::nullopt;
}

std::vector<double> BehaviorSpec::param_values() const {
  std::vector<double> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.value);
  return out;
}

TotalState BehaviorSpec::initial_state() const {
  TotalState q;
  q.phase = initial;
  q.vars.reserve(variables.size());
  for (const auto& v : variables) q.vars.push_back(v.initial);
  return q;
}

bool Submodel::operator==(const Submodel& other) const {
  if (instance != other.instance || model_name != other.model_name) return false;
  if (model.has_value() != other.model.has_value()) return false;
  return !model || structurally_equal(*model, *other.model);
}

std::string to_string(const PortRef& ref) { return ref.instance.empty() ? ref.port : ref.instance + "." + ref.port; }

const Submodel* CoupledModel::find_submodel(std::string_view inst) const {
  auto it = std::find_if(submodels.begin(), submodels.end(), [&](const Submodel& s) { return s.instance == inst; });
  return it == submodels.end() ? nullptr : &*it;
}

const std::string& model_name(const ModelPtr& m) {
  return std::visit([](const auto& p) -> const std::string& { return p->name; }, m);
}

const std::string& model_formalism(const ModelPtr& m) {
  return std::visit([](const auto& p) -> const std::string& { return p->formalism; }, m);
}

const std::vector<Port>& model_inports(const ModelPtr& m) {
  return std::visit([](const auto& p) -> const std::vector<Port>& { return p->inports; }, m);
}

const std::vector<Port>& model_outports(const ModelPtr& m) {
  return std::visit([](const auto& p) -> const std::vector<Port>& { return p->outports; }, m);
}

bool structurally_equal(const ModelPtr& a, const ModelPtr& b) {
  if (a.index() != b.index()) return false;
  if (a.index() == 0) return *std::get<0>(a) == *std::get<0>(b);
  return *std::get<1>(a) == *std::get<1>(b);
}

std::vector<Param> ModelDef::params() const { return is_atomic() ? atomic().behavior.params : std::vector<Param>{}; }

namespace {

ModelPtr override_param(const ModelPtr& m, std::string_view name, double value, bool& found) {
  if (m.index() == 0) {
    auto copy = std::make_shared<AtomicModel>(*std::get<0>(m));
    for (auto& p : copy->behavior.params) {
      if (p.name == name) {
        p.value = value;
        found = true;
      }
    }
    return copy;
  }
  auto copy = std::make_shared<CoupledModel>(*std::get<1>(m));
  for (auto& sub : copy->submodels) {
    if (sub.model) sub.model = override_param(*sub.model, name, value, found);
  }
  return copy;
}

std::vector<std::string> port_names(const std::vector<Port>& ports) {
  std::vector<std::string> out;
  for (const auto& p : ports) out.push_back(p.name);
  return out;
}

void require_port(const std::vector<Port>& ports, const PortRef& ref, std::string_view role) {
  if (!find_port(ports, ref.port)) {
    throw std::invalid_argument("coupling endpoint `" + to_string(ref) + "` is not a known " + std::string(role));
  }
}

}  // namespace

ModelDef ModelDef::with_param(std::string_view name, double value) const {
  bool found = false;
  ModelDef out{override_param(root, name, value, found)};
  if (!found) throw std::invalid_argument("model has no parameter `" + std::string(name) + "`");
  return out;
}

AtomicModel build_atomic(std::string name, std::vector<Port> inports, std::vector<Port> outports,
                         BehaviorSpec behavior) {
  if (name.empty()) throw std::invalid_argument("model name must not be empty");
  for (auto* list : {&inports, &outports}) {
    for (const auto& p : *list) {
      if (p.name.empty()) throw std::invalid_argument("port name must not be empty");
    }
  }
  if (behavior.inputs != port_names(inports) || behavior.outputs != port_names(outports)) {
    throw std::invalid_argument("behavior event sets do not match the model's ports");
  }
  AtomicModel model{std::move(name), std::string(kClassicDevs), std::move(inports), std::move(outports),
                    std::move(behavior)};
  if (auto violations = validate_atomic_ports(model, model.name); !violations.empty()) {
    throw ModelError(std::move(violations));
  }
  return model;
}

CoupledModel build_coupled(std::string name, std::vector<Port> inports, std::vector<Port> outports,
                           std::vector<Submodel> submodels, std::vector<Coupling> eic, std::vector<Coupling> eoc,
                           std::vector<Coupling> ic, std::vector<std::string> select) {
  if (name.empty()) throw std::invalid_argument("model name must not be empty");
  CoupledModel model;
  model.name = std::move(name);
  model.inports = std::move(inports);
  model.outports = std::move(outports);
  model.submodels = std::move(submodels);
  model.eic = std::move(eic);
  model.eoc = std::move(eoc);
  model.ic = std::move(ic);

  auto endpoint_ports = [&](const PortRef& ref, bool input) -> const std::vector<Port>* {
    if (ref.instance.empty()) return input ? &model.inports : &model.outports;
    const Submodel* sub = model.find_submodel(ref.instance);
    if (!sub) throw std::invalid_argument("unknown instance `" + ref.instance + "`");
    if (!sub->model) return nullptr;
    return input ? &model_inports(*sub->model) : &model_outports(*sub->model);
  };
  auto check = [&](const Coupling& c, bool from_external, bool to_external) {
    if (c.from.instance.empty() != from_external || c.to.instance.empty() != to_external) {
      throw std::invalid_argument("coupling `" + to_string(c.from) + " -> " + to_string(c.to) +
                                  "` connects the wrong kind of endpoints");
    }
    // External inputs and submodel outputs feed couplings; the rest receive.
    if (const auto* ports = endpoint_ports(c.from, from_external)) require_port(*ports, c.from, "source port");
    if (const auto* ports = endpoint_ports(c.to, !to_external)) require_port(*ports, c.to, "target port");
  };
  for (const auto& c : model.eic) check(c, true, false);
  for (const auto& c : model.ic) check(c, false, false);
  for (const auto& c : model.eoc) check(c, false, true);

  if (select.empty()) {
    for (const auto& s : model.submodels) select.push_back(s.instance);
  }
  auto sorted_select = select;
  std::vector<std::string> instances;
  for (const auto& s : model.submodels) instances.push_back(s.instance);
  std::sort(sorted_select.begin(), sorted_select.end());
  std::sort(instances.begin(), instances.end());
  if (sorted_select != instances) throw std::invalid_argument("select must list every instance exactly once");
  model.select = std::move(select);

  auto ptr = std::make_shared<const CoupledModel>(model);
  if (auto violations = validate_structure(ptr); !violations.empty()) throw ModelError(std::move(violations));
  return model;
}

}  // namespace devsim
