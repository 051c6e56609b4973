#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "devsim/core.hpp"
#include "devsim/expr.hpp"

namespace devsim {

inline constexpr std::string_view kInternalTrigger = "@int";
inline constexpr std::string_view kClassicDevs = "classic-devs";

struct Param {
  std::string name;
  double value = 0.0;

  bool operator==(const Param&) const = default;
};

struct Variable {
  std::string name;
  Value initial;

  bool operator==(const Variable&) const = default;
};

struct PhaseDef {
  std::string name;
  // Empty means the phase lives forever (passive).
  std::optional<Expr> lifetime;

  bool operator==(const PhaseDef&) const = default;
};

enum class TransitionKind : std::uint8_t { external, internal };

struct Assignment {
  std::string variable;
  std::uint32_t slot = 0;
  Expr value;

  bool operator==(const Assignment&) const = default;
};

struct OutputClause {
  std::string port;
  OutputId port_id;
  Expr value;

  bool operator==(const OutputClause&) const = default;
};

struct TransitionDef {
  TransitionKind kind = TransitionKind::external;
  std::string source;
  std::string target;
  // Input event name for external transitions, kInternalTrigger otherwise.
  std::string trigger;
  PhaseId source_id;
  PhaseId target_id;
  InputId trigger_id;  // external only
  std::optional<Expr> condition;
  std::vector<Assignment> actions;
  std::optional<OutputClause> output;  // internal only

  bool operator==(const TransitionDef&) const = default;
};

// Declarative behavior M = (X, S, Y, δint, δext, λ, D). Every name is already
// resolved to an index; the names are kept for traces and diagnostics.
struct BehaviorSpec {
  std::string name;
  std::vector<Param> params;
  std::vector<Variable> variables;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<PhaseDef> phases;
  PhaseId initial;
  std::vector<TransitionDef> transitions;
  std::vector<Expr> invariants;

  bool operator==(const BehaviorSpec&) const = default;

  std::optional<PhaseId> find_phase(std::string_view name) const;
  std::optional<InputId> find_input(std::string_view name) const;
  const PhaseDef& phase(PhaseId id) const { return phases[id.value]; }
  std::vector<double> param_values() const;
  TotalState initial_state() const;
};

struct AtomicModel {
  std::string name;
  std::string formalism{kClassicDevs};
  std::vector<Port> inports;
  std::vector<Port> outports;
  BehaviorSpec behavior;

  bool operator==(const AtomicModel&) const = default;
};

struct CoupledModel;

using ModelPtr = std::variant<std::shared_ptr<const AtomicModel>, std::shared_ptr<const CoupledModel>>;

struct Submodel {
  std::string instance;
  std::string model_name;
  // Empty when the reference names the enclosing model or one of its
  // ancestors; such a hierarchy cannot be instantiated and fails rule R3.
  std::optional<ModelPtr> model;

  bool operator==(const Submodel& other) const;
};

// Port on the coupled model itself when `instance` is empty.
struct PortRef {
  std::string instance;
  std::string port;

  bool operator==(const PortRef&) const = default;
};

std::string to_string(const PortRef& ref);

struct Coupling {
  PortRef from;
  PortRef to;

  bool operator==(const Coupling&) const = default;
};

struct CoupledModel {
  std::string name;
  std::string formalism{kClassicDevs};
  std::vector<Port> inports;
  std::vector<Port> outports;
  std::vector<Submodel> submodels;
  std::vector<Coupling> eic;
  std::vector<Coupling> eoc;
  std::vector<Coupling> ic;
  std::vector<std::string> select;

  bool operator==(const CoupledModel&) const = default;

  const Submodel* find_submodel(std::string_view instance) const;
};

const std::string& model_name(const ModelPtr& m);
const std::string& model_formalism(const ModelPtr& m);
const std::vector<Port>& model_inports(const ModelPtr& m);
const std::vector<Port>& model_outports(const ModelPtr& m);
bool structurally_equal(const ModelPtr& a, const ModelPtr& b);

// A parsed model together with its parameters (which live in the atomic
// behaviors that reference them).
struct ModelDef {
  ModelPtr root;

  const std::string& name() const { return model_name(root); }
  bool is_atomic() const { return root.index() == 0; }
  const AtomicModel& atomic() const { return *std::get<0>(root); }
  const CoupledModel& coupled() const { return *std::get<1>(root); }

  // Parameters of the root atomic model; empty for coupled roots.
  std::vector<Param> params() const;
  // Copy of the model with every parameter named `name` set to `value`,
  // anywhere in the hierarchy. Throws std::invalid_argument if none exists.
  ModelDef with_param(std::string_view name, double value) const;

  friend bool operator==(const ModelDef& a, const ModelDef& b) { return structurally_equal(a.root, b.root); }
};

// Checked construction. Both throw ModelError listing the failed rules.
AtomicModel build_atomic(std::string name, std::vector<Port> inports, std::vector<Port> outports,
                         BehaviorSpec behavior);
CoupledModel build_coupled(std::string name, std::vector<Port> inports, std::vector<Port> outports,
                           std::vector<Submodel> submodels, std::vector<Coupling> eic, std::vector<Coupling> eoc,
                           std::vector<Coupling> ic, std::vector<std::string> select);

}  // namespace devsim
