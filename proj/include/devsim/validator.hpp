#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devsim/model.hpp"

namespace devsim {

// Activity class of a phase, decided from its lifetime expression alone.
enum class PhaseActivity : std::uint8_t {
  passive,  // constant infinite lifetime
  active,   // constant finite lifetime
  dynamic,  // depends on state variables; only checked while running
};

PhaseActivity classify_phase(const BehaviorSpec& spec, PhaseId phase);

// R1, R2, R3 and RP over the model and every submodel below it. Locations are
// dotted instance paths rooted at the model's name.
std::vector<Violation> validate_structure(const ModelPtr& model);

// Same checks, for one coupled model only; no recursion into submodels.
std::vector<Violation> validate_coupled_level(const CoupledModel& model, std::string_view path);
std::vector<Violation> validate_atomic_ports(const AtomicModel& model, std::string_view path);

// R4, R5 and the static part of RD.
std::vector<Violation> validate_behavior(const BehaviorSpec& spec, std::string_view path);

// validate_structure plus validate_behavior for every atomic model in the
// hierarchy, ordered by (location, rule).
std::vector<Violation> validate_model(const ModelDef& def);

// First declared invariant falsified by `state`, as an RI violation.
std::optional<Violation> check_runtime_invariants(const BehaviorSpec& spec, const TotalState& state,
                                                  std::span<const double> params, std::string_view path);

// A model that passed validate_model. The simulator only accepts this type.
class ValidatedModel {
 public:
  // Throws ModelError with the violation list when the model is not clean.
  static ValidatedModel check(ModelDef def);

  const ModelDef& def() const noexcept { return def_; }

 private:
  explicit ValidatedModel(ModelDef def) : def_(std::move(def)) {}

  ModelDef def_;
};

}  // namespace devsim
