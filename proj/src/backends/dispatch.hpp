#pragma once

// Pieces shared by every backend: guard evaluation, firing, lifetimes and the
// runtime rule violations. Backends differ only in how they find candidates.

#include <memory>
#include <span>
#include <vector>

#include "devsim/backend.hpp"

namespace devsim::detail {

inline EvalEnv env_of(const TotalState& q, std::span<const double> params) { return {q.vars, params, q.elapsed}; }

inline bool enabled(const TransitionDef& t, const TotalState& q, std::span<const double> params) {
  return !t.condition || std::get<bool>(eval(*t.condition, env_of(q, params)));
}

// Runs the actions left to right, then moves to the target phase with elapsed 0.
void fire(const TransitionDef& t, TotalState& q, std::span<const double> params);

std::vector<OutputEvent> emit(const TransitionDef& t, const TotalState& q, std::span<const double> params);

// Raises R5 when the lifetime evaluates below zero.
Duration lifetime(const BehaviorSpec& spec, PhaseId phase, const TotalState& q, std::span<const double> params);

[[noreturn]] void nondeterminism(const BehaviorSpec& spec, const TotalState& q, const TransitionDef& a,
                                 const TransitionDef& b);
[[noreturn]] void incomplete(const BehaviorSpec& spec, const TotalState& q);

// Rejects out-of-range phase, event or output indices.
void check_indices(const BehaviorSpec& spec);

std::shared_ptr<const Behavior> make_conditional(std::shared_ptr<const BehaviorSpec> spec);
std::shared_ptr<const Behavior> make_state(std::shared_ptr<const BehaviorSpec> spec);
std::shared_ptr<const Behavior> make_state_event(std::shared_ptr<const BehaviorSpec> spec);
std::shared_ptr<const Behavior> make_state_event_transition(std::shared_ptr<const BehaviorSpec> spec);

}  // namespace devsim::detail
