#include "dispatch.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace devsim {

std::string_view backend_name(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::conditional: return "conditional";
    case BackendKind::state: return "state";
    case BackendKind::state_event: return "state_event";
    case BackendKind::state_event_transition: return "state_event_transition";
  }
  return "?";
}

std::optional<BackendKind> parse_backend(std::string_view name) noexcept {
  for (auto k : kAllBackends) {
    if (backend_name(k) == name) return k;
  }
  return std::nullopt;
}

Behavior::Behavior(std::shared_ptr<const BehaviorSpec> spec) : spec_(std::move(spec)), params_(spec_->param_values()) {}

std::shared_ptr<const Behavior> compile(std::shared_ptr<const BehaviorSpec> spec, BackendKind kind) {
  if (!spec) throw std::invalid_argument("compile: null behavior spec");
  detail::check_indices(*spec);
  switch (kind) {
    case BackendKind::conditional: return detail::make_conditional(std::move(spec));
    case BackendKind::state: return detail::make_state(std::move(spec));
    case BackendKind::state_event: return detail::make_state_event(std::move(spec));
    case BackendKind::state_event_transition: return detail::make_state_event_transition(std::move(spec));
  }
  throw std::invalid_argument("compile: unknown backend");
}

namespace detail {

namespace {

std::size_t number_of(const BehaviorSpec& spec, const TransitionDef& t) {
  return static_cast<std::size_t>(&t - spec.transitions.data()) + 1;
}

std::string describe(const BehaviorSpec& spec, const TransitionDef& t) {
  std::string out = "#" + std::to_string(number_of(spec, t)) + " ";
  if (t.kind == TransitionKind::external) {
    out += "ext " + t.source + " --" + t.trigger + "--> " + t.target;
  } else {
    out += "int " + t.source + " --> " + t.target;
  }
  return out;
}

}  // namespace

void fire(const TransitionDef& t, TotalState& q, std::span<const double> params) {
  for (const auto& a : t.actions) {
    Value v = eval(a.value, env_of(q, params));
    if (type_of(q.vars[a.slot]) == ValueType::real && type_of(v) == ValueType::integer) v = as_real(v);
    q.vars[a.slot] = std::move(v);
  }
  q.phase = t.target_id;
  q.elapsed = 0.0;
}

std::vector<OutputEvent> emit(const TransitionDef& t, const TotalState& q, std::span<const double> params) {
  if (!t.output) return {};
  return {OutputEvent{t.output->port_id, eval(t.output->value, env_of(q, params))}};
}

Duration lifetime(const BehaviorSpec& spec, PhaseId phase, const TotalState& q, std::span<const double> params) {
  const auto& def = spec.phase(phase);
  if (!def.lifetime) return Duration::infinite();
  const double v = as_real(eval(*def.lifetime, env_of(q, params)));
  if (std::isnan(v) || v < 0.0) {
    throw RuntimeViolation({RuleId::R5, spec.name + "/" + def.name,
                            "lifetime " + to_string(*def.lifetime) + " evaluated to " + format_real(v) +
                                ", expected a result >= 0"});
  }
  return v == std::numeric_limits<double>::infinity() ? Duration::infinite() : Duration::of(v);
}

void nondeterminism(const BehaviorSpec& spec, const TotalState& q, const TransitionDef& a, const TransitionDef& b) {
  throw RuntimeViolation({RuleId::RD, spec.name + "/" + spec.phase(q.phase).name,
                          "transitions " + describe(spec, a) + " and " + describe(spec, b) + " are both fireable"});
}

void incomplete(const BehaviorSpec& spec, const TotalState& q) {
  throw RuntimeViolation({RuleId::R4, spec.name + "/" + spec.phase(q.phase).name,
                          "phase reached its deadline with no fireable internal transition"});
}

void check_indices(const BehaviorSpec& spec) {
  auto bad = [&](const std::string& what) {
    throw std::invalid_argument("behavior `" + spec.name + "` references " + what);
  };
  if (spec.initial.value >= spec.phases.size()) bad("an undeclared initial phase");
  for (const auto& t : spec.transitions) {
    if (t.source_id.value >= spec.phases.size() || t.target_id.value >= spec.phases.size()) {
      bad("an undeclared phase in " + t.source + " -> " + t.target);
    }
    if (t.kind == TransitionKind::external && t.trigger_id.value >= spec.inputs.size()) {
      bad("the undeclared event `" + t.trigger + "`");
    }
    if (t.kind == TransitionKind::internal && t.trigger != kInternalTrigger) bad("an internal transition with a trigger");
    if (t.kind == TransitionKind::external && t.output) bad("an external transition with an output clause");
    if (t.output && t.output->port_id.value >= spec.outputs.size()) bad("the undeclared output `" + t.output->port + "`");
    for (const auto& a : t.actions) {
      if (a.slot >= spec.variables.size()) bad("the undeclared variable `" + a.variable + "`");
    }
  }
}

}  // namespace detail
}  // namespace devsim
