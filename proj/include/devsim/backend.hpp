#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "devsim/model.hpp"

namespace devsim {

// The four dispatch strategies, from least to most objectified.
enum class BackendKind : std::uint8_t {
  conditional,             // one branch table over (phase, event)
  state,                   // one handler object per phase
  state_event,             // per-event objects holding source -> target maps
  state_event_transition,  // per-event objects holding transition objects
};

inline constexpr std::array<BackendKind, 4> kAllBackends = {
    BackendKind::conditional, BackendKind::state, BackendKind::state_event, BackendKind::state_event_transition};

std::string_view backend_name(BackendKind kind) noexcept;
std::optional<BackendKind> parse_backend(std::string_view name) noexcept;

struct OutputEvent {
  OutputId port;
  Value value;

  bool operator==(const OutputEvent&) const = default;
};

// Behavior contract shared by every backend. Implementations are immutable
// and may be shared across threads; the TotalState belongs to the caller.
//
// Every operation raises RuntimeViolation for RD (two fireable transitions),
// R4 (an active phase reached its deadline with no fireable internal
// transition) or R5 (negative lifetime), and EvalError for failing
// expressions.
class Behavior {
 public:
  explicit Behavior(std::shared_ptr<const BehaviorSpec> spec);
  virtual ~Behavior() = default;

  Behavior(const Behavior&) = delete;
  Behavior& operator=(const Behavior&) = delete;

  virtual BackendKind kind() const noexcept = 0;

  // δext. Fires the single external transition enabled for (q.phase, event)
  // and returns true, leaving elapsed at 0. Returns false and leaves q
  // untouched when no transition handles the event.
  virtual bool delta_ext(TotalState& q, InputId event) const = 0;

  // δint. Precondition: q.elapsed equals the phase lifetime.
  virtual void delta_int(TotalState& q) const = 0;

  // λ, evaluated on the internal transition that delta_int would fire.
  virtual std::vector<OutputEvent> output(const TotalState& q) const = 0;

  // D(q.phase) under the current variable bindings.
  virtual Duration time_advance(const TotalState& q) const = 0;

  const BehaviorSpec& spec() const noexcept { return *spec_; }
  std::span<const double> params() const noexcept { return params_; }
  TotalState initial_state() const { return spec_->initial_state(); }

 protected:
  std::shared_ptr<const BehaviorSpec> spec_;
  std::vector<double> params_;
};

// Throws std::invalid_argument when the behavior references undeclared phases or events.
std::shared_ptr<const Behavior> compile(std::shared_ptr<const BehaviorSpec> spec, BackendKind kind);

}  // namespace devsim
