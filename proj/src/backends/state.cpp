#include "dispatch.hpp"

namespace devsim::detail {

namespace {

// One handler object per phase; the handler applies the change itself.
class PhaseHandler {
 public:
  PhaseHandler(const BehaviorSpec& spec, std::span<const double> params, PhaseId phase)
      : spec_(spec), params_(params), phase_(phase), by_event_(spec.inputs.size()) {}
  virtual ~PhaseHandler() = default;

  void add(const TransitionDef& t) {
    if (t.kind == TransitionKind::external) {
      by_event_[t.trigger_id.value].push_back(&t);
    } else {
      internal_.push_back(&t);
    }
  }

  bool external(TotalState& q, InputId event) const {
    const TransitionDef* t = pick(by_event_[event.value], q);
    if (t == nullptr) return false;
    fire(*t, q, params_);
    return true;
  }

  virtual void internal(TotalState& q) const = 0;
  virtual std::vector<OutputEvent> output(const TotalState& q) const = 0;
  virtual Duration time_life(const TotalState& q) const = 0;

 protected:
  const TransitionDef* pick(const std::vector<const TransitionDef*>& list, const TotalState& q) const {
    const TransitionDef* chosen = nullptr;
    for (const TransitionDef* t : list) {
      if (!enabled(*t, q, params_)) continue;
      if (chosen != nullptr) nondeterminism(spec_, q, *chosen, *t);
      chosen = t;
    }
    return chosen;
  }

  const BehaviorSpec& spec_;
  std::span<const double> params_;
  PhaseId phase_;
  std::vector<std::vector<const TransitionDef*>> by_event_;
  std::vector<const TransitionDef*> internal_;
};

// Infinite lifetime and no internal transitions.
class PassivePhase final : public PhaseHandler {
 public:
  using PhaseHandler::PhaseHandler;

  void internal(TotalState& q) const override { incomplete(spec_, q); }
  std::vector<OutputEvent> output(const TotalState& q) const override { incomplete(spec_, q); }
  Duration time_life(const TotalState&) const override { return Duration::infinite(); }
};

class ActivePhase final : public PhaseHandler {
 public:
  using PhaseHandler::PhaseHandler;

  void internal(TotalState& q) const override {
    const TransitionDef* t = pick(internal_, q);
    if (t == nullptr) incomplete(spec_, q);
    fire(*t, q, params_);
  }

  std::vector<OutputEvent> output(const TotalState& q) const override {
    const TransitionDef* t = pick(internal_, q);
    if (t == nullptr) incomplete(spec_, q);
    return emit(*t, q, params_);
  }

  Duration time_life(const TotalState& q) const override { return lifetime(spec_, phase_, q, params_); }
};

class StateBehavior final : public Behavior {
 public:
  explicit StateBehavior(std::shared_ptr<const BehaviorSpec> spec) : Behavior(std::move(spec)) {
    const auto& s = *spec_;
    std::vector<bool> has_internal(s.phases.size(), false);
    for (const auto& t : s.transitions) {
      if (t.kind == TransitionKind::internal) has_internal[t.source_id.value] = true;
    }
    for (std::uint32_t i = 0; i < s.phases.size(); ++i) {
      const PhaseId id{i};
      if (!s.phases[i].lifetime && !has_internal[i]) {
        handlers_.push_back(std::make_unique<PassivePhase>(s, params_, id));
      } else {
        handlers_.push_back(std::make_unique<ActivePhase>(s, params_, id));
      }
    }
    for (const auto& t : s.transitions) handlers_[t.source_id.value]->add(t);
  }

  BackendKind kind() const noexcept override { return BackendKind::state; }

  bool delta_ext(TotalState& q, InputId event) const override { return handlers_[q.phase.value]->external(q, event); }
  void delta_int(TotalState& q) const override { handlers_[q.phase.value]->internal(q); }
  std::vector<OutputEvent> output(const TotalState& q) const override { return handlers_[q.phase.value]->output(q); }
  Duration time_advance(const TotalState& q) const override { return handlers_[q.phase.value]->time_life(q); }

 private:
  std::vector<std::unique_ptr<PhaseHandler>> handlers_;
};

}  // namespace

std::shared_ptr<const Behavior> make_state(std::shared_ptr<const BehaviorSpec> spec) {
  return std::make_shared<StateBehavior>(std::move(spec));
}

}  // namespace devsim::detail
