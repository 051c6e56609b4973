#include <unordered_map>

#include "dispatch.hpp"

namespace devsim::detail {

namespace {

class Transition {
 public:
  Transition(const BehaviorSpec& spec, std::span<const double> params, const TransitionDef& def)
      : spec_(spec), params_(params), def_(def) {}
  virtual ~Transition() = default;

  const TransitionDef& def() const noexcept { return def_; }

  virtual bool fireable(const TotalState& q) const = 0;
  virtual void fire(TotalState& q) const = 0;

 protected:
  const BehaviorSpec& spec_;
  std::span<const double> params_;
  const TransitionDef& def_;
};

class ExtTransition final : public Transition {
 public:
  using Transition::Transition;

  bool fireable(const TotalState& q) const override { return q.phase == def_.source_id && enabled(def_, q, params_); }
  void fire(TotalState& q) const override { detail::fire(def_, q, params_); }
};

class IntTransition final : public Transition {
 public:
  using Transition::Transition;

  bool fireable(const TotalState& q) const override { return q.phase == def_.source_id && enabled(def_, q, params_); }
  void fire(TotalState& q) const override { detail::fire(def_, q, params_); }
  std::vector<OutputEvent> output(const TotalState& q) const { return emit(def_, q, params_); }
};

class TransitionEvent {
 public:
  TransitionEvent(const BehaviorSpec& spec, std::span<const double> params) : spec_(spec), params_(params) {}
  virtual ~TransitionEvent() = default;

  template <typename T>
  void add(const TransitionDef& t) {
    by_source_[t.source_id].push_back(std::make_unique<T>(spec_, params_, t));
  }

  virtual bool set_change(TotalState& q) const = 0;

 protected:
  const Transition* fireable(const TotalState& q) const {
    auto it = by_source_.find(q.phase);
    if (it == by_source_.end()) return nullptr;
    const Transition* chosen = nullptr;
    for (const auto& t : it->second) {
      if (!t->fireable(q)) continue;
      if (chosen != nullptr) nondeterminism(spec_, q, chosen->def(), t->def());
      chosen = t.get();
    }
    return chosen;
  }

  const BehaviorSpec& spec_;
  std::span<const double> params_;
  std::unordered_map<PhaseId, std::vector<std::unique_ptr<Transition>>> by_source_;
};

class InputEvent final : public TransitionEvent {
 public:
  using TransitionEvent::TransitionEvent;

  bool set_change(TotalState& q) const override {
    const Transition* t = fireable(q);
    if (t == nullptr) return false;
    t->fire(q);
    return true;
  }
};

class InternalEvent final : public TransitionEvent {
 public:
  using TransitionEvent::TransitionEvent;

  bool set_change(TotalState& q) const override {
    required(q).fire(q);
    return true;
  }

  std::vector<OutputEvent> output(const TotalState& q) const {
    return static_cast<const IntTransition&>(required(q)).output(q);
  }

 private:
  const Transition& required(const TotalState& q) const {
    const Transition* t = fireable(q);
    if (t == nullptr) incomplete(spec_, q);
    return *t;
  }
};

class StateEventTransitionBehavior final : public Behavior {
 public:
  explicit StateEventTransitionBehavior(std::shared_ptr<const BehaviorSpec> spec)
      : Behavior(std::move(spec)), internal_(*spec_, params_) {
    const auto& s = *spec_;
    for (std::size_t i = 0; i < s.inputs.size(); ++i) inputs_.push_back(std::make_unique<InputEvent>(s, params_));
    for (const auto& t : s.transitions) {
      if (t.kind == TransitionKind::external) {
        inputs_[t.trigger_id.value]->add<ExtTransition>(t);
      } else {
        internal_.add<IntTransition>(t);
      }
    }
  }

  BackendKind kind() const noexcept override { return BackendKind::state_event_transition; }

  bool delta_ext(TotalState& q, InputId event) const override { return inputs_[event.value]->set_change(q); }

  void delta_int(TotalState& q) const override { internal_.set_change(q); }
  std::vector<OutputEvent> output(const TotalState& q) const override { return internal_.output(q); }

  Duration time_advance(const TotalState& q) const override { return lifetime(*spec_, q.phase, q, params_); }

 private:
  std::vector<std::unique_ptr<TransitionEvent>> inputs_;
  InternalEvent internal_;
};

}  // namespace

std::shared_ptr<const Behavior> make_state_event_transition(std::shared_ptr<const BehaviorSpec> spec) {
  return std::make_shared<StateEventTransitionBehavior>(std::move(spec));
}

}  // namespace devsim::detail
