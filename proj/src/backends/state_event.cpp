#include <unordered_map>

#include "dispatch.hpp"

namespace devsim::detail {

namespace {

class StateObject {
 public:
  StateObject(const BehaviorSpec& spec, PhaseId id) : spec_(spec), id_(id) {}

  Duration time_life(const TotalState& q, std::span<const double> params) const {
    return lifetime(spec_, id_, q, params);
  }

 private:
  const BehaviorSpec& spec_;
  PhaseId id_;
};

// Each event owns its own source-phase map; maps are never shared.
class EventObject {
 public:
  EventObject(const BehaviorSpec& spec, std::span<const double> params) : spec_(spec), params_(params) {}
  virtual ~EventObject() = default;

  void add(const TransitionDef& t) { targets_[t.source_id].push_back(&t); }

  virtual bool set_change(TotalState& q) const = 0;

 protected:
  const TransitionDef* lookup(const TotalState& q) const {
    auto it = targets_.find(q.phase);
    if (it == targets_.end()) return nullptr;
    const TransitionDef* chosen = nullptr;
    for (const TransitionDef* t : it->second) {
      if (!enabled(*t, q, params_)) continue;
      if (chosen != nullptr) nondeterminism(spec_, q, *chosen, *t);
      chosen = t;
    }
    return chosen;
  }

  const BehaviorSpec& spec_;
  std::span<const double> params_;
  std::unordered_map<PhaseId, std::vector<const TransitionDef*>> targets_;
};

class InputEvent final : public EventObject {
 public:
  using EventObject::EventObject;

  bool set_change(TotalState& q) const override {
    const TransitionDef* t = lookup(q);
    if (t == nullptr) return false;
    fire(*t, q, params_);
    return true;
  }
};

class InternalEvent final : public EventObject {
 public:
  using EventObject::EventObject;

  bool set_change(TotalState& q) const override {
    fire(required(q), q, params_);
    return true;
  }

  std::vector<OutputEvent> output(const TotalState& q) const { return emit(required(q), q, params_); }

 private:
  const TransitionDef& required(const TotalState& q) const {
    const TransitionDef* t = lookup(q);
    if (t == nullptr) incomplete(spec_, q);
    return *t;
  }
};

class StateEventBehavior final : public Behavior {
 public:
  explicit StateEventBehavior(std::shared_ptr<const BehaviorSpec> spec)
      : Behavior(std::move(spec)), internal_(*spec_, params_) {
    const auto& s = *spec_;
    for (std::uint32_t i = 0; i < s.phases.size(); ++i) states_.emplace_back(s, PhaseId{i});
    for (std::size_t i = 0; i < s.inputs.size(); ++i) inputs_.push_back(std::make_unique<InputEvent>(s, params_));
    for (const auto& t : s.transitions) {
      if (t.kind == TransitionKind::external) {
        inputs_[t.trigger_id.value]->add(t);
      } else {
        internal_.add(t);
      }
    }
  }

  BackendKind kind() const noexcept override { return BackendKind::state_event; }

  bool delta_ext(TotalState& q, InputId event) const override { return inputs_[event.value]->set_change(q); }
  void delta_int(TotalState& q) const override { internal_.set_change(q); }
  std::vector<OutputEvent> output(const TotalState& q) const override { return internal_.output(q); }
  Duration time_advance(const TotalState& q) const override { return states_[q.phase.value].time_life(q, params_); }

 private:
  std::vector<StateObject> states_;
  std::vector<std::unique_ptr<EventObject>> inputs_;
  InternalEvent internal_;
};

}  // namespace

std::shared_ptr<const Behavior> make_state_event(std::shared_ptr<const BehaviorSpec> spec) {
  return std::make_shared<StateEventBehavior>(std::move(spec));
}

}  // namespace devsim::detail
