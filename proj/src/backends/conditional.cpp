#include <cmath>
#include <limits>

#include "dispatch.hpp"

namespace devsim::detail {

namespace {

// Flat table over (phase, column). Columns 0..m-1 are the input events and
// column m holds the internal transitions.
class ConditionalBehavior final : public Behavior {
 public:
  explicit ConditionalBehavior(std::shared_ptr<const BehaviorSpec> spec) : Behavior(std::move(spec)) {
    const auto& s = *spec_;
    columns_ = s.inputs.size() + 1;
    std::vector<std::vector<const TransitionDef*>> buckets(s.phases.size() * columns_);
    for (const auto& t : s.transitions) {
      const std::size_t column = t.kind == TransitionKind::external ? t.trigger_id.value : s.inputs.size();
      buckets[t.source_id.value * columns_ + column].push_back(&t);
    }
    cells_.reserve(buckets.size());
    for (const auto& b : buckets) {
      const auto begin = static_cast<std::uint32_t>(candidates_.size());
      candidates_.insert(candidates_.end(), b.begin(), b.end());
      const bool single = b.size() == 1 && !b.front()->condition;
      const bool direct = single && b.front()->actions.empty();
      cells_.push_back({begin, static_cast<std::uint32_t>(candidates_.size()), single, direct,
                        single ? b.front()->target_id : PhaseId{}});
    }
    for (const auto& p : s.phases) {
      if (!p.lifetime) {
        lifetimes_.push_back(std::numeric_limits<double>::infinity());
      } else if (auto v = fold_constant(*p.lifetime, params_); v && as_real(*v) >= 0.0) {
        lifetimes_.push_back(as_real(*v));
      } else {
        lifetimes_.push_back(kDynamic);
      }
    }
  }

  BackendKind kind() const noexcept override { return BackendKind::conditional; }

  bool delta_ext(TotalState& q, InputId event) const override {
    const Cell& cell = cells_[q.phase.value * columns_ + event.value];
    if (cell.direct) {
      q.phase = cell.target;
      q.elapsed = 0.0;
      return true;
    }
    const TransitionDef* t = select(q, event.value);
    if (t == nullptr) return false;
    fire(*t, q, params_);
    return true;
  }

  void delta_int(TotalState& q) const override {
    const TransitionDef* t = select(q, columns_ - 1);
    if (t == nullptr) incomplete(*spec_, q);
    fire(*t, q, params_);
  }

  std::vector<OutputEvent> output(const TotalState& q) const override {
    const TransitionDef* t = select(q, columns_ - 1);
    if (t == nullptr) incomplete(*spec_, q);
    return emit(*t, q, params_);
  }

  Duration time_advance(const TotalState& q) const override {
    const double v = lifetimes_[q.phase.value];
    if (std::isnan(v)) return lifetime(*spec_, q.phase, q, params_);
    return std::isinf(v) ? Duration::infinite() : Duration::of(v);
  }

 private:
  static constexpr double kDynamic = std::numeric_limits<double>::quiet_NaN();

  struct Cell {
    std::uint32_t begin;
    std::uint32_t end;
    bool unguarded_single;
    // Unguarded and without actions: firing is just the phase change.
    bool direct;
    PhaseId target;
  };

  const TransitionDef* select(const TotalState& q, std::size_t column) const {
    const Cell cell = cells_[q.phase.value * columns_ + column];
    if (cell.unguarded_single) return candidates_[cell.begin];
    const TransitionDef* chosen = nullptr;
    for (auto i = cell.begin; i < cell.end; ++i) {
      const TransitionDef* t = candidates_[i];
      if (!enabled(*t, q, params_)) continue;
      if (chosen != nullptr) nondeterminism(*spec_, q, *chosen, *t);
      chosen = t;
    }
    return chosen;
  }

  std::size_t columns_ = 0;
  std::vector<Cell> cells_;
  std::vector<const TransitionDef*> candidates_;
  // Constant lifetime per phase, NaN when it depends on the state.
  std::vector<double> lifetimes_;
};

}  // namespace

std::shared_ptr<const Behavior> make_conditional(std::shared_ptr<const BehaviorSpec> spec) {
  return std::make_shared<ConditionalBehavior>(std::move(spec));
}

}  // namespace devsim::detail
