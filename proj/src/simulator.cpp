#include "devsim/simulator.hpp"

#include <algorithm>
#include <limits>
#include <type_traits>

namespace devsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Emitted {
  std::uint32_t port;
  Value value;
};

// Raised inside the tree when strict_inputs rejects an input.
struct UnhandledInput {
  std::string message;
};

std::vector<std::pair<std::string, Value>> snapshot(const BehaviorSpec& spec, const TotalState& q) {
  std::vector<std::pair<std::string, Value>> vars;
  vars.reserve(q.vars.size());
  for (std::size_t i = 0; i < q.vars.size(); ++i) vars.emplace_back(spec.variables[i].name, q.vars[i]);
  return vars;
}

}  // namespace

struct RunState {
  bool record = true;
  bool strict_inputs = false;
  double now = 0.0;
  Trace trace;
  // Transition entry waiting for its lifetime and invariant checks.
  std::optional<TraceEntry> pending;
};

class Node {
 public:
  explicit Node(RunState& rs) : rs_(rs) {}
  virtual ~Node() = default;

  virtual void init() = 0;
  // Internal event at rs_.now; output for the parent goes to `out`.
  virtual void step(std::vector<Emitted>& out) = 0;
  virtual void deliver(std::uint32_t inport, const Value& value) = 0;

  double tl = 0.0;
  double tn = kInf;

 protected:
  RunState& rs_;
};

namespace {

class AtomicSim final : public Node {
 public:
  AtomicSim(RunState& rs, std::shared_ptr<const AtomicModel> model, BackendKind backend, std::string path)
      : Node(rs),
        model_(std::move(model)),
        behavior_(compile(std::shared_ptr<const BehaviorSpec>(model_, &model_->behavior), backend)),
        path_(std::move(path)) {}

  void init() override {
    q_ = behavior_->initial_state();
    tl = 0.0;
    check_invariants();
    schedule();
  }

  void step(std::vector<Emitted>& out) override {
    const BehaviorSpec& spec = behavior_->spec();
    q_.elapsed = sigma_;
    const std::vector<OutputEvent> outputs = guarded([&] { return behavior_->output(q_); });
    for (const auto& o : outputs) {
      const Port& port = model_->outports[o.port.value];
      if (!port_accepts(port, o.value)) {
        throw RuntimeViolation({RuleId::RP, path_ + "." + port.name,
                                "output " + format_value(o.value) + " does not fit type " + to_string(port.type)});
      }
      if (rs_.record) {
        TraceEntry e;
        e.time = rs_.now;
        e.path = path_;
        e.kind = EntryKind::out;
        e.port = port.name;
        e.value = o.value;
        rs_.trace.entries.push_back(std::move(e));
      }
      out.push_back({o.port.value, o.value});
    }
    const PhaseId from = q_.phase;
    guarded([&] { behavior_->delta_int(q_); });
    finish(EntryKind::internal, spec.phase(from).name);
  }

  void deliver(std::uint32_t inport, const Value& value) override {
    const Port& port = model_->inports[inport];
    if (!port_accepts(port, value)) {
      throw RuntimeViolation({RuleId::RP, path_ + "." + port.name,
                              "input " + format_value(value) + " does not fit type " + to_string(port.type)});
    }
    const double e = std::clamp(rs_.now - tl, 0.0, sigma_);
    const PhaseId from = q_.phase;
    q_.elapsed = e;
    const bool fired = guarded([&] { return behavior_->delta_ext(q_, InputId{inport}); });
    if (!fired) {
      if (rs_.strict_inputs) {
        throw UnhandledInput{path_ + ": no transition handles `" + port.name + "` in phase " +
                             behavior_->spec().phase(from).name};
      }
      return;
    }
    finish(EntryKind::ext, behavior_->spec().phase(from).name);
  }

 private:
  // Reports behavior failures against this instance's path instead of the model name.
  template <typename F>
  auto guarded(F&& f) -> std::invoke_result_t<F> {
    try {
      return f();
    } catch (const RuntimeViolation& v) {
      Violation moved = v.violation();
      const auto slash = moved.location.find('/');
      moved.location = path_ + (slash == std::string::npos ? "" : moved.location.substr(slash));
      throw RuntimeViolation(std::move(moved));
    } catch (const EvalError& e) {
      throw EvalError(path_ + "/" + behavior_->spec().phase(q_.phase).name + ": " + e.what());
    }
  }

  void finish(EntryKind kind, const std::string& from) {
    if (rs_.record) {
      TraceEntry e;
      e.time = rs_.now;
      e.path = path_;
      e.kind = kind;
      e.from = from;
      e.to = behavior_->spec().phase(q_.phase).name;
      e.vars = snapshot(behavior_->spec(), q_);
      rs_.pending = std::move(e);
    }
    tl = rs_.now;
    schedule();
    check_invariants();
    if (rs_.pending) {
      rs_.trace.entries.push_back(std::move(*rs_.pending));
      rs_.pending.reset();
    }
  }

  void schedule() {
    sigma_ = guarded([&] { return behavior_->time_advance(q_).value(); });
    tn = tl + sigma_;
  }

  void check_invariants() {
    const BehaviorSpec& spec = behavior_->spec();
    if (spec.invariants.empty()) return;
    if (auto v = check_runtime_invariants(spec, q_, behavior_->params(), path_)) throw RuntimeViolation(std::move(*v));
  }

  std::shared_ptr<const AtomicModel> model_;
  std::shared_ptr<const Behavior> behavior_;
  std::string path_;
  TotalState q_;
  double sigma_ = kInf;
};

class Coordinator final : public Node {
 public:
  Coordinator(RunState& rs, std::shared_ptr<const CoupledModel> model, BackendKind backend, const std::string& path);

  void init() override {
    for (auto& c : children_) c->init();
    tl = 0.0;
    reschedule();
  }

  void step(std::vector<Emitted>& out) override {
    Node* imminent = nullptr;
    std::uint32_t index = 0;
    for (auto i : select_order_) {
      if (children_[i]->tn == tn) {
        imminent = children_[i].get();
        index = i;
        break;
      }
    }
    std::vector<Emitted> emitted;
    imminent->step(emitted);
    for (const auto& y : emitted) {
      for (const auto& r : routes_[index][y.port]) {
        if (r.upward) {
          out.push_back({r.port, y.value});
        } else {
          children_[r.child]->deliver(r.port, y.value);
        }
      }
    }
    tl = rs_.now;
    reschedule();
  }

  void deliver(std::uint32_t inport, const Value& value) override {
    for (const auto& r : eic_[inport]) children_[r.child]->deliver(r.port, value);
    tl = rs_.now;
    reschedule();
  }

 private:
  struct Route {
    bool upward;
    std::uint32_t child;
    std::uint32_t port;
  };

  void reschedule() {
    tn = kInf;
    for (const auto& c : children_) tn = std::min(tn, c->tn);
  }

  std::shared_ptr<const CoupledModel> model_;
  std::vector<std::unique_ptr<Node>> children_;
  std::vector<std::uint32_t> select_order_;
  std::vector<std::vector<Route>> eic_;
  // routes_[child][outport]: internal couplings first, then external outputs.
  std::vector<std::vector<std::vector<Route>>> routes_;
};

std::uint32_t port_index(const std::vector<Port>& ports, std::string_view name) {
  const Port* p = find_port(ports, name);
  if (p == nullptr) throw std::invalid_argument("no port `" + std::string(name) + "`");
  return static_cast<std::uint32_t>(p - ports.data());
}

std::unique_ptr<Node> build(RunState& rs, const ModelPtr& model, BackendKind backend, const std::string& path) {
  if (model.index() == 0) return std::make_unique<AtomicSim>(rs, std::get<0>(model), backend, path);
  return std::make_unique<Coordinator>(rs, std::get<1>(model), backend, path);
}

Coordinator::Coordinator(RunState& rs, std::shared_ptr<const CoupledModel> model, BackendKind backend,
                         const std::string& path)
    : Node(rs), model_(std::move(model)) {
  const CoupledModel& m = *model_;
  auto child_index = [&](std::string_view instance) {
    for (std::uint32_t i = 0; i < m.submodels.size(); ++i) {
      if (m.submodels[i].instance == instance) return i;
    }
    throw std::invalid_argument("no submodel `" + std::string(instance) + "`");
  };
  for (const auto& s : m.submodels) {
    if (!s.model) throw std::invalid_argument("submodel `" + s.instance + "` cannot be instantiated");
    children_.push_back(build(rs, *s.model, backend, path + "." + s.instance));
    routes_.emplace_back(model_outports(*s.model).size());
  }
  if (m.select.empty()) {
    for (std::uint32_t i = 0; i < children_.size(); ++i) select_order_.push_back(i);
  } else {
    for (const auto& name : m.select) select_order_.push_back(child_index(name));
  }
  eic_.resize(m.inports.size());
  for (const auto& c : m.eic) {
    const auto child = child_index(c.to.instance);
    eic_[port_index(m.inports, c.from.port)].push_back(
        {false, child, port_index(model_inports(*m.submodels[child].model), c.to.port)});
  }
  for (const auto& c : m.ic) {
    const auto src = child_index(c.from.instance);
    const auto dst = child_index(c.to.instance);
    routes_[src][port_index(model_outports(*m.submodels[src].model), c.from.port)].push_back(
        {false, dst, port_index(model_inports(*m.submodels[dst].model), c.to.port)});
  }
  for (const auto& c : m.eoc) {
    const auto src = child_index(c.from.instance);
    routes_[src][port_index(model_outports(*m.submodels[src].model), c.from.port)].push_back(
        {true, 0, port_index(m.outports, c.to.port)});
  }
}

}  // namespace

SimulationAborted::SimulationAborted(std::string message, std::optional<Violation> violation, Trace partial,
                                     std::optional<TraceEntry> offending)
    : std::runtime_error(std::move(message)),
      violation_(std::move(violation)),
      partial_(std::move(partial)),
      offending_(std::move(offending)) {}

Simulator::Simulator(const ValidatedModel& model, BackendKind backend, RunOptions options)
    : model_(model.def()), backend_(backend), options_(options), state_(std::make_unique<RunState>()) {
  state_->record = options.record;
  state_->strict_inputs = options.strict_inputs;
  root_ = build(*state_, model_.root, backend, "root");
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

PreparedScenario Simulator::prepare(const Scenario& scenario) const {
  const auto& inports = model_inports(model_.root);
  check_scenario(scenario, inports);
  PreparedScenario p{{}, scenario.until, scenario.budget, scenario_digest(scenario)};
  p.events.reserve(scenario.events.size());
  for (const auto& ev : scenario.events) p.events.push_back({ev.time, port_index(inports, ev.port), ev.value});
  return p;
}

Trace Simulator::run(const PreparedScenario& scenario) {
  RunState& rs = *state_;
  rs.trace = Trace{{model_.name(), backend_, scenario.digest}, {}, Termination::quiescent};
  rs.pending.reset();
  rs.now = 0.0;
  auto abort = [&](std::string message, std::optional<Violation> v) {
    std::optional<TraceEntry> offending = std::move(rs.pending);
    rs.pending.reset();
    throw SimulationAborted(std::move(message), std::move(v), std::move(rs.trace), std::move(offending));
  };
  try {
    root_->init();
    std::size_t next = 0;
    std::uint64_t steps = 0;
    std::vector<Emitted> discarded;
    for (;;) {
      const double t_int = root_->tn;
      const double t_ext = next < scenario.events.size() ? scenario.events[next].time : kInf;
      const double t = std::min(t_int, t_ext);
      if (t == kInf) {
        rs.trace.termination = Termination::quiescent;
        break;
      }
      if (t > scenario.until) {
        rs.trace.termination = Termination::end_time;
        break;
      }
      if (steps == scenario.budget) {
        rs.trace.termination = Termination::budget;
        break;
      }
      ++steps;
      rs.now = t;
      if (t_int <= t_ext) {
        discarded.clear();
        root_->step(discarded);
      } else {
        const auto& ev = scenario.events[next++];
        root_->deliver(ev.port, ev.value);
      }
    }
  } catch (const RuntimeViolation& v) {
    abort(format_violation(v.violation()), v.violation());
  } catch (const EvalError& e) {
    abort(std::string("evaluation failed: ") + e.what(), std::nullopt);
  } catch (const UnhandledInput& u) {
    abort(u.message, std::nullopt);
  }
  return std::move(rs.trace);
}

Trace run(const ValidatedModel& model, BackendKind backend, const Scenario& scenario, RunOptions options) {
  Simulator sim(model, backend, options);
  return sim.run(scenario);
}

std::string select_imminent(const CoupledModel& c, const std::vector<std::string>& imminents) {
  auto pick = [&](const std::string& name) {
    return std::find(imminents.begin(), imminents.end(), name) != imminents.end();
  };
  if (c.select.empty()) {
    for (const auto& s : c.submodels) {
      if (pick(s.instance)) return s.instance;
    }
  }
  for (const auto& s : c.select) {
    if (pick(s)) return s;
  }
  throw std::invalid_argument("no imminent instance belongs to `" + c.name + "`");
}

}  // namespace devsim
