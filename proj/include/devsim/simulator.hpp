#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "devsim/backend.hpp"
#include "devsim/scenario.hpp"
#include "devsim/trace.hpp"
#include "devsim/validator.hpp"

namespace devsim {

struct RunOptions {
  // Abort when an input event finds no transition instead of ignoring it.
  bool strict_inputs = false;
  // When false the run keeps no entries; aborts and termination still work.
  bool record = true;
};

// A run stopped on a broken runtime contract (RD, R4, R5, RI, RP), a failed
// expression, or an unhandled input under strict_inputs.
class SimulationAborted : public std::runtime_error {
 public:
  SimulationAborted(std::string message, std::optional<Violation> violation, Trace partial,
                    std::optional<TraceEntry> offending);

  const std::optional<Violation>& violation() const noexcept { return violation_; }
  // Entries completed before the fault.
  const Trace& partial() const noexcept { return partial_; }
  // The transition whose result broke the contract, when there is one.
  const std::optional<TraceEntry>& offending() const noexcept { return offending_; }

 private:
  std::optional<Violation> violation_;
  Trace partial_;
  std::optional<TraceEntry> offending_;
};

// Scenario with ports resolved to root inport indices.
struct PreparedScenario {
  struct Event {
    double time;
    std::uint32_t port;
    Value value;
  };
  std::vector<Event> events;
  double until;
  std::uint64_t budget;
  std::uint64_t digest;
};

class Node;
struct RunState;

// Simulator tree for one model: a simulator per atomic model, a coordinator
// per coupled model and a root loop that owns the clock. One instance runs
// one simulation at a time; separate instances share nothing mutable.
class Simulator {
 public:
  Simulator(const ValidatedModel& model, BackendKind backend, RunOptions options = {});
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  // Throws ScenarioError when the scenario does not fit the root inports.
  PreparedScenario prepare(const Scenario& scenario) const;

  // Starts from the initial state every time.
  Trace run(const PreparedScenario& scenario);
  Trace run(const Scenario& scenario) { return run(prepare(scenario)); }

  BackendKind backend() const noexcept { return backend_; }

 private:
  ModelDef model_;
  BackendKind backend_;
  RunOptions options_;
  std::unique_ptr<RunState> state_;
  std::unique_ptr<Node> root_;
};

Trace run(const ValidatedModel& model, BackendKind backend, const Scenario& scenario, RunOptions options = {});

// The imminent instance that comes first in c.select.
// Throws std::invalid_argument when none of `imminents` is in c.select.
std::string select_imminent(const CoupledModel& c, const std::vector<std::string>& imminents);

}  // namespace devsim
