#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "devsim/core.hpp"

namespace devsim {

inline constexpr std::uint64_t kDefaultEventBudget = 1'000'000;

// One input event addressed to a root inport.
struct EventInstance {
  std::string port;
  double time = 0.0;
  Value value{std::int64_t{1}};

  bool operator==(const EventInstance&) const = default;
};

struct Scenario {
  std::vector<EventInstance> events;
  double until = std::numeric_limits<double>::infinity();
  // Maximum number of transitions and input deliveries before the run stops.
  std::uint64_t budget = kDefaultEventBudget;
};

// Malformed scenario text or a scenario that does not fit the model.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `inc@1,inc@1.5 2,mode@3 'fast'`. A missing value means the integer 1.
std::vector<EventInstance> parse_inline_scenario(std::string_view text);

// One `event@time [value]` per line; blank lines and `#` comments are skipped.
std::vector<EventInstance> parse_scenario_text(std::string_view text);

std::string to_inline(std::span<const EventInstance> events);
std::string to_scenario_text(std::span<const EventInstance> events);

// Throws ScenarioError unless times are finite, non-negative and sorted, and
// every event names a root inport whose type accepts the value.
void check_scenario(const Scenario& scenario, std::span<const Port> inports);

// Budget from DEVSIM_EVENT_BUDGET, or kDefaultEventBudget when unset.
// Throws ScenarioError for a value that is not a positive integer.
std::uint64_t event_budget_from_env();

// FNV-1a over the canonical inline form and the end time.
std::uint64_t scenario_digest(const Scenario& scenario);

}  // namespace devsim
