#include "devsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace devsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view item, const std::string& why) {
  throw ScenarioError("bad scenario event `" + std::string(item) + "`: " + why);
}

Value parse_value(std::string_view text, std::string_view item) {
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.size() >= 2 && text.front() == '\'' && text.back() == '\'') return Label(text.substr(1, text.size() - 2));
  const char* end = text.data() + text.size();
  if (text.find_first_of(".eE") == std::string_view::npos && text != "inf" && text != "-inf") {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(text.data(), end, i);
    if (ec == std::errc() && p == end) return i;
  } else {
    double d = 0;
    auto [p, ec] = std::from_chars(text.data(), end, d);
    if (ec == std::errc() && p == end) return d;
  }
  fail(item, "cannot read value `" + std::string(text) + "`");
}

EventInstance parse_event(std::string_view item) {
  item = trim(item);
  const auto at = item.find('@');
  if (at == std::string_view::npos || at == 0) fail(item, "expected event@time");
  EventInstance ev;
  ev.port = std::string(trim(item.substr(0, at)));
  std::string_view rest = trim(item.substr(at + 1));
  const auto space = rest.find_first_of(" \t");
  std::string_view time = rest.substr(0, space);
  double t = 0;
  auto [p, ec] = std::from_chars(time.data(), time.data() + time.size(), t);
  if (ec != std::errc() || p != time.data() + time.size()) fail(item, "cannot read time `" + std::string(time) + "`");
  ev.time = t;
  if (space != std::string_view::npos) ev.value = parse_value(trim(rest.substr(space)), item);
  return ev;
}

std::string format_event(const EventInstance& ev) {
  std::string out = ev.port + "@" + format_real(ev.time);
  if (ev.value != Value{std::int64_t{1}}) out += " " + format_value(ev.value);
  return out;
}

}  // namespace

std::vector<EventInstance> parse_inline_scenario(std::string_view text) {
  std::vector<EventInstance> events;
  if (trim(text).empty()) return events;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    events.push_back(parse_event(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return events;
}

std::vector<EventInstance> parse_scenario_text(std::string_view text) {
  std::vector<EventInstance> events;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!trim(line).empty()) events.push_back(parse_event(line));
    start = nl + 1;
  }
  return events;
}

std::string to_inline(std::span<const EventInstance> events) {
  std::string out;
  for (const auto& ev : events) {
    if (!out.empty()) out += ',';
    out += format_event(ev);
  }
  return out;
}

std::string to_scenario_text(std::span<const EventInstance> events) {
  std::string out;
  for (const auto& ev : events) out += format_event(ev) + "\n";
  return out;
}

void check_scenario(const Scenario& scenario, std::span<const Port> inports) {
  if (std::isnan(scenario.until) || scenario.until < 0) throw ScenarioError("end time must be >= 0");
  if (scenario.budget == 0) throw ScenarioError("event budget must be positive");
  double last = 0.0;
  for (const auto& ev : scenario.events) {
    const std::string item = format_event(ev);
    if (!std::isfinite(ev.time) || ev.time < 0) fail(item, "time must be finite and >= 0");
    if (ev.time < last) fail(item, "times must be non-decreasing");
    last = ev.time;
    const Port* port = find_port(inports, ev.port);
    if (port == nullptr) fail(item, "the model has no inport `" + ev.port + "`");
    if (!port_accepts(*port, ev.value)) fail(item, "inport `" + ev.port + "` has type " + to_string(port->type));
  }
}

std::uint64_t event_budget_from_env() {
  const char* raw = std::getenv("DEVSIM_EVENT_BUDGET");
  if (raw == nullptr || *raw == '\0') return kDefaultEventBudget;
  std::string_view text(raw);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || v == 0) {
    throw ScenarioError("DEVSIM_EVENT_BUDGET must be a positive integer, got `" + std::string(text) + "`");
  }
  return v;
}

std::uint64_t scenario_digest(const Scenario& scenario) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(to_inline(scenario.events));
  mix("|");
  mix(format_real(scenario.until));
  return h;
}

}  // namespace devsim
