#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "devsim/mdl.hpp"
#include "devsim/models.hpp"
#include "devsim/simulator.hpp"

using namespace devsim;

namespace {

ValidatedModel builtin(std::string_view name) { return ValidatedModel::check(load_builtin(name)); }

Scenario scenario(std::string_view inline_events, double until = std::numeric_limits<double>::infinity()) {
  Scenario s;
  s.events = parse_inline_scenario(inline_events);
  s.until = until;
  return s;
}

TraceEntry transition(double t, std::string path, EntryKind kind, std::string from, std::string to,
                      std::vector<std::pair<std::string, Value>> vars) {
  TraceEntry e;
  e.time = t;
  e.path = std::move(path);
  e.kind = kind;
  e.from = std::move(from);
  e.to = std::move(to);
  e.vars = std::move(vars);
  return e;
}

TraceEntry output(double t, std::string path, std::string port, Value v) {
  TraceEntry e;
  e.time = t;
  e.path = std::move(path);
  e.kind = EntryKind::out;
  e.port = std::move(port);
  e.value = v;
  return e;
}

Value n(std::int64_t v) { return v; }

Scenario fuzz(std::uint64_t seed, std::string_view port, int count) {
  std::mt19937_64 rng(seed);
  Scenario s;
  double t = 0.0;
  for (int i = 0; i < count; ++i) {
    t += static_cast<double>(rng() % 13) * 0.25;
    s.events.push_back({std::string(port), t, std::int64_t{1}});
  }
  return s;
}

void check_trace_invariants(const Trace& trace) {
  double last = 0.0;
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const auto& e = trace.entries[i];
    CHECK(e.time >= last);
    last = e.time;
    if (e.kind != EntryKind::out) continue;
    REQUIRE(i + 1 < trace.entries.size());
    const auto& next = trace.entries[i + 1];
    CHECK(next.kind == EntryKind::internal);
    CHECK(next.time == e.time);
    CHECK(next.path == e.path);
  }
}

}  // namespace

TEST_CASE("counter run with one increment") {
  const Trace t = run(builtin("counter"), BackendKind::conditional, scenario("inc@1", 10.0));
  const std::vector<TraceEntry> expected = {
      transition(1.0, "root", EntryKind::ext, "ZERO", "POS", {{"n", n(1)}}),
      output(3.0, "root", "out", n(1)),
      transition(3.0, "root", EntryKind::internal, "POS", "ZERO", {{"n", n(0)}}),
  };
  CHECK(t.entries == expected);
  CHECK(t.termination == Termination::quiescent);
  CHECK(t.header.model == "counter");
  CHECK(t.header.backend == BackendKind::conditional);
}

TEST_CASE("counter run with two increments") {
  // Second inc at 1.5 restarts the lifetime, so the first decrement lands at 3.5.
  const Trace t = run(builtin("counter"), BackendKind::state, scenario("inc@1,inc@1.5"));
  const std::vector<TraceEntry> expected = {
      transition(1.0, "root", EntryKind::ext, "ZERO", "POS", {{"n", n(1)}}),
      transition(1.5, "root", EntryKind::ext, "POS", "POS", {{"n", n(2)}}),
      output(3.5, "root", "out", n(2)),
      transition(3.5, "root", EntryKind::internal, "POS", "POS", {{"n", n(1)}}),
      output(5.5, "root", "out", n(1)),
      transition(5.5, "root", EntryKind::internal, "POS", "ZERO", {{"n", n(0)}}),
  };
  CHECK(t.entries == expected);
}

TEST_CASE("lamp_static run") {
  const Trace t = run(builtin("lamp_static"), BackendKind::state_event, scenario("on@1,off@4"));
  REQUIRE(t.entries.size() == 2);
  CHECK(t.entries[0] == transition(1.0, "root", EntryKind::ext, "LightOff", "LightOn", {}));
  CHECK(t.entries[1] == transition(4.0, "root", EntryKind::ext, "LightOn", "LightOff", {}));
}

TEST_CASE("empty scenario on a passive model terminates at once") {
  const Trace t = run(builtin("lamp_static"), BackendKind::conditional, Scenario{});
  CHECK(t.entries.empty());
  CHECK(t.termination == Termination::quiescent);
}

TEST_CASE("end time stops the run") {
  const Trace t = run(builtin("counter"), BackendKind::conditional, scenario("inc@1", 2.0));
  CHECK(t.entries.size() == 1);
  CHECK(t.termination == Termination::end_time);
}

TEST_CASE("event budget stops the run") {
  Scenario s = scenario("inc@1,inc@2,inc@3");
  s.budget = 2;
  const Trace t = run(builtin("counter"), BackendKind::conditional, s);
  CHECK(t.entries.size() == 2);
  CHECK(t.termination == Termination::budget);
}

TEST_CASE("input at a deadline is delivered after the internal step") {
  const Trace t = run(builtin("counter"), BackendKind::conditional, scenario("inc@1,inc@3"));
  REQUIRE(t.entries.size() >= 4);
  CHECK(t.entries[1].kind == EntryKind::out);
  CHECK(t.entries[2] == transition(3.0, "root", EntryKind::internal, "POS", "ZERO", {{"n", n(0)}}));
  CHECK(t.entries[3] == transition(3.0, "root", EntryKind::ext, "ZERO", "POS", {{"n", n(1)}}));
}

TEST_CASE("hierarchical pipeline routes through both levels") {
  const Trace t = run(builtin("pipeline"), BackendKind::conditional, scenario("trig@1"));
  REQUIRE(t.entries.size() >= 4);
  CHECK(t.entries[0].path == "root.src.g");
  CHECK(t.entries[1] == output(2.0, "root.src.g", "out", n(1)));
  CHECK(t.entries[2].path == "root.src.g");
  CHECK(t.entries[3] == transition(2.0, "root.c", EntryKind::ext, "ZERO", "POS", {{"n", n(1)}}));
  check_trace_invariants(t);
}

TEST_CASE("select_imminent follows the priority list") {
  CoupledModel c;
  c.name = "top";
  c.submodels = {{"g", "generator", std::nullopt}, {"c", "counter", std::nullopt}};
  c.select = {"g", "c"};
  CHECK(select_imminent(c, {"c"}) == "c");
  CHECK(select_imminent(c, {"g", "c"}) == "g");
  CHECK(select_imminent(c, {"c", "g"}) == "g");
  CHECK_THROWS_AS(select_imminent(c, {"x"}), std::invalid_argument);

  CoupledModel d;
  d.name = "top";
  d.submodels = {{"a", "m", std::nullopt}, {"b", "m", std::nullopt}, {"c", "m", std::nullopt}};
  CHECK(select_imminent(d, {"c", "b"}) == "b");
}

TEST_CASE("diff_traces") {
  const auto model = builtin("counter");
  const Scenario s = scenario("inc@1,inc@1.5,inc@2");
  const Trace a = run(model, BackendKind::conditional, s);
  const Trace b = run(model, BackendKind::state_event, s);
  CHECK_FALSE(diff_traces(a, b).has_value());
  CHECK_FALSE(diff_traces(a, a).has_value());

  Trace changed = a;
  REQUIRE(changed.entries.size() > 2);
  changed.entries[2].to = "ZERO";
  const auto d = diff_traces(a, changed);
  REQUIRE(d.has_value());
  CHECK(d->index == 2);
  CHECK(d->left == to_json_line(a.entries[2]));
  CHECK(d->right == to_json_line(changed.entries[2]));

  Trace shorter = a;
  shorter.entries.pop_back();
  const auto e = diff_traces(a, shorter);
  REQUIRE(e.has_value());
  CHECK(e->index == shorter.entries.size());
  CHECK_FALSE(e->right.has_value());
}

TEST_CASE("trace lines are stable JSON") {
  const Trace t = run(builtin("counter"), BackendKind::conditional, scenario("inc@1", 10.0));
  REQUIRE(t.entries.size() == 3);
  CHECK(to_json_line(t.entries[0]) == R"({"t":1.0,"path":"root","kind":"ext","from":"ZERO","to":"POS","vars":{"n":1}})");
  CHECK(to_json_line(t.entries[1]) == R"({"t":3.0,"path":"root","kind":"out","port":"out","value":1})");
  CHECK(to_json_line(t.entries[2]) == R"({"t":3.0,"path":"root","kind":"int","from":"POS","to":"ZERO","vars":{"n":0}})");

  std::stringstream io;
  write_trace(io, t, true);
  const auto lines = read_trace_lines(io);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == to_json_line(t.entries[1]));
  CHECK(header_line(t.header).rfind(R"({"header":{"model":"counter","backend":"conditional")", 0) == 0);
}

TEST_CASE("strict inputs reject unhandled events") {
  const auto model = builtin("lamp_static");
  const Scenario s = scenario("on@1,on@2");
  CHECK(run(model, BackendKind::conditional, s).entries.size() == 1);
  try {
    run(model, BackendKind::conditional, s, RunOptions{.strict_inputs = true});
    FAIL("expected abort");
  } catch (const SimulationAborted& e) {
    CHECK_FALSE(e.violation().has_value());
    CHECK(e.partial().entries.size() == 1);
  }
}

TEST_CASE("aborts carry the partial trace and the offending entry") {
  const auto model = builtin("neg_lifetime");
  for (auto kind : kAllBackends) {
    CAPTURE(backend_name(kind));
    try {
      run(model, kind, scenario("tick@0,tick@5"));
      FAIL("expected R5");
    } catch (const SimulationAborted& e) {
      REQUIRE(e.violation().has_value());
      CHECK(e.violation()->rule == RuleId::R5);
      CHECK(e.violation()->location == "root/RUN");
      CHECK(e.partial().entries.size() == 2);
      REQUIRE(e.offending().has_value());
      CHECK(e.offending()->time == 5.0);
      CHECK(e.offending()->to == "RUN");
    }
  }
}

TEST_CASE("falsified invariant aborts with RI") {
  const auto model = ValidatedModel::check(parse_model(
      "atomic m\ninport go\nvar n = 0\nphase A lifetime inf\ninit A\next A --go--> A action n = n - 1\n"
      "invariant n >= 0\n"));
  try {
    run(model, BackendKind::state, scenario("go@2"));
    FAIL("expected RI");
  } catch (const SimulationAborted& e) {
    REQUIRE(e.violation().has_value());
    CHECK(e.violation()->rule == RuleId::RI);
    CHECK(e.partial().entries.empty());
    REQUIRE(e.offending().has_value());
    CHECK(e.offending()->vars == std::vector<std::pair<std::string, Value>>{{"n", n(-1)}});
  }

  const auto initial = ValidatedModel::check(
      parse_model("atomic m\ninport go\nvar n = 0\nphase A lifetime inf\ninit A\ninvariant n < 0\n"));
  CHECK_THROWS_AS(run(initial, BackendKind::state, Scenario{}), SimulationAborted);
}

TEST_CASE("prepare rejects scenarios that do not fit") {
  Simulator sim(builtin("counter"), BackendKind::conditional);
  CHECK_THROWS_AS(sim.prepare(scenario("dec@1")), ScenarioError);
  CHECK_THROWS_AS(sim.prepare(scenario("inc@2,inc@1")), ScenarioError);
  CHECK_THROWS_AS(sim.prepare(scenario("inc@1 2.5")), ScenarioError);
  const PreparedScenario p = sim.prepare(scenario("inc@1,inc@2"));
  CHECK(p.events.size() == 2);
  CHECK(sim.run(p).entries == sim.run(p).entries);
}

TEST_CASE("scenario text forms round trip") {
  const auto events = parse_inline_scenario("inc@1,inc@1.5 2,mode@3 'fast'");
  REQUIRE(events.size() == 3);
  CHECK(events[0].value == Value{std::int64_t{1}});
  CHECK(events[1].value == Value{std::int64_t{2}});
  CHECK(events[2].value == Value{Label("fast")});
  CHECK(parse_scenario_text(to_scenario_text(events)) == events);
  CHECK(parse_inline_scenario(to_inline(events)) == events);
  CHECK(parse_scenario_text("# comment\n\ninc@1\ninc@2 3\n") == parse_inline_scenario("inc@1,inc@2 3"));
  CHECK_THROWS_AS(parse_inline_scenario("inc"), ScenarioError);
  CHECK_THROWS_AS(parse_inline_scenario("inc@x"), ScenarioError);
}

TEST_CASE("property: random scenario text survives both forms") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    std::vector<EventInstance> events;
    double t = 0.0;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i) {
      t += static_cast<double>(rng() % 100) / 8.0;
      Value v = std::int64_t{1};
      if (rng() % 3 == 0) v = static_cast<std::int64_t>(rng() % 50) - 25;
      if (rng() % 4 == 0) v = static_cast<double>(rng() % 1000) / 16.0;
      events.push_back({"p" + std::to_string(rng() % 3), t, v});
    }
    CHECK(parse_inline_scenario(to_inline(events)) == events);
    CHECK(parse_scenario_text(to_scenario_text(events)) == events);
  }
}

TEST_CASE("event budget from the environment") {
  ::unsetenv("DEVSIM_EVENT_BUDGET");
  CHECK(event_budget_from_env() == kDefaultEventBudget);
  ::setenv("DEVSIM_EVENT_BUDGET", "25", 1);
  CHECK(event_budget_from_env() == 25);
  ::setenv("DEVSIM_EVENT_BUDGET", "-3", 1);
  CHECK_THROWS_AS(event_budget_from_env(), ScenarioError);
  ::unsetenv("DEVSIM_EVENT_BUDGET");
}

TEST_CASE("property: clock order and output pairing on fuzzed runs") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    CAPTURE(seed);
    check_trace_invariants(run(builtin("counter"), BackendKind::conditional, fuzz(seed, "inc", 30)));
    check_trace_invariants(run(builtin("pipeline"), BackendKind::state, fuzz(seed, "trig", 10)));
  }
}

TEST_CASE("property: elapsed time seen by external transitions stays within the lifetime") {
  const auto model = ValidatedModel::check(parse_model(
      "atomic m\ninport go\nvar seen = 0.0\nphase A lifetime 1.0\ninit A\n"
      "ext A --go--> A action seen = e\nint A --> A\n"));
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Trace t = run(model, BackendKind::state_event_transition, fuzz(seed, "go", 40));
    for (const auto& e : t.entries) {
      if (e.kind != EntryKind::ext) continue;
      const double seen = as_real(e.vars[0].second);
      CHECK(seen >= 0.0);
      CHECK(seen <= 1.0);
    }
  }
}

TEST_CASE("unrecorded runs still terminate the same way") {
  Simulator sim(builtin("counter"), BackendKind::conditional, RunOptions{.strict_inputs = false, .record = false});
  const Trace t = sim.run(scenario("inc@1", 2.0));
  CHECK(t.entries.empty());
  CHECK(t.termination == Termination::end_time);
}
