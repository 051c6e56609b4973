// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "devsim/bench.hpp"
#include "devsim/models.hpp"
#include "devsim/simulator.hpp"
#include "devsim/validator.hpp"
#include "support/transitions.hpp"

using namespace devsim;

namespace {

// Empty on success, otherwise the reason for failing.
using Check = std::function<std::string()>;

std::string body(const Trace& t) {
  std::ostringstream out;
  write_trace(out, t, false);
  return out.str();
}

std::string rules_text(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) out += std::string(out.empty() ? "" : ",") + std::string(rule_name(v.rule));
  return out.empty() ? "none" : out;
}

std::string cross_backend_equivalence() {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    BenchConfig cfg;
    cfg.states = 2 + static_cast<int>(rng() % 4);
    cfg.events = 2 + static_cast<int>(rng() % 9);
    cfg.seed = rng();
    cfg.length = 100;
    const auto model = ValidatedModel::check(gen_random(cfg));
    const Scenario s = gen_scenario(cfg);
    const std::string reference = body(run(model, kAllBackends[0], s));
    for (auto kind : kAllBackends) {
      if (body(run(model, kind, s)) != reference) {
        return "model " + std::to_string(i) + " (seed " + std::to_string(cfg.seed) + "): " +
               std::string(backend_name(kind)) + " diverges";
      }
    }
  }
  return {};
}

std::string benchmark_ordering() {
  const BenchReport r = run_bench(BenchConfig{});
  std::string medians;
  for (const auto& t : r.timings) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %s=%.3fms", std::string(backend_name(t.backend)).c_str(), t.median_ms);
    medians += buf;
  }
  if (!r.equivalent) return "backends disagree";
  for (std::size_t i = 1; i < r.timings.size(); ++i) {
    if (r.timings[i - 1].median_ms > r.timings[i].median_ms) return "medians out of order:" + medians;
  }
  std::printf("  medians:%s\n", medians.c_str());
  return {};
}

std::string rule_suite() {
  const std::pair<const char*, RuleId> bad[] = {
      {"bad_r1", RuleId::R1}, {"bad_r2", RuleId::R2}, {"bad_r3", RuleId::R3},
      {"bad_r4", RuleId::R4}, {"bad_r5", RuleId::R5},
  };
  for (const auto& [name, rule] : bad) {
    const auto vs = validate_model(load_builtin(name));
    if (vs.size() != 1 || vs[0].rule != rule) {
      return std::string(name) + " reported " + rules_text(vs) + ", expected " + std::string(rule_name(rule));
    }
  }
  for (const char* name : {"counter", "lamp_static", "lamp_variable", "pacman", "pipeline"}) {
    const auto vs = validate_model(load_builtin(name));
    if (!vs.empty()) return std::string(name) + " reported " + rules_text(vs);
  }
  return {};
}

std::string counter_oracle() {
  // Hand simulation with alpha = 2: the second inc restarts the lifetime.
  const std::string expected =
      R"({"t":1.0,"path":"root","kind":"ext","from":"ZERO","to":"POS","vars":{"n":1}})"
      "\n"
      R"({"t":1.5,"path":"root","kind":"ext","from":"POS","to":"POS","vars":{"n":2}})"
      "\n"
      R"({"t":3.5,"path":"root","kind":"out","port":"out","value":2})"
      "\n"
      R"({"t":3.5,"path":"root","kind":"int","from":"POS","to":"POS","vars":{"n":1}})"
      "\n"
      R"({"t":5.5,"path":"root","kind":"out","port":"out","value":1})"
      "\n"
      R"({"t":5.5,"path":"root","kind":"int","from":"POS","to":"ZERO","vars":{"n":0}})"
      "\n";
  const auto model = ValidatedModel::check(load_builtin("counter").with_param("alpha", 2.0));
  Scenario s;
  s.events = parse_inline_scenario("inc@1,inc@1.5");
  for (auto kind : kAllBackends) {
    const std::string got = body(run(model, kind, s));
    if (got != expected) return std::string(backend_name(kind)) + " produced:\n" + got;
  }
  return {};
}

std::string lamp_reuse() {
  const auto d = testing::transition_delta(load_builtin("lamp_static").atomic().behavior,
                                           load_builtin("lamp_variable").atomic().behavior);
  using K = testing::TransitionKey;
  const std::string tick(kInternalTrigger);
  const std::vector<K> added = {{TransitionKind::internal, "LightDecrease", tick},
                                {TransitionKind::internal, "LightProgress", tick}};
  const std::vector<std::tuple<K, std::string, std::string>> retargeted = {
      {{TransitionKind::external, "LightOff", "on"}, "LightOn", "LightProgress"},
      {{TransitionKind::external, "LightOn", "off"}, "LightOff", "LightDecrease"},
  };
  if (d.added != added) return "added transitions differ";
  if (!d.removed.empty()) return "transitions were removed";
  if (d.retargeted != retargeted) return "retargeted transitions differ";
  return {};
}

std::string expect_abort(const char* name, const char* scenario, RuleId rule) {
  Scenario s;
  s.events = parse_inline_scenario(scenario);
  const auto model = ValidatedModel::check(load_builtin(name));
  for (auto kind : kAllBackends) {
    try {
      run(model, kind, s);
      return std::string(name) + " ran to completion on " + std::string(backend_name(kind));
    } catch (const SimulationAborted& e) {
      if (!e.violation() || e.violation()->rule != rule) {
        return std::string(name) + " aborted with `" + e.what() + "`";
      }
    }
  }
  return {};
}

std::string runtime_contracts() {
  if (auto r = expect_abort("neg_lifetime", "tick@0,tick@5", RuleId::R5); !r.empty()) return r;
  if (auto r = expect_abort("overlap_guards", "go@1", RuleId::RD); !r.empty()) return r;
  const auto counter = ValidatedModel::check(load_builtin("counter"));
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    Scenario s;
    double t = 0.0;
    const int count = 1 + static_cast<int>(rng() % 40);
    for (int k = 0; k < count; ++k) {
      t += static_cast<double>(rng() % 17) * 0.25;
      s.events.push_back({"inc", t, std::int64_t{1}});
    }
    try {
      const Trace trace = run(counter, kAllBackends[static_cast<std::size_t>(i) % kAllBackends.size()], s);
      for (const auto& e : trace.entries) {
        if (e.kind != EntryKind::out && std::get<std::int64_t>(e.vars[0].second) < 0) {
          return "negative n in fuzzed scenario " + std::to_string(i);
        }
      }
    } catch (const SimulationAborted& e) {
      return "fuzzed scenario " + std::to_string(i) + " aborted: " + e.what();
    }
  }
  return {};
}

std::string closure_under_coupling() {
  const auto nested = ValidatedModel::check(load_builtin("pipeline"));
  const auto flat = ValidatedModel::check(load_builtin("pipeline_flat"));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Scenario s;
    double t = 0.0;
    for (int k = 0; k < 8; ++k) {
      t += static_cast<double>(rng() % 12) * 0.5;
      s.events.push_back({"trig", t, std::int64_t{1}});
    }
    const auto kind = kAllBackends[static_cast<std::size_t>(i) % kAllBackends.size()];
    Trace a = run(nested, kind, s);
    for (auto& e : a.entries) {
      if (e.path == "root.src.g") e.path = "root.g";
    }
    const Trace b = run(flat, kind, s);
    if (auto d = diff_traces(a, b)) return "scenario " + std::to_string(i) + ": " + format_diff(*d);
  }
  return {};
}

}  // namespace

int main() {
  const std::pair<const char*, Check> criteria[] = {
      {"1 cross-backend equivalence on 200 random models", cross_backend_equivalence},
      {"2 benchmark median ordering", benchmark_ordering},
      {"3 consistency rule fixtures", rule_suite},
      {"4 counter oracle on every backend", counter_oracle},
      {"5 lamp reuse structure", lamp_reuse},
      {"6 runtime contracts", runtime_contracts},
      {"7 hierarchical pipeline equals flattened pipeline", closure_under_coupling},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      reason = check();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (reason.empty()) {
      std::printf("PASS %s (%.2fs)\n", name, secs);
    } else {
      ++failed;
      std::printf("FAIL %s (%.2fs): %s\n", name, secs, reason.c_str());
    }
  }
  return failed == 0 ? 0 : 1;
}
