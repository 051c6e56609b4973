#include "devsim/bench.hpp"

#include <alloca.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "devsim/simulator.hpp"
#include "devsim/validator.hpp"

namespace devsim {

namespace {

void in_range(const char* field, long long v, long long lo, long long hi) {
  if (v < lo || v > hi) {
    throw std::invalid_argument(std::string(field) + " must be in " + std::to_string(lo) + ".." + std::to_string(hi) +
                                ", got " + std::to_string(v));
  }
}

constexpr int kRunsPerSample = 3;

// Runs `f` with the stack moved down by `bytes`. Timings depend on where the
// stack sits relative to the heap, and that offset is fixed for a process.
template <typename F>
auto with_stack_offset(std::size_t bytes, F&& f) {
  volatile char* pad = static_cast<char*>(alloca(bytes + 1));
  pad[0] = 0;
  return f();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void check_config(const BenchConfig& cfg) {
  if (cfg.unsafe_ranges) {
    in_range("states", cfg.states, 1, 1'000'000);
    in_range("events", cfg.events, 1, 1'000'000);
  } else {
    in_range("states", cfg.states, 2, 5);
    in_range("events", cfg.events, 2, 10);
  }
  in_range("repetitions", cfg.repetitions, 1, 1'000'000);
}

ModelDef gen_random(const BenchConfig& cfg) {
  check_config(cfg);
  std::mt19937_64 rng(cfg.seed);
  const auto n = static_cast<std::uint32_t>(cfg.states);
  const auto m = static_cast<std::uint32_t>(cfg.events);

  BehaviorSpec spec;
  spec.name = "random";
  std::vector<Port> inports;
  for (std::uint32_t i = 0; i < n; ++i) spec.phases.push_back({"P" + std::to_string(i), std::nullopt});
  for (std::uint32_t j = 0; j < m; ++j) {
    spec.inputs.push_back("E" + std::to_string(j));
    inports.push_back({spec.inputs.back(), Direction::in, PortType::integer()});
  }
  spec.initial = PhaseId{0};
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < m; ++j) {
      TransitionDef t;
      t.kind = TransitionKind::external;
      t.source_id = PhaseId{i};
      t.target_id = PhaseId{static_cast<std::uint32_t>(rng() % n)};
      t.trigger_id = InputId{j};
      t.source = spec.phases[i].name;
      t.target = spec.phases[t.target_id.value].name;
      t.trigger = spec.inputs[j];
      spec.transitions.push_back(std::move(t));
    }
  }
  auto model = std::make_shared<const AtomicModel>(build_atomic("random", std::move(inports), {}, std::move(spec)));
  return ModelDef{model};
}

Scenario gen_scenario(const BenchConfig& cfg) {
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  Scenario s;
  s.events.reserve(cfg.length);
  const auto m = static_cast<std::uint64_t>(cfg.events);
  for (std::size_t i = 0; i < cfg.length; ++i) {
    s.events.push_back({"E" + std::to_string(rng() % m), static_cast<double>(i + 1), std::int64_t{1}});
  }
  s.budget = std::max<std::uint64_t>(kDefaultEventBudget, cfg.length + 1);
  return s;
}

BackendTiming summarize(BackendKind backend, std::vector<double> samples_ms) {
  BackendTiming t;
  t.backend = backend;
  t.samples_ms = std::move(samples_ms);
  if (t.samples_ms.empty()) return t;
  std::vector<double> sorted = t.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  t.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(k);
  t.median_ms = k % 2 == 1 ? sorted[k / 2] : (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0;
  t.min_ms = sorted.front();
  return t;
}

BenchReport run_bench(const BenchConfig& cfg) {
  const ValidatedModel model = ValidatedModel::check(gen_random(cfg));
  const Scenario scenario = gen_scenario(cfg);

  BenchReport report;
  report.config = cfg;

  std::optional<Trace> reference;
  for (auto kind : kAllBackends) {
    Simulator sim(model, kind);
    Trace trace = sim.run(scenario);
    if (!reference) {
      reference = std::move(trace);
      continue;
    }
    if (auto d = diff_traces(*reference, trace)) {
      throw BenchFailure(std::string(backend_name(kind)) + " disagrees with " +
                         std::string(backend_name(reference->header.backend)) + ": " + format_diff(*d));
    }
  }
  report.equivalent = true;
  report.trace_entries = reference->entries.size();

  std::vector<Simulator> sims;
  std::vector<PreparedScenario> prepared;
  for (auto kind : kAllBackends) {
    sims.emplace_back(model, kind, RunOptions{false, false});
    prepared.push_back(sims.back().prepare(scenario));
  }
  using clock = std::chrono::steady_clock;
  auto time_once = [&](std::size_t b) {
    const auto start = clock::now();
    sims[b].run(prepared[b]);
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };
  for (std::size_t b = 0; b < sims.size(); ++b) time_once(b);

  // A sample is the fastest of a few runs. The runs of one repetition are
  // interleaved across backends and the order rotates between repetitions,
  // so a burst of load on the machine hits every backend alike. Each
  // repetition also runs at a different stack offset.
  std::vector<std::vector<double>> samples(sims.size());
  std::vector<double> best(sims.size());
  for (int r = 0; r < cfg.repetitions; ++r) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (int k = 0; k < kRunsPerSample; ++k) {
      for (std::size_t i = 0; i < sims.size(); ++i) {
        const std::size_t b = (i + static_cast<std::size_t>(r + k)) % sims.size();
        const std::size_t offset = static_cast<std::size_t>(r) * 272 % 4096;
        best[b] = std::min(best[b], with_stack_offset(offset, [&] { return time_once(b); }));
      }
    }
    for (std::size_t b = 0; b < sims.size(); ++b) samples[b].push_back(best[b]);
  }
  for (std::size_t b = 0; b < sims.size(); ++b) report.timings.push_back(summarize(kAllBackends[b], samples[b]));
  return report;
}

std::string format_report(const BenchReport& report) {
  const auto& c = report.config;
  std::string out = "states=" + std::to_string(c.states) + " events=" + std::to_string(c.events) +
                    " seed=" + std::to_string(c.seed) + " reps=" + std::to_string(c.repetitions) +
                    " len=" + std::to_string(c.length) + "\n";
  out += std::string("equivalence: ") + (report.equivalent ? "ok" : "FAILED") + " (" +
         std::to_string(report.trace_entries) + " entries)\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-24s %12s %12s %12s\n", "backend", "mean_ms", "median_ms", "min_ms");
  out += line;
  for (const auto& t : report.timings) {
    std::snprintf(line, sizeof line, "%-24s %12s %12s %12s\n", std::string(backend_name(t.backend)).c_str(),
                  fixed(t.mean_ms, 3).c_str(), fixed(t.median_ms, 3).c_str(), fixed(t.min_ms, 3).c_str());
    out += line;
  }
  return out;
}

std::string report_json(const BenchReport& report) {
  nlohmann::ordered_json j;
  const auto& c = report.config;
  j["config"] = {{"states", c.states},       {"events", c.events}, {"seed", c.seed},
                 {"repetitions", c.repetitions}, {"length", c.length}, {"unsafe_ranges", c.unsafe_ranges}};
  j["equivalent"] = report.equivalent;
  j["trace_entries"] = report.trace_entries;
  j["backends"] = nlohmann::ordered_json::array();
  for (const auto& t : report.timings) {
    j["backends"].push_back({{"backend", backend_name(t.backend)},
                             {"mean_ms", t.mean_ms},
                             {"median_ms", t.median_ms},
                             {"min_ms", t.min_ms},
                             {"samples_ms", t.samples_ms}});
  }
  return j.dump(2);
}

}  // namespace devsim
