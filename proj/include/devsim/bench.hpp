#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "devsim/backend.hpp"
#include "devsim/scenario.hpp"
#include "devsim/trace.hpp"

namespace devsim {

struct BenchConfig {
  int states = 5;
  int events = 10;
  std::uint64_t seed = 1;
  int repetitions = 51;
  // Number of input events driven through the model per run.
  std::size_t length = 10'000;
  // Allows states and events outside 2..5 and 2..10.
  bool unsafe_ranges = false;
};

// Throws std::invalid_argument naming the offending field.
void check_config(const BenchConfig& cfg);

// Atomic model with phases P0..P(n-1), all passive, inports E0..E(m-1) and
// one external transition per (phase, event) pair to a seeded random phase.
ModelDef gen_random(const BenchConfig& cfg);

// `length` events on random inports at times 1, 2, 3, ...
Scenario gen_scenario(const BenchConfig& cfg);

struct BackendTiming {
  BackendKind backend = BackendKind::conditional;
  std::vector<double> samples_ms;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double min_ms = 0.0;
};

struct BenchReport {
  BenchConfig config;
  bool equivalent = false;
  std::size_t trace_entries = 0;
  std::vector<BackendTiming> timings;  // in kAllBackends order
};

// The backends disagreed on the generated workload; no timings were taken.
class BenchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BackendTiming summarize(BackendKind backend, std::vector<double> samples_ms);

// Checks four-way trace equivalence, then times each backend with one
// discarded warm-up run; compile and scenario preparation are not timed.
// Each sample is the fastest of three runs interleaved across backends.
BenchReport run_bench(const BenchConfig& cfg);

std::string format_report(const BenchReport& report);
std::string report_json(const BenchReport& report);

}  // namespace devsim
