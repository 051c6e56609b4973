#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "devsim/bench.hpp"
#include "devsim/mdl.hpp"
#include "devsim/models.hpp"
#include "devsim/simulator.hpp"
#include "devsim/validator.hpp"

namespace fs = std::filesystem;
using namespace devsim;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

// A file path, or failing that the name of a bundled model.
ModelDef load(const std::string& spec) {
  std::error_code ec;
  if (fs::is_regular_file(spec, ec)) return load_model_file(spec);
  if (builtin_source(spec)) return load_builtin(spec);
  return load_model_file(spec);
}

int report_violations(const std::vector<Violation>& violations) {
  for (const auto& v : violations) std::cout << format_violation(v) << '\n';
  return violations.empty() ? kOk : kFailed;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cmd_validate(const std::string& model) {
  return report_violations(validate_model(load(model)));
}

struct RunArgs {
  std::string model;
  std::string backend = "conditional";
  std::string scenario;
  double until = std::numeric_limits<double>::infinity();
  bool strict_inputs = false;
  std::string trace_path;
  bool header = false;
  std::vector<std::string> params;
};

int cmd_run(const RunArgs& args) {
  auto backend = parse_backend(args.backend);
  if (!backend) {
    std::cerr << "devsim: unknown backend `" << args.backend << "`\n";
    return kUsage;
  }
  ModelDef def = load(args.model);
  for (const auto& p : args.params) {
    const auto eq = p.find('=');
    double value = 0;
    std::istringstream in(eq == std::string::npos ? "" : p.substr(eq + 1));
    in.imbue(std::locale::classic());
    if (eq == std::string::npos || !(in >> value) || !in.eof()) {
      std::cerr << "devsim: --param expects name=value, got `" << p << "`\n";
      return kUsage;
    }
    try {
      def = def.with_param(p.substr(0, eq), value);
    } catch (const std::invalid_argument& e) {
      std::cerr << "devsim: " << e.what() << '\n';
      return kUsage;
    }
  }
  if (int rc = report_violations(validate_model(def)); rc != kOk) return rc;
  const ValidatedModel model = ValidatedModel::check(std::move(def));

  Scenario scenario;
  std::error_code ec;
  if (!args.scenario.empty() && fs::is_regular_file(args.scenario, ec)) {
    auto text = read_file(args.scenario);
    if (!text) throw ParseError(DiagnosticCategory::io, args.scenario, 1, 1, "cannot read scenario file");
    scenario.events = parse_scenario_text(*text);
  } else {
    scenario.events = parse_inline_scenario(args.scenario);
  }
  scenario.until = args.until;
  scenario.budget = event_budget_from_env();

  std::ofstream file;
  if (!args.trace_path.empty()) {
    file.open(args.trace_path, std::ios::binary);
    if (!file) throw ParseError(DiagnosticCategory::io, args.trace_path, 1, 1, "cannot write trace file");
  }
  std::ostream& out = args.trace_path.empty() ? std::cout : file;

  Simulator sim(model, *backend, RunOptions{args.strict_inputs, true});
  const PreparedScenario prepared = sim.prepare(scenario);
  try {
    const Trace trace = sim.run(prepared);
    write_trace(out, trace, args.header);
    if (trace.termination == Termination::budget) {
      std::cerr << "devsim: stopped after " << prepared.budget << " events (event budget)\n";
    }
    return kOk;
  } catch (const SimulationAborted& a) {
    write_trace(out, a.partial(), args.header);
    std::cerr << "devsim: simulation aborted: " << a.what() << '\n';
    if (a.offending()) std::cerr << "  at " << to_json_line(*a.offending()) << '\n';
    return kFailed;
  }
}

int cmd_bench(const BenchConfig& cfg, bool json) {
  try {
    check_config(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "devsim: " << e.what() << '\n';
    return kUsage;
  }
  try {
    const BenchReport report = run_bench(cfg);
    std::cout << (json ? report_json(report) + "\n" : format_report(report));
    return kOk;
  } catch (const BenchFailure& e) {
    std::cerr << "devsim: " << e.what() << '\n';
    return kFailed;
  }
}

int cmd_diff(const std::string& a, const std::string& b) {
  std::ifstream left(a, std::ios::binary);
  if (!left) throw ParseError(DiagnosticCategory::io, a, 1, 1, "cannot read trace file");
  std::ifstream right(b, std::ios::binary);
  if (!right) throw ParseError(DiagnosticCategory::io, b, 1, 1, "cannot read trace file");
  if (auto d = diff_trace_lines(read_trace_lines(left), read_trace_lines(right))) {
    std::cout << format_diff(*d) << '\n';
    return kFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DEVS model validator, simulator and dispatch benchmark"};
  app.require_subcommand(1);

  std::string validate_model_arg;
  auto* validate = app.add_subcommand("validate", "Check a model against the consistency rules");
  validate->add_option("model", validate_model_arg, "Model file or bundled model name")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a model and print its trace");
  run_cmd->add_option("model", run.model, "Model file or bundled model name")->required();
  run_cmd->add_option("--backend", run.backend, "conditional, state, state_event or state_event_transition");
  run_cmd->add_option("--scenario", run.scenario, "Scenario file, or inline `event@time[ value],...`");
  run_cmd->add_option("--until", run.until, "End time")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--strict-inputs", run.strict_inputs, "Abort on inputs no transition handles");
  run_cmd->add_option("--trace", run.trace_path, "Write the trace here instead of stdout");
  run_cmd->add_flag("--header", run.header, "Start the trace with a header line");
  run_cmd->add_option("--param", run.params, "Override a parameter, name=value")->take_all();

  BenchConfig cfg;
  bool json = false;
  auto* bench = app.add_subcommand("bench", "Time the four backends on a random model");
  bench->add_option("--states", cfg.states, "Number of phases")->capture_default_str();
  bench->add_option("--events", cfg.events, "Number of input events")->capture_default_str();
  bench->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  bench->add_option("--reps", cfg.repetitions, "Timed repetitions per backend")->capture_default_str();
  bench->add_option("--len", cfg.length, "Input events per run")->capture_default_str();
  bench->add_flag("--json", json, "Print the report as JSON");
  bench->add_flag("--unsafe-ranges", cfg.unsafe_ranges, "Allow states and events outside 2..5 and 2..10");

  std::string diff_a;
  std::string diff_b;
  auto* diff = app.add_subcommand("diff", "Compare two trace files, ignoring headers");
  diff->add_option("left", diff_a)->required();
  diff->add_option("right", diff_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_model_arg);
    if (*run_cmd) return cmd_run(run);
    if (*bench) return cmd_bench(cfg, json);
    if (*diff) return cmd_diff(diff_a, diff_b);
  } catch (const ParseError& e) {
    std::cerr << e.diagnostic() << '\n';
    return kUsage;
  } catch (const ScenarioError& e) {
    std::cerr << "devsim: " << e.what() << '\n';
    return kUsage;
  } catch (const ModelError& e) {
    return report_violations(e.violations());
  }
  return kUsage;
}
