#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "devsim/mdl.hpp"
#include "devsim/models.hpp"
#include "support/random_spec.hpp"

using namespace devsim;

namespace {

ParseError parse_error(std::string_view text, const ModelResolver& resolver = {}) {
  try {
    parse_model(text, "t.mdl", resolver);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for:\n" << text);
  throw;
}

void check_round_trip(const ModelDef& def, const ModelResolver& resolver = {}) {
  const std::string printed = print_model(def);
  const ModelDef again = parse_model(printed, "printed.mdl", resolver);
  CHECK(again == def);
  CHECK(print_model(again) == printed);
}

}  // namespace

TEST_CASE("counter parses into two phases and four transitions") {
  const ModelDef def = load_builtin("counter");
  REQUIRE(def.is_atomic());
  const BehaviorSpec& spec = def.atomic().behavior;
  CHECK(spec.phases.size() == 2);
  CHECK(spec.phases[0].name == "ZERO");
  CHECK_FALSE(spec.phases[0].lifetime.has_value());
  CHECK(spec.phases[1].name == "POS");
  int ext = 0;
  int in = 0;
  for (const auto& t : spec.transitions) (t.kind == TransitionKind::external ? ext : in)++;
  CHECK(ext == 2);
  CHECK(in == 2);
  CHECK(def.params().size() == 1);
  CHECK(def.params()[0].name == "alpha");
  CHECK(def.params()[0].value == 2.0);
  CHECK(spec.invariants.size() == 1);
}

TEST_CASE("every bundled model survives print and re-parse") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    check_round_trip(load_builtin(name), builtin_resolver());
  }
}

TEST_CASE("random models survive print and re-parse") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CAPTURE(seed);
    check_round_trip(testing::random_model(seed, 2 + static_cast<int>(seed % 4), 2 + static_cast<int>(seed % 9)));
  }
}

TEST_CASE("diagnostics carry category and position") {
  const ParseError empty = parse_error("");
  CHECK(empty.category() == DiagnosticCategory::syntax);
  CHECK(empty.line() == 1);
  CHECK(empty.column() == 1);
  CHECK(empty.diagnostic().rfind("t.mdl:1:1: syntax error: ", 0) == 0);

  const ParseError unknown = parse_error("atomic X\ninit A\n");
  CHECK(unknown.category() == DiagnosticCategory::semantic);
  CHECK(unknown.message().find("unknown phase") != std::string::npos);
}

TEST_CASE("semantic errors") {
  const std::string head = "atomic m\ninport go\nvar n = 0\nphase A lifetime inf\ninit A\n";
  auto message = [&](const std::string& tail) { return parse_error(head + tail).message(); };
  CHECK(message("ext A --go--> B\n").find("unknown phase") != std::string::npos);
  CHECK(message("ext A --stop--> A\n").find("unknown input event") != std::string::npos);
  CHECK(message("ext A --go--> A action k = 1\n").find("undeclared variable") != std::string::npos);
  CHECK(message("ext A --go--> A action n = 1.5\n").find("type mismatch") != std::string::npos);
  CHECK(message("ext A --go--> A cond n + 1\n").find("type mismatch") != std::string::npos);
  CHECK(message("ext A --go--> A cond n and true\n").find("type mismatch") != std::string::npos);
  CHECK(message("phase A lifetime 1\n").find("duplicate phase") != std::string::npos);
  CHECK(message("phase B lifetime e\n").find("`e`") != std::string::npos);
  CHECK(message("int A --> A output nowhere ! 1\n").find("unknown output port") != std::string::npos);
  CHECK(parse_error("atomic m\nparam n = 1\nvar n = 0\nphase A lifetime inf\ninit A\n").message().find("shadows") !=
        std::string::npos);
}

TEST_CASE("syntax errors") {
  const ParseError output_on_ext =
      parse_error("atomic m\ninport go\noutport o\nphase A lifetime inf\ninit A\next A --go--> A output o ! 1\n");
  CHECK(output_on_ext.category() == DiagnosticCategory::syntax);
  CHECK(output_on_ext.line() == 6);

  const ParseError misplaced = parse_error("atomic m\nuse counter as c\n");
  CHECK(misplaced.category() == DiagnosticCategory::syntax);
  CHECK(misplaced.line() == 2);
  CHECK(misplaced.column() == 1);

  const ParseError chained = parse_error("atomic m\nvar n = 0\nphase A lifetime inf\ninit A\ninvariant 0 < n < 2\n");
  CHECK(chained.category() == DiagnosticCategory::syntax);
  CHECK(chained.line() == 5);

  CHECK(parse_error("atomic phase\n").category() == DiagnosticCategory::syntax);
}

TEST_CASE("transition clauses may come in any order") {
  const std::string head = "atomic m\ninport go\noutport o\nvar n = 0\nphase A lifetime 1\ninit A\n";
  const ModelDef a = parse_model(head + "int A --> A cond n > 0 action n = n - 1 output o ! n\n");
  const ModelDef b = parse_model(head + "int A --> A output o ! n action n = n - 1 cond n > 0\n");
  CHECK(a == b);
  CHECK(parse_error(head + "int A --> A cond n > 0 cond n > 1\n").category() == DiagnosticCategory::syntax);
}

TEST_CASE("ports, labels and literals") {
  const ModelDef def = parse_model(
      "atomic m\n"
      "inport cmd : {on, off}\n"
      "inport level : real\n"
      "outport state : {lit, dark}\n"
      "var mode = 'dark'\n"
      "var x = -2.5\n"
      "var flag = true\n"
      "phase A lifetime inf\n"
      "phase B lifetime 0.5\n"
      "init A\n"
      "ext A --cmd--> B cond mode == 'dark' and not flag == false action mode = 'lit', x = -x\n"
      "int B --> A output state ! mode\n");
  const AtomicModel& m = def.atomic();
  CHECK(m.inports[0].type == PortType::enumeration({Label("on"), Label("off")}));
  CHECK(m.inports[1].type == PortType::real());
  CHECK(m.behavior.variables[0].initial == Value{Label("dark")});
  CHECK(m.behavior.variables[1].initial == Value{-2.5});
  CHECK(m.behavior.variables[2].initial == Value{true});
  check_round_trip(def);

  CHECK(parse_error("atomic m\noutport s : {a}\nphase A lifetime 1\ninit A\nint A --> A output s ! 'b'\n").message().find(
            "type mismatch") != std::string::npos);
}

TEST_CASE("use resolves submodels and rejects unknown names") {
  const ModelDef def = load_builtin("pipeline");
  REQUIRE_FALSE(def.is_atomic());
  const CoupledModel& c = def.coupled();
  REQUIRE(c.submodels.size() == 2);
  CHECK(c.submodels[0].instance == "src");
  CHECK(model_name(*c.submodels[0].model) == "source");
  CHECK(c.select == std::vector<std::string>{"src", "c"});

  const ParseError missing = parse_error("coupled m\nuse nothing as n\n", builtin_resolver());
  CHECK(missing.category() == DiagnosticCategory::semantic);
  CHECK(missing.message().find("unknown model") != std::string::npos);
}

TEST_CASE("select defaults to declaration order") {
  const ModelDef def = parse_model("coupled m\nuse counter as b\nuse counter as a\n", "m.mdl", builtin_resolver());
  CHECK(def.coupled().select == std::vector<std::string>{"b", "a"});
  CHECK(parse_error("coupled m\nuse counter as b\nuse counter as a\nselect a\n", builtin_resolver()).message().find(
            "select") != std::string::npos);
}

TEST_CASE("cyclic use is kept for the validator") {
  const ModelResolver resolver = [](std::string_view name) -> std::optional<ModelSource> {
    if (name == "outer") return ModelSource{"coupled outer\nuse inner as i\n", "outer.mdl"};
    if (name == "inner") return ModelSource{"coupled inner\nuse outer as o\n", "inner.mdl"};
    return std::nullopt;
  };
  const ModelDef def = parse_model("coupled outer\nuse inner as i\n", "outer.mdl", resolver);
  const auto& inner = std::get<1>(*def.coupled().submodels[0].model);
  CHECK_FALSE(inner->submodels[0].model.has_value());
}

TEST_CASE("files load their submodels from the same directory") {
  const auto dir = std::filesystem::temp_directory_path() / "devsim_mdl_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "leaf.mdl") << "atomic leaf\ninport i\nphase A lifetime inf\ninit A\n";
  std::ofstream(dir / "top.mdl") << "coupled top\ninport i\nuse leaf as l\neic i -> l.i\n";
  std::ofstream(dir / "wrong.mdl") << "atomic other\nphase A lifetime inf\ninit A\n";
  std::ofstream(dir / "usewrong.mdl") << "coupled usewrong\nuse wrong as w\n";
  const ModelDef def = load_model_file(dir / "top.mdl");
  CHECK(def.coupled().submodels[0].model.has_value());
  CHECK_THROWS_AS(load_model_file(dir / "usewrong.mdl"), ParseError);
  try {
    load_model_file(dir / "missing.mdl");
    FAIL("expected io error");
  } catch (const ParseError& e) {
    CHECK(e.category() == DiagnosticCategory::io);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("with_param overrides parameters throughout the hierarchy") {
  const ModelDef counter = load_builtin("counter").with_param("alpha", 3.0);
  CHECK(counter.params()[0].value == 3.0);
  const ModelDef pipeline = load_builtin("pipeline").with_param("period", 0.5);
  const auto& src = std::get<1>(*pipeline.coupled().submodels[0].model);
  const auto& gen = std::get<0>(*src->submodels[0].model);
  CHECK(gen->behavior.params[0].value == 0.5);
  CHECK_THROWS_AS(counter.with_param("beta", 1.0), std::invalid_argument);
}
