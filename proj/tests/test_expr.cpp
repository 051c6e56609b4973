#include <doctest.h>

#include <limits>
#include <random>

#include "devsim/expr.hpp"

using namespace devsim;

namespace {

Expr n_var() { return Expr::variable("n", 0, ValueType::integer); }
Expr lit(std::int64_t v) { return Expr::constant(v); }
Expr lit(double v) { return Expr::constant(v); }

Value eval_with_n(const Expr& e, Value n, double elapsed = 0.0) {
  std::vector<Value> vars{std::move(n)};
  return eval(e, {vars, {}, elapsed});
}

}  // namespace

TEST_CASE("guard and action examples") {
  CHECK(eval_with_n(Expr::binary(ExprOp::gt, n_var(), lit(std::int64_t{0})), std::int64_t{1}) == Value{true});
  CHECK(eval_with_n(Expr::binary(ExprOp::add, n_var(), lit(std::int64_t{1})), std::int64_t{2}) ==
        Value{std::int64_t{3}});
  CHECK_THROWS_AS(eval_with_n(Expr::binary(ExprOp::div, lit(std::int64_t{1}), n_var()), std::int64_t{0}), EvalError);
}

TEST_CASE("integer arithmetic matches machine arithmetic") {
  std::mt19937_64 rng(3);
  const ExprOp ops[] = {ExprOp::add, ExprOp::sub, ExprOp::mul, ExprOp::div};
  for (int i = 0; i < 2000; ++i) {
    const auto a = static_cast<std::int64_t>(rng() % 20001) - 10000;
    const auto b = static_cast<std::int64_t>(rng() % 201) - 100;
    const ExprOp op = ops[rng() % 4];
    const Expr e = Expr::binary(op, n_var(), lit(b));
    if (op == ExprOp::div && b == 0) {
      CHECK_THROWS_AS(eval_with_n(e, a), EvalError);
      continue;
    }
    std::int64_t expected = 0;
    switch (op) {
      case ExprOp::add: expected = a + b; break;
      case ExprOp::sub: expected = a - b; break;
      case ExprOp::mul: expected = a * b; break;
      default: expected = a / b; break;
    }
    CHECK(eval_with_n(e, a) == Value{expected});
  }
}

TEST_CASE("mixed operands promote to real") {
  const Expr e = Expr::binary(ExprOp::add, n_var(), lit(0.5));
  CHECK(e.type == ValueType::real);
  CHECK(eval_with_n(e, std::int64_t{2}) == Value{2.5});
  CHECK(eval_with_n(Expr::binary(ExprOp::div, lit(1.0), lit(4.0)), std::int64_t{0}) == Value{0.25});
  CHECK(eval_with_n(Expr::binary(ExprOp::div, lit(std::int64_t{7}), lit(std::int64_t{2})), std::int64_t{0}) ==
        Value{std::int64_t{3}});
  CHECK(eval_with_n(Expr::binary(ExprOp::eq, lit(std::int64_t{2}), lit(2.0)), std::int64_t{0}) == Value{true});
}

TEST_CASE("real division by zero and integer overflow are errors") {
  CHECK_THROWS_AS(eval_with_n(Expr::binary(ExprOp::div, lit(1.0), lit(0.0)), std::int64_t{0}), EvalError);
  const auto big = std::numeric_limits<std::int64_t>::max();
  CHECK_THROWS_AS(eval_with_n(Expr::binary(ExprOp::add, n_var(), lit(std::int64_t{1})), big), EvalError);
  CHECK_THROWS_AS(eval_with_n(Expr::unary(ExprOp::negate, n_var()), std::numeric_limits<std::int64_t>::min()),
                  EvalError);
}

TEST_CASE("logical operators short-circuit") {
  const Expr boom = Expr::binary(ExprOp::gt, Expr::binary(ExprOp::div, lit(std::int64_t{1}), n_var()),
                                 lit(std::int64_t{0}));
  const Expr f = Expr::constant(false);
  const Expr t = Expr::constant(true);
  CHECK(eval_with_n(Expr::binary(ExprOp::logical_and, f, boom), std::int64_t{0}) == Value{false});
  CHECK(eval_with_n(Expr::binary(ExprOp::logical_or, t, boom), std::int64_t{0}) == Value{true});
  CHECK_THROWS_AS(eval_with_n(Expr::binary(ExprOp::logical_and, t, boom), std::int64_t{0}), EvalError);
}

TEST_CASE("elapsed time and parameters are readable") {
  const Expr e = Expr::binary(ExprOp::gt, Expr::elapsed_time(), Expr::parameter("alpha", 0));
  std::vector<Value> vars;
  std::vector<double> params{2.0};
  CHECK(eval(e, {vars, params, 2.5}) == Value{true});
  CHECK(eval(e, {vars, params, 1.5}) == Value{false});
}

TEST_CASE("ill-typed trees are rejected") {
  CHECK_THROWS_AS(Expr::binary(ExprOp::add, lit(std::int64_t{1}), Expr::constant(true)), std::invalid_argument);
  CHECK_THROWS_AS(Expr::binary(ExprOp::logical_and, lit(std::int64_t{1}), Expr::constant(true)),
                  std::invalid_argument);
  CHECK_THROWS_AS(Expr::unary(ExprOp::logical_not, lit(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(Expr::binary(ExprOp::lt, Expr::constant(Label("a")), Expr::constant(Label("b"))),
                  std::invalid_argument);
  CHECK(Expr::binary(ExprOp::eq, Expr::constant(Label("a")), Expr::constant(Label("a"))).type == ValueType::boolean);
}

TEST_CASE("evaluation is pure") {
  const Expr e = Expr::binary(ExprOp::mul, Expr::binary(ExprOp::sub, n_var(), lit(std::int64_t{3})), lit(1.5));
  std::vector<Value> vars{std::int64_t{7}};
  const std::vector<Value> before = vars;
  const Value first = eval(e, {vars, {}, 0.0});
  for (int i = 0; i < 10; ++i) CHECK(eval(e, {vars, {}, 0.0}) == first);
  CHECK(vars == before);
  CHECK(first == Value{6.0});
}

TEST_CASE("constant folding") {
  std::vector<double> params{2.0};
  CHECK(fold_constant(Expr::binary(ExprOp::mul, Expr::parameter("a", 0), lit(3.0)), params) == Value{6.0});
  CHECK_FALSE(fold_constant(n_var(), params).has_value());
  CHECK_FALSE(fold_constant(Expr::elapsed_time(), params).has_value());
  CHECK(references_state(Expr::binary(ExprOp::add, lit(1.0), Expr::elapsed_time())));
  CHECK(references_elapsed(Expr::elapsed_time()));
  CHECK_FALSE(references_state(Expr::parameter("a", 0)));
}

TEST_CASE("printing respects precedence") {
  const Expr sum = Expr::binary(ExprOp::add, n_var(), lit(std::int64_t{1}));
  CHECK(to_string(Expr::binary(ExprOp::mul, sum, lit(std::int64_t{2}))) == "(n + 1) * 2");
  CHECK(to_string(Expr::binary(ExprOp::sub, n_var(), Expr::binary(ExprOp::sub, n_var(), lit(std::int64_t{1})))) ==
        "n - (n - 1)");
  CHECK(to_string(Expr::unary(ExprOp::negate, n_var())) == "-n");
  CHECK(to_string(Expr::unary(ExprOp::logical_not, Expr::binary(ExprOp::gt, n_var(), lit(std::int64_t{0})))) ==
        "not n > 0");
  CHECK(to_string(Expr::constant(Label("on"))) == "'on'");
  CHECK(to_string(lit(2.0)) == "2.0");
}
