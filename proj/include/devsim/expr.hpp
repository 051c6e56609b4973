#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "devsim/value.hpp"

namespace devsim {

enum class ExprOp : std::uint8_t {
  literal,
  variable,
  parameter,
  elapsed,
  negate,
  logical_not,
  add,
  sub,
  mul,
  div,
  lt,
  le,
  gt,
  ge,
  eq,
  ne,
  logical_and,
  logical_or,
};

// Typed expression tree over state variables, model parameters and the
// elapsed time `e`. Names are resolved to slots when the tree is built.
struct Expr {
  ExprOp op = ExprOp::literal;
  ValueType type = ValueType::boolean;
  Value literal;
  std::string name;
  std::uint32_t slot = 0;
  std::vector<Expr> operands;

  bool operator==(const Expr&) const = default;

  static Expr constant(Value v);
  static Expr variable(std::string name, std::uint32_t slot, ValueType type);
  static Expr parameter(std::string name, std::uint32_t slot);
  static Expr elapsed_time();
  // Builds a unary or binary node and infers its type. Throws std::invalid_argument
  // when operand types do not fit the operator.
  static Expr unary(ExprOp op, Expr operand);
  static Expr binary(ExprOp op, Expr lhs, Expr rhs);
};

// Result type of applying `op` to operands of the given types, if well-typed.
std::optional<ValueType> result_type(ExprOp op, ValueType lhs, ValueType rhs);
std::optional<ValueType> result_type(ExprOp op, ValueType operand);

struct EvalEnv {
  std::span<const Value> vars;
  std::span<const double> params;
  double elapsed = 0.0;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integer arithmetic stays integer, mixed operands promote to real. Throws
// EvalError on division by zero or integer overflow.
Value eval(const Expr& expr, const EvalEnv& env);

// Value of an expression that references neither variables nor `e`.
std::optional<Value> fold_constant(const Expr& expr, std::span<const double> params);

bool references_state(const Expr& expr);
bool references_elapsed(const Expr& expr);

// Source form with the minimum parentheses needed to parse back to the same tree.
std::string to_string(const Expr& expr);

}  // namespace devsim
