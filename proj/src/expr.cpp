#include "devsim/expr.hpp"

#include <cmath>
#include <limits>

namespace devsim {

namespace {

bool is_comparison(ExprOp op) {
  return op == ExprOp::lt || op == ExprOp::le || op == ExprOp::gt || op == ExprOp::ge;
}

bool is_arithmetic(ExprOp op) {
  return op == ExprOp::add || op == ExprOp::sub || op == ExprOp::mul || op == ExprOp::div;
}

std::string_view symbol(ExprOp op) {
  switch (op) {
    case ExprOp::negate: return "-";
    case ExprOp::logical_not: return "not";
    case ExprOp::add: return "+";
    case ExprOp::sub: return "-";
    case ExprOp::mul: return "*";
    case ExprOp::div: return "/";
    case ExprOp::lt: return "<";
    case ExprOp::le: return "<=";
    case ExprOp::gt: return ">";
    case ExprOp::ge: return ">=";
    case ExprOp::eq: return "==";
    case ExprOp::ne: return "!=";
    case ExprOp::logical_and: return "and";
    case ExprOp::logical_or: return "or";
    default: return "?";
  }
}

}  // namespace

std::optional<ValueType> result_type(ExprOp op, ValueType operand) {
  if (op == ExprOp::negate && is_numeric(operand)) return operand;
  if (op == ExprOp::logical_not && operand == ValueType::boolean) return ValueType::boolean;
  return std::nullopt;
}

std::optional<ValueType> result_type(ExprOp op, ValueType lhs, ValueType rhs) {
  if (is_arithmetic(op)) {
    if (!is_numeric(lhs) || !is_numeric(rhs)) return std::nullopt;
    return lhs == ValueType::integer && rhs == ValueType::integer ? ValueType::integer : ValueType::real;
  }
  if (is_comparison(op)) {
    if (!is_numeric(lhs) || !is_numeric(rhs)) return std::nullopt;
    return ValueType::boolean;
  }
  if (op == ExprOp::eq || op == ExprOp::ne) {
    if ((is_numeric(lhs) && is_numeric(rhs)) || lhs == rhs) return ValueType::boolean;
    return std::nullopt;
  }
  if (op == ExprOp::logical_and || op == ExprOp::logical_or) {
    if (lhs == ValueType::boolean && rhs == ValueType::boolean) return ValueType::boolean;
    return std::nullopt;
  }
  return std::nullopt;
}

Expr Expr::constant(Value v) {
  Expr e;
  e.op = ExprOp::literal;
  e.type = type_of(v);
  e.literal = std::move(v);
  return e;
}

Expr Expr::variable(std::string name, std::uint32_t slot, ValueType type) {
  Expr e;
  e.op = ExprOp::variable;
  e.type = type;
  e.name = std::move(name);
  e.slot = slot;
  return e;
}

Expr Expr::parameter(std::string name, std::uint32_t slot) {
  Expr e;
  e.op = ExprOp::parameter;
  e.type = ValueType::real;
  e.name = std::move(name);
  e.slot = slot;
  return e;
}

Expr Expr::elapsed_time() {
  Expr e;
  e.op = ExprOp::elapsed;
  e.type = ValueType::real;
  e.name = "e";
  return e;
}

Expr Expr::unary(ExprOp op, Expr operand) {
  auto type = result_type(op, operand.type);
  if (!type) {
    throw std::invalid_argument("operator `" + std::string(symbol(op)) + "` cannot apply to " +
                                std::string(type_name(operand.type)));
  }
  Expr e;
  e.op = op;
  e.type = *type;
  e.operands.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(ExprOp op, Expr lhs, Expr rhs) {
  auto type = result_type(op, lhs.type, rhs.type);
  if (!type) {
    throw std::invalid_argument("operator `" + std::string(symbol(op)) + "` cannot combine " +
                                std::string(type_name(lhs.type)) + " and " + std::string(type_name(rhs.type)));
  }
  Expr e;
  e.op = op;
  e.type = *type;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

namespace {

void check_overflow(bool overflow) {
  if (overflow) throw EvalError("integer overflow");
}

Value arithmetic(ExprOp op, const Value& a, const Value& b) {
  if (type_of(a) == ValueType::integer && type_of(b) == ValueType::integer) {
    const auto x = std::get<std::int64_t>(a);
    const auto y = std::get<std::int64_t>(b);
    std::int64_t r = 0;
    switch (op) {
      case ExprOp::add: check_overflow(__builtin_add_overflow(x, y, &r)); return r;
      case ExprOp::sub: check_overflow(__builtin_sub_overflow(x, y, &r)); return r;
      case ExprOp::mul: check_overflow(__builtin_mul_overflow(x, y, &r)); return r;
      default:
        if (y == 0) throw EvalError("division by zero");
        if (x == std::numeric_limits<std::int64_t>::min() && y == -1) throw EvalError("integer overflow");
        return x / y;
    }
  }
  const double x = as_real(a);
  const double y = as_real(b);
  switch (op) {
    case ExprOp::add: return x + y;
    case ExprOp::sub: return x - y;
    case ExprOp::mul: return x * y;
    default:
      if (y == 0.0) throw EvalError("division by zero");
      return x / y;
  }
}

bool equal_values(const Value& a, const Value& b) {
  if (is_numeric(type_of(a)) && is_numeric(type_of(b)) && type_of(a) != type_of(b)) {
    return as_real(a) == as_real(b);
  }
  return a == b;
}

bool compare(ExprOp op, const Value& a, const Value& b) {
  if (type_of(a) == ValueType::integer && type_of(b) == ValueType::integer) {
    const auto x = std::get<std::int64_t>(a);
    const auto y = std::get<std::int64_t>(b);
    switch (op) {
      case ExprOp::lt: return x < y;
      case ExprOp::le: return x <= y;
      case ExprOp::gt: return x > y;
      default: return x >= y;
    }
  }
  const double x = as_real(a);
  const double y = as_real(b);
  switch (op) {
    case ExprOp::lt: return x < y;
    case ExprOp::le: return x <= y;
    case ExprOp::gt: return x > y;
    default: return x >= y;
  }
}

}  // namespace

Value eval(const Expr& expr, const EvalEnv& env) {
  switch (expr.op) {
    case ExprOp::literal: return expr.literal;
    case ExprOp::variable: return env.vars[expr.slot];
    case ExprOp::parameter: return env.params[expr.slot];
    case ExprOp::elapsed: return env.elapsed;
    case ExprOp::negate: {
      Value v = eval(expr.operands[0], env);
      if (auto* i = std::get_if<std::int64_t>(&v)) {
        if (*i == std::numeric_limits<std::int64_t>::min()) throw EvalError("integer overflow");
        return -*i;
      }
      return -std::get<double>(v);
    }
    case ExprOp::logical_not: return !std::get<bool>(eval(expr.operands[0], env));
    case ExprOp::logical_and:
      return std::get<bool>(eval(expr.operands[0], env)) && std::get<bool>(eval(expr.operands[1], env));
    case ExprOp::logical_or:
      return std::get<bool>(eval(expr.operands[0], env)) || std::get<bool>(eval(expr.operands[1], env));
    case ExprOp::add:
    case ExprOp::sub:
    case ExprOp::mul:
    case ExprOp::div:
      return arithmetic(expr.op, eval(expr.operands[0], env), eval(expr.operands[1], env));
    case ExprOp::lt:
    case ExprOp::le:
    case ExprOp::gt:
    case ExprOp::ge:
      return compare(expr.op, eval(expr.operands[0], env), eval(expr.operands[1], env));
    case ExprOp::eq: return equal_values(eval(expr.operands[0], env), eval(expr.operands[1], env));
    case ExprOp::ne: return !equal_values(eval(expr.operands[0], env), eval(expr.operands[1], env));
  }
  throw EvalError("malformed expression");
}

bool references_state(const Expr& expr) {
  if (expr.op == ExprOp::variable || expr.op == ExprOp::elapsed) return true;
  for (const auto& o : expr.operands) {
    if (references_state(o)) return true;
  }
  return false;
}

bool references_elapsed(const Expr& expr) {
  if (expr.op == ExprOp::elapsed) return true;
  for (const auto& o : expr.operands) {
    if (references_elapsed(o)) return true;
  }
  return false;
}

std::optional<Value> fold_constant(const Expr& expr, std::span<const double> params) {
  if (references_state(expr)) return std::nullopt;
  try {
    return eval(expr, EvalEnv{{}, params, 0.0});
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

namespace {

// Binding strength; higher binds tighter.
int precedence(const Expr& e) {
  switch (e.op) {
    case ExprOp::logical_or: return 1;
    case ExprOp::logical_and: return 2;
    case ExprOp::logical_not: return 3;
    case ExprOp::lt:
    case ExprOp::le:
    case ExprOp::gt:
    case ExprOp::ge:
    case ExprOp::eq:
    case ExprOp::ne: return 4;
    case ExprOp::add:
    case ExprOp::sub: return 5;
    case ExprOp::mul:
    case ExprOp::div: return 6;
    case ExprOp::negate: return 7;
    case ExprOp::literal: {
      // A negative literal prints with a leading '-' and must not follow another '-'.
      if (const auto* i = std::get_if<std::int64_t>(&e.literal); i && *i < 0) return 7;
      if (const auto* d = std::get_if<double>(&e.literal); d && std::signbit(*d)) return 7;
      return 8;
    }
    default: return 8;
  }
}

void print(const Expr& e, int min_prec, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, 0, out);
    out += ')';
  } else {
    print(e, min_prec, out);
  }
}

void print(const Expr& e, int, std::string& out) {
  switch (e.op) {
    case ExprOp::literal: out += format_value(e.literal); return;
    case ExprOp::variable:
    case ExprOp::parameter:
    case ExprOp::elapsed: out += e.name; return;
    case ExprOp::negate:
      out += '-';
      print_child(e.operands[0], 8, out);
      return;
    case ExprOp::logical_not:
      out += "not ";
      print_child(e.operands[0], 3, out);
      return;
    default: break;
  }
  const int p = precedence(e);
  const bool non_assoc = p == 4;
  print_child(e.operands[0], non_assoc ? p + 1 : p, out);
  out += ' ';
  out += symbol(e.op);
  out += ' ';
  print_child(e.operands[1], p + 1, out);
}

}  // namespace

std::string to_string(const Expr& expr) {
  std::string out;
  print(expr, 0, out);
  return out;
}

}  // namespace devsim
