#include "devsim/value.hpp"

#include <charconv>
#include <cmath>
#include <mutex>
#include <unordered_set>

namespace devsim {

namespace {

const std::string& intern(std::string_view text) {
  static std::mutex mutex;
  static std::unordered_set<std::string> pool;
  std::lock_guard lock(mutex);
  return *pool.emplace(text).first;
}

}  // namespace

Label::Label(std::string_view text) : text_(&intern(text)) {}

ValueType type_of(const Value& v) noexcept { return static_cast<ValueType>(v.index()); }

std::string_view type_name(ValueType t) noexcept {
  switch (t) {
    case ValueType::boolean: return "bool";
    case ValueType::integer: return "int";
    case ValueType::real: return "real";
    case ValueType::label: return "label";
  }
  return "?";
}

bool is_numeric(ValueType t) noexcept { return t == ValueType::integer || t == ValueType::real; }

double as_real(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

std::string format_value(const Value& v) {
  switch (type_of(v)) {
    case ValueType::boolean: return std::get<bool>(v) ? "true" : "false";
    case ValueType::integer: return std::to_string(std::get<std::int64_t>(v));
    case ValueType::real: return format_real(std::get<double>(v));
    case ValueType::label: return "'" + std::string(std::get<Label>(v).text()) + "'";
  }
  return {};
}

}  // namespace devsim
