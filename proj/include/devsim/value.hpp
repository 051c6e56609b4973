#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>

namespace devsim {

// Interned enumeration label. Labels with the same text share one pooled
// string, so equality is a pointer comparison.
class Label {
 public:
  explicit Label(std::string_view text);

  std::string_view text() const noexcept { return *text_; }

  friend bool operator==(const Label& a, const Label& b) noexcept { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(const Label& a, const Label& b) noexcept {
    return a.text_->compare(*b.text_) <=> 0;
  }

 private:
  const std::string* text_;
};

enum class ValueType : std::uint8_t { boolean, integer, real, label };

// Scalar carried by variables, expressions and events.
using Value = std::variant<bool, std::int64_t, double, Label>;

ValueType type_of(const Value& v) noexcept;
std::string_view type_name(ValueType t) noexcept;

bool is_numeric(ValueType t) noexcept;

// Numeric value as a real; throws std::bad_variant_access for non-numeric values.
double as_real(const Value& v);

// Shortest text that reads back as the same double, always with a '.' or exponent.
std::string format_real(double v);

// Literal syntax used by the model language: 3, 2.5, true, 'on'.
std::string format_value(const Value& v);

}  // namespace devsim
