#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "devsim/value.hpp"

namespace devsim {

// Strongly typed indices into a BehaviorSpec's phase, input and output tables.
template <typename Tag>
struct Index {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const Index&) const = default;
};

using PhaseId = Index<struct PhaseTag>;
using InputId = Index<struct InputTag>;
using OutputId = Index<struct OutputTag>;

enum class PortKind : std::uint8_t { integer, real, enumeration, any };

class PortType {
 public:
  PortType() = default;

  static PortType integer() { return PortType(PortKind::integer, {}); }
  static PortType real() { return PortType(PortKind::real, {}); }
  static PortType any() { return PortType(PortKind::any, {}); }
  // Throws std::invalid_argument on an empty or duplicated label list.
  static PortType enumeration(std::vector<Label> labels);

  PortKind kind() const noexcept { return kind_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  bool has_label(const Label& l) const noexcept;

  bool operator==(const PortType&) const = default;

 private:
  PortType(PortKind kind, std::vector<Label> labels) : kind_(kind), labels_(std::move(labels)) {}

  PortKind kind_ = PortKind::integer;
  std::vector<Label> labels_;
};

std::string to_string(const PortType& t);

enum class Direction : std::uint8_t { in, out };

struct Port {
  std::string name;
  Direction direction = Direction::in;
  PortType type;

  bool operator==(const Port&) const = default;
};

// Receivability check on a port. Integers widen into real ports; reals never
// narrow into integer ports.
bool port_accepts(const Port& port, const Value& value);
bool type_accepts(const PortType& type, const Value& value);

// Whether every value a `source` port can carry is receivable by `target`.
bool coupling_compatible(const PortType& source, const PortType& target);

const Port* find_port(std::span<const Port> ports, std::string_view name);

// Lifetime of a phase: a non-negative real or infinity.
class Duration {
 public:
  static Duration infinite() noexcept { return Duration(std::numeric_limits<double>::infinity()); }
  // Throws std::domain_error for negative or NaN values.
  static Duration of(double value);

  double value() const noexcept { return value_; }
  bool is_infinite() const noexcept { return value_ == std::numeric_limits<double>::infinity(); }

  bool operator==(const Duration&) const = default;

 private:
  explicit Duration(double v) noexcept : value_(v) {}
  double value_;
};

// Q = (s, e): current phase, variable bindings and time elapsed in the phase.
struct TotalState {
  PhaseId phase;
  std::vector<Value> vars;
  double elapsed = 0.0;

  bool operator==(const TotalState&) const = default;
};

enum class RuleId : std::uint8_t { R1, R2, R3, R4, R5, RD, RP, RI };

std::string_view rule_name(RuleId rule) noexcept;

struct Violation {
  RuleId rule = RuleId::R1;
  std::string location;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// "RULE R2 bad_r2: inport and outport share the name `p`"
std::string format_violation(const Violation& v);

// Model construction failed one or more consistency rules.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// A consistency rule broken while executing a behavior (RD, R4, R5, RI, RP).
class RuntimeViolation : public std::runtime_error {
 public:
  explicit RuntimeViolation(Violation v);
  const Violation& violation() const noexcept { return violation_; }

 private:
  Violation violation_;
};

}  // namespace devsim

template <typename Tag>
struct std::hash<devsim::Index<Tag>> {
  std::size_t operator()(devsim::Index<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
