#include "devsim/core.hpp"

#include <algorithm>
#include <cmath>

namespace devsim {

PortType PortType::enumeration(std::vector<Label> labels) {
  if (labels.empty()) throw std::invalid_argument("enumeration port type needs at least one label");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::find(labels.begin() + static_cast<std::ptrdiff_t>(i) + 1, labels.end(), labels[i]) != labels.end()) {
      throw std::invalid_argument("duplicate enumeration label '" + std::string(labels[i].text()) + "'");
    }
  }
  return PortType(PortKind::enumeration, std::move(labels));
}

bool PortType::has_label(const Label& l) const noexcept {
  return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
}

std::string to_string(const PortType& t) {
  switch (t.kind()) {
    case PortKind::integer: return "int";
    case PortKind::real: return "real";
    case PortKind::any: return "any";
    case PortKind::enumeration: {
      std::string out = "{";
      for (std::size_t i = 0; i < t.labels().size(); ++i) {
        if (i) out += ", ";
        out += t.labels()[i].text();
      }
      return out + "}";
    }
  }
  return {};
}

bool type_accepts(const PortType& type, const Value& value) {
  switch (type.kind()) {
    case PortKind::any: return true;
    case PortKind::integer: return type_of(value) == ValueType::integer;
    case PortKind::real: return is_numeric(type_of(value));
    case PortKind::enumeration: {
      const auto* label = std::get_if<Label>(&value);
      return label != nullptr && type.has_label(*label);
    }
  }
  return false;
}

bool port_accepts(const Port& port, const Value& value) { return type_accepts(port.type, value); }

bool coupling_compatible(const PortType& source, const PortType& target) {
  if (target.kind() == PortKind::any) return true;
  switch (source.kind()) {
    case PortKind::any: return false;
    case PortKind::integer: return target.kind() == PortKind::integer || target.kind() == PortKind::real;
    case PortKind::real: return target.kind() == PortKind::real;
    case PortKind::enumeration:
      return target.kind() == PortKind::enumeration &&
             std::all_of(source.labels().begin(), source.labels().end(),
                         [&](const Label& l) { return target.has_label(l); });
  }
  return false;
}

const Port* find_port(std::span<const Port> ports, std::string_view name) {
  auto it = std::find_if(ports.begin(), ports.end(), [&](const Port& p) { return p.name == name; });
  return it == ports.end() ? nullptr : &*it;
}

Duration Duration::of(double value) {
  if (std::isnan(value) || value < 0.0) throw std::domain_error("duration must be >= 0");
  return Duration(value);
}

std::string_view rule_name(RuleId rule) noexcept {
  switch (rule) {
    case RuleId::R1: return "R1";
    case RuleId::R2: return "R2";
    case RuleId::R3: return "R3";
    case RuleId::R4: return "R4";
    case RuleId::R5: return "R5";
    case RuleId::RD: return "RD";
    case RuleId::RP: return "RP";
    case RuleId::RI: return "RI";
  }
  return "?";
}

std::string format_violation(const Violation& v) {
  return "RULE " + std::string(rule_name(v.rule)) + " " + v.location + ": " + v.message;
}

namespace {

std::string join_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += '\n';
    out += format_violation(v);
  }
  return out;
}

}  // namespace

ModelError::ModelError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

RuntimeViolation::RuntimeViolation(Violation v) : std::runtime_error(format_violation(v)), violation_(std::move(v)) {}

}  // namespace devsim
