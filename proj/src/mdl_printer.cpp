#include <sstream>

#include "devsim/mdl.hpp"

namespace devsim {

namespace {

void ports(std::ostream& out, const std::vector<Port>& list, std::string_view keyword) {
  for (const auto& p : list) out << keyword << ' ' << p.name << " : " << to_string(p.type) << '\n';
}

void atomic(std::ostream& out, const AtomicModel& m) {
  const BehaviorSpec& spec = m.behavior;
  out << "atomic " << m.name << '\n';
  for (const auto& p : spec.params) out << "param " << p.name << " = " << format_real(p.value) << '\n';
  ports(out, m.inports, "inport");
  ports(out, m.outports, "outport");
  for (const auto& v : spec.variables) out << "var " << v.name << " = " << format_value(v.initial) << '\n';
  for (const auto& p : spec.phases) {
    out << "phase " << p.name << " lifetime " << (p.lifetime ? to_string(*p.lifetime) : "inf") << '\n';
  }
  out << "init " << spec.phase(spec.initial).name << '\n';
  for (const auto& t : spec.transitions) {
    if (t.kind == TransitionKind::external) {
      out << "ext " << t.source << " --" << t.trigger << "--> " << t.target;
    } else {
      out << "int " << t.source << " --> " << t.target;
    }
    if (t.condition) out << " cond " << to_string(*t.condition);
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      out << (i == 0 ? " action " : ", ") << t.actions[i].variable << " = " << to_string(t.actions[i].value);
    }
    if (t.output) out << " output " << t.output->port << " ! " << to_string(t.output->value);
    out << '\n';
  }
  for (const auto& inv : spec.invariants) out << "invariant " << to_string(inv) << '\n';
}

void coupled(std::ostream& out, const CoupledModel& m) {
  out << "coupled " << m.name << '\n';
  ports(out, m.inports, "inport");
  ports(out, m.outports, "outport");
  for (const auto& s : m.submodels) out << "use " << s.model_name << " as " << s.instance << '\n';
  for (const auto& c : m.eic) out << "eic " << to_string(c.from) << " -> " << to_string(c.to) << '\n';
  for (const auto& c : m.ic) out << "ic " << to_string(c.from) << " -> " << to_string(c.to) << '\n';
  for (const auto& c : m.eoc) out << "eoc " << to_string(c.from) << " -> " << to_string(c.to) << '\n';
  if (!m.select.empty()) {
    out << "select";
    for (const auto& s : m.select) out << ' ' << s;
    out << '\n';
  }
}

}  // namespace

std::string print_model(const ModelDef& def) {
  std::ostringstream out;
  if (def.is_atomic()) {
    atomic(out, def.atomic());
  } else {
    coupled(out, def.coupled());
  }
  return out.str();
}

}  // namespace devsim
