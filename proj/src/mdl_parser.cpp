#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "devsim/mdl.hpp"

namespace devsim {

std::string_view category_name(DiagnosticCategory c) noexcept {
  switch (c) {
    case DiagnosticCategory::syntax: return "syntax error";
    case DiagnosticCategory::semantic: return "semantic error";
    case DiagnosticCategory::io: return "io error";
  }
  return "error";
}

ParseError::ParseError(DiagnosticCategory category, std::string file, int line, int column, std::string message)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         std::string(category_name(category)) + ": " + message),
      category_(category),
      file_(std::move(file)),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

std::string ParseError::diagnostic() const { return what(); }

namespace {

struct Pos {
  int line = 1;
  int col = 1;
};

enum class Tok : std::uint8_t { ident, integer, real, label, punct, newline, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  Pos pos;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::newline: return "end of line";
    case Tok::end: return "end of input";
    case Tok::label: return "label '" + t.text + "'";
    default: return "`" + t.text + "`";
  }
}

const std::set<std::string, std::less<>> kReserved = {
    "atomic", "coupled", "param",  "inport", "outport", "var", "phase", "lifetime", "init", "ext",
    "int",    "cond",    "action", "output", "invariant", "use", "as",    "eic",      "ic",   "eoc",
    "select", "and",     "or",     "not",    "true",      "false", "inf"};

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == '\n') {
        out.push_back({Tok::newline, "\n", here()});
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(identifier());
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(number());
      } else if (c == '\'') {
        out.push_back(label());
      } else {
        out.push_back(punct());
      }
    }
    out.push_back({Tok::newline, "\n", here()});
    out.push_back({Tok::end, "", here()});
    return out;
  }

 private:
  Pos here() const { return pos_; }

  void advance() {
    if (text_[i_] == '\n') {
      ++pos_.line;
      pos_.col = 1;
    } else {
      ++pos_.col;
    }
    ++i_;
  }

  bool at(std::string_view s) const { return text_.substr(i_, s.size()) == s; }

  Token identifier() {
    Token t{Tok::ident, {}, here()};
    while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
      t.text += text_[i_];
      advance();
    }
    return t;
  }

  Token number() {
    Token t{Tok::integer, {}, here()};
    auto digits = [&] {
      while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
        t.text += text_[i_];
        advance();
      }
    };
    digits();
    if (i_ + 1 < text_.size() && text_[i_] == '.' && std::isdigit(static_cast<unsigned char>(text_[i_ + 1]))) {
      t.kind = Tok::real;
      t.text += '.';
      advance();
      digits();
    }
    if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
      if (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
        t.kind = Tok::real;
        while (i_ < j) {
          t.text += text_[i_];
          advance();
        }
        digits();
      }
    }
    return t;
  }

  Token label() {
    Token t{Tok::label, {}, here()};
    advance();
    while (i_ < text_.size() && text_[i_] != '\'' && text_[i_] != '\n') {
      t.text += text_[i_];
      advance();
    }
    if (i_ >= text_.size() || text_[i_] != '\'') {
      throw ParseError(DiagnosticCategory::syntax, file_, t.pos.line, t.pos.col, "unterminated label literal");
    }
    advance();
    if (t.text.empty()) {
      throw ParseError(DiagnosticCategory::syntax, file_, t.pos.line, t.pos.col, "empty label literal");
    }
    return t;
  }

  Token punct() {
    static constexpr std::string_view kPuncts[] = {"-->", "->", "--", "<=", ">=", "==", "!=", "<", ">", "=", "+",
                                                   "-",   "*",  "/",  "(",  ")",  "{",  "}",  ",", ":", ".", "!"};
    for (auto p : kPuncts) {
      if (at(p)) {
        Token t{Tok::punct, std::string(p), here()};
        for (std::size_t k = 0; k < p.size(); ++k) advance();
        return t;
      }
    }
    const Pos p = here();
    throw ParseError(DiagnosticCategory::syntax, file_, p.line, p.col,
                     std::string("unexpected character '") + text_[i_] + "'");
  }

  std::string_view text_;
  const std::string& file_;
  std::size_t i_ = 0;
  Pos pos_;
};

// Expression tree before name resolution.
struct RawExpr {
  ExprOp op = ExprOp::literal;
  Pos pos;
  Value literal;
  std::string name;  // identifier reference when op == variable
  std::vector<RawExpr> operands;
};

struct RawPort {
  std::string name;
  Direction direction;
  PortType type;
  Pos pos;
};

struct Named {
  std::string name;
  Pos pos;
};

struct RawAssignment {
  Named target;
  RawExpr value;
};

struct RawOutput {
  Named port;
  RawExpr value;
};

struct RawTransition {
  TransitionKind kind;
  Named source, trigger, target;
  std::optional<RawExpr> condition;
  std::vector<RawAssignment> actions;
  std::optional<RawOutput> output;
};

struct RawPhase {
  Named name;
  std::optional<RawExpr> lifetime;
};

struct RawRef {
  PortRef ref;
  Pos pos;
};

struct RawModel {
  bool coupled = false;
  Named name;
  std::vector<std::pair<Named, double>> params;
  std::vector<RawPort> ports;
  std::vector<std::pair<Named, Value>> vars;
  std::vector<RawPhase> phases;
  std::optional<Named> init;
  std::vector<RawTransition> transitions;
  std::vector<RawExpr> invariants;
  std::vector<std::pair<Named, Named>> uses;  // model, instance
  std::vector<std::pair<RawRef, RawRef>> eic, ic, eoc;
  std::optional<std::vector<Named>> select;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::string& file) : toks_(std::move(tokens)), file_(file) {}

  RawModel run() {
    skip_newlines();
    RawModel m;
    const Token& head = peek();
    if (!is_kw("atomic") && !is_kw("coupled")) syntax(head, "expected `atomic` or `coupled`, found " + describe(head));
    m.coupled = take().text == "coupled";
    m.name = name("model name");
    end_statement();
    for (skip_newlines(); peek().kind != Tok::end; skip_newlines()) {
      statement(m);
      end_statement();
    }
    return m;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  bool is_kw(std::string_view kw) const { return peek().kind == Tok::ident && peek().text == kw; }
  bool is_punct(std::string_view p) const { return peek().kind == Tok::punct && peek().text == p; }

  [[noreturn]] void syntax(const Token& at, const std::string& msg) const {
    throw ParseError(DiagnosticCategory::syntax, file_, at.pos.line, at.pos.col, msg);
  }

  void skip_newlines() {
    while (peek().kind == Tok::newline) take();
  }

  void end_statement() {
    if (peek().kind != Tok::newline && peek().kind != Tok::end) {
      syntax(peek(), "expected end of line, found " + describe(peek()));
    }
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) syntax(peek(), "expected `" + std::string(p) + "`, found " + describe(peek()));
    take();
  }

  void expect_kw(std::string_view kw) {
    if (!is_kw(kw)) syntax(peek(), "expected `" + std::string(kw) + "`, found " + describe(peek()));
    take();
  }

  Named name(std::string_view what) {
    const Token& t = peek();
    if (t.kind != Tok::ident) syntax(t, "expected " + std::string(what) + ", found " + describe(t));
    if (kReserved.count(t.text)) syntax(t, "`" + t.text + "` is a reserved word and cannot be a " + std::string(what));
    take();
    return {t.text, t.pos};
  }

  void statement(RawModel& m) {
    const Token& kw = peek();
    if (kw.kind != Tok::ident) syntax(kw, "expected a declaration, found " + describe(kw));
    static const std::set<std::string, std::less<>> atomic_only = {"param", "var",    "phase",    "init",
                                                                   "ext",   "int",    "invariant"};
    static const std::set<std::string, std::less<>> coupled_only = {"use", "eic", "ic", "eoc", "select"};
    if (m.coupled && atomic_only.count(kw.text)) syntax(kw, "`" + kw.text + "` is not allowed in a coupled model");
    if (!m.coupled && coupled_only.count(kw.text)) syntax(kw, "`" + kw.text + "` is not allowed in an atomic model");

    const std::string k = take().text;
    if (k == "param") {
      Named n = name("parameter name");
      expect_punct("=");
      m.params.emplace_back(n, as_real(literal_value(/*numeric_only=*/true)));
    } else if (k == "inport" || k == "outport") {
      Named n = name("port name");
      RawPort p{n.name, k == "inport" ? Direction::in : Direction::out, PortType::integer(), n.pos};
      if (is_punct(":")) {
        take();
        p.type = port_type();
      }
      m.ports.push_back(std::move(p));
    } else if (k == "var") {
      Named n = name("variable name");
      expect_punct("=");
      m.vars.emplace_back(n, literal_value(false));
    } else if (k == "phase") {
      RawPhase p{name("phase name"), std::nullopt};
      expect_kw("lifetime");
      if (is_kw("inf")) {
        take();
      } else {
        p.lifetime = expression();
      }
      m.phases.push_back(std::move(p));
    } else if (k == "init") {
      if (m.init) syntax(kw, "duplicate `init` declaration");
      m.init = name("phase name");
    } else if (k == "ext" || k == "int") {
      m.transitions.push_back(transition(k == "ext" ? TransitionKind::external : TransitionKind::internal));
    } else if (k == "invariant") {
      m.invariants.push_back(expression());
    } else if (k == "use") {
      Named model = name("model name");
      expect_kw("as");
      m.uses.emplace_back(model, name("instance name"));
    } else if (k == "eic") {
      RawRef from = port_ref(false);
      expect_punct("->");
      m.eic.emplace_back(from, port_ref(true));
    } else if (k == "ic") {
      RawRef from = port_ref(true);
      expect_punct("->");
      m.ic.emplace_back(from, port_ref(true));
    } else if (k == "eoc") {
      RawRef from = port_ref(true);
      expect_punct("->");
      m.eoc.emplace_back(from, port_ref(false));
    } else if (k == "select") {
      if (m.select) syntax(kw, "duplicate `select` declaration");
      std::vector<Named> order{name("instance name")};
      while (peek().kind == Tok::ident || is_punct(",")) {
        if (is_punct(",")) take();
        order.push_back(name("instance name"));
      }
      m.select = std::move(order);
    } else {
      syntax(kw, "unknown declaration `" + k + "`");
    }
  }

  RawRef port_ref(bool qualified) {
    const Pos pos = peek().pos;
    Named first = name(qualified ? "instance name" : "port name");
    if (!qualified) return {{"", first.name}, pos};
    expect_punct(".");
    return {{first.name, name("port name").name}, pos};
  }

  PortType port_type() {
    const Token& t = peek();
    if (is_punct("{")) {
      take();
      std::vector<Label> labels;
      for (;;) {
        labels.emplace_back(name("enumeration label").name);
        if (is_punct("}")) break;
        expect_punct(",");
      }
      take();
      try {
        return PortType::enumeration(std::move(labels));
      } catch (const std::invalid_argument& e) {
        syntax(t, e.what());
      }
    }
    if (t.kind == Tok::ident) {
      if (t.text == "int") return take(), PortType::integer();
      if (t.text == "real") return take(), PortType::real();
      if (t.text == "any") return take(), PortType::any();
    }
    syntax(t, "expected port type (int, real, any or {labels}), found " + describe(t));
  }

  Value literal_value(bool numeric_only) {
    const Token& t = peek();
    bool negative = false;
    if (is_punct("-")) {
      negative = true;
      take();
    }
    const Token& v = peek();
    if (v.kind == Tok::integer || v.kind == Tok::real) {
      take();
      return number(v, negative);
    }
    if (!negative && !numeric_only) {
      if (v.kind == Tok::label) return take(), Value{Label(v.text)};
      if (is_kw("true")) return take(), Value{true};
      if (is_kw("false")) return take(), Value{false};
    }
    syntax(t, std::string("expected ") + (numeric_only ? "a number" : "a literal") + ", found " + describe(t));
  }

  Value number(const Token& t, bool negative) {
    const std::string text = negative ? "-" + t.text : t.text;
    if (t.kind == Tok::integer) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc()) syntax(t, "integer literal out of range");
      return v;
    }
    double d = 0;
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    in >> d;
    if (!in) syntax(t, "malformed real literal");
    return d;
  }

  RawTransition transition(TransitionKind kind) {
    RawTransition t{kind, {}, {}, {}, std::nullopt, {}, std::nullopt};
    t.source = name("phase name");
    if (kind == TransitionKind::external) {
      expect_punct("--");
      t.trigger = name("event name");
      expect_punct("-->");
    } else {
      t.trigger = {std::string(kInternalTrigger), peek().pos};
      expect_punct("-->");
    }
    t.target = name("phase name");
    while (peek().kind == Tok::ident) {
      const Token& clause = peek();
      if (clause.text == "cond") {
        if (t.condition) syntax(clause, "duplicate `cond` clause");
        take();
        t.condition = expression();
      } else if (clause.text == "action") {
        if (!t.actions.empty()) syntax(clause, "duplicate `action` clause");
        take();
        do {
          if (is_punct(",")) take();
          Named target = name("variable name");
          expect_punct("=");
          t.actions.push_back({target, expression()});
        } while (is_punct(","));
      } else if (clause.text == "output") {
        if (kind == TransitionKind::external) {
          syntax(clause, "external transitions cannot carry an output clause");
        }
        if (t.output) syntax(clause, "duplicate `output` clause");
        take();
        Named port = name("port name");
        expect_punct("!");
        t.output = RawOutput{port, expression()};
      } else {
        syntax(clause, "expected `cond`, `action`" + std::string(kind == TransitionKind::internal ? ", `output`" : "") +
                           " or end of line, found " + describe(clause));
      }
    }
    return t;
  }

  // or > and > not > comparison > additive > multiplicative > unary > primary
  RawExpr expression() { return disjunction(); }

  RawExpr make(ExprOp op, Pos pos, std::vector<RawExpr> operands) {
    RawExpr e;
    e.op = op;
    e.pos = pos;
    e.operands = std::move(operands);
    return e;
  }

  RawExpr disjunction() {
    RawExpr lhs = conjunction();
    while (is_kw("or")) {
      const Pos p = take().pos;
      lhs = make(ExprOp::logical_or, p, {std::move(lhs), conjunction()});
    }
    return lhs;
  }

  RawExpr conjunction() {
    RawExpr lhs = negation();
    while (is_kw("and")) {
      const Pos p = take().pos;
      lhs = make(ExprOp::logical_and, p, {std::move(lhs), negation()});
    }
    return lhs;
  }

  RawExpr negation() {
    if (is_kw("not")) {
      const Pos p = take().pos;
      return make(ExprOp::logical_not, p, {negation()});
    }
    return comparison();
  }

  RawExpr comparison() {
    static const std::map<std::string, ExprOp, std::less<>> ops = {{"<", ExprOp::lt},  {"<=", ExprOp::le},
                                                                   {">", ExprOp::gt},  {">=", ExprOp::ge},
                                                                   {"==", ExprOp::eq}, {"!=", ExprOp::ne}};
    RawExpr lhs = additive();
    if (peek().kind == Tok::punct) {
      if (auto it = ops.find(peek().text); it != ops.end()) {
        const Pos p = take().pos;
        lhs = make(it->second, p, {std::move(lhs), additive()});
        if (peek().kind == Tok::punct && ops.count(peek().text)) {
          syntax(peek(), "comparisons cannot be chained; use `and`");
        }
      }
    }
    return lhs;
  }

  RawExpr additive() {
    RawExpr lhs = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      const Token& t = take();
      lhs = make(t.text == "+" ? ExprOp::add : ExprOp::sub, t.pos, {std::move(lhs), multiplicative()});
    }
    return lhs;
  }

  RawExpr multiplicative() {
    RawExpr lhs = unary();
    while (is_punct("*") || is_punct("/")) {
      const Token& t = take();
      lhs = make(t.text == "*" ? ExprOp::mul : ExprOp::div, t.pos, {std::move(lhs), unary()});
    }
    return lhs;
  }

  RawExpr unary() {
    if (is_punct("-")) {
      const Pos p = take().pos;
      // A minus directly in front of a numeric literal is part of the literal.
      if (peek().kind == Tok::integer || peek().kind == Tok::real) {
        const Token& t = take();
        RawExpr lit;
        lit.pos = p;
        lit.literal = number(t, true);
        return lit;
      }
      return make(ExprOp::negate, p, {unary()});
    }
    return primary();
  }

  RawExpr primary() {
    const Token& t = peek();
    RawExpr e;
    e.pos = t.pos;
    switch (t.kind) {
      case Tok::integer:
      case Tok::real:
        take();
        e.literal = number(t, false);
        return e;
      case Tok::label:
        take();
        e.literal = Label(t.text);
        return e;
      case Tok::ident:
        if (t.text == "true" || t.text == "false") {
          take();
          e.literal = t.text == "true";
          return e;
        }
        if (kReserved.count(t.text)) syntax(t, "expected an expression, found " + describe(t));
        take();
        e.op = ExprOp::variable;
        e.name = t.text;
        return e;
      case Tok::punct:
        if (t.text == "(") {
          take();
          RawExpr inner = expression();
          expect_punct(")");
          return inner;
        }
        break;
      default: break;
    }
    syntax(t, "expected an expression, found " + describe(t));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const std::string& file_;
};

// Name resolution and type checking.
class Resolver {
 public:
  Resolver(const std::string& file, const ModelResolver& resolver, std::vector<std::string>& loading,
           std::map<std::string, ModelPtr, std::less<>>& cache)
      : file_(file), resolver_(resolver), loading_(loading), cache_(cache) {}

  ModelPtr resolve(const RawModel& raw) {
    if (raw.coupled) return std::make_shared<const CoupledModel>(coupled(raw));
    return std::make_shared<const AtomicModel>(atomic(raw));
  }

 private:
  [[noreturn]] void semantic(Pos p, const std::string& msg) const {
    throw ParseError(DiagnosticCategory::semantic, file_, p.line, p.col, msg);
  }

  void ports(const RawModel& raw, std::vector<Port>& inports, std::vector<Port>& outports) {
    for (const auto& p : raw.ports) {
      auto& list = p.direction == Direction::in ? inports : outports;
      if (find_port(list, p.name)) {
        semantic(p.pos, "duplicate " + std::string(p.direction == Direction::in ? "inport" : "outport") + " `" +
                            p.name + "`");
      }
      list.push_back({p.name, p.direction, p.type});
    }
  }

  struct Scope {
    const BehaviorSpec* spec;
    bool allow_elapsed;
  };

  Expr expr(const RawExpr& raw, const Scope& scope) {
    if (raw.op == ExprOp::literal) return Expr::constant(raw.literal);
    if (raw.op == ExprOp::variable) {
      if (raw.name == "e") {
        if (!scope.allow_elapsed) semantic(raw.pos, "elapsed time `e` is not available here");
        return Expr::elapsed_time();
      }
      const auto& vars = scope.spec->variables;
      for (std::uint32_t i = 0; i < vars.size(); ++i) {
        if (vars[i].name == raw.name) return Expr::variable(raw.name, i, type_of(vars[i].initial));
      }
      const auto& params = scope.spec->params;
      for (std::uint32_t i = 0; i < params.size(); ++i) {
        if (params[i].name == raw.name) return Expr::parameter(raw.name, i);
      }
      semantic(raw.pos, "undeclared variable `" + raw.name + "`");
    }
    try {
      if (raw.operands.size() == 1) return Expr::unary(raw.op, expr(raw.operands[0], scope));
      return Expr::binary(raw.op, expr(raw.operands[0], scope), expr(raw.operands[1], scope));
    } catch (const std::invalid_argument& e) {
      semantic(raw.pos, std::string("type mismatch: ") + e.what());
    }
  }

  Expr typed(const RawExpr& raw, const Scope& scope, bool numeric, std::string_view what) {
    Expr e = expr(raw, scope);
    const bool ok = numeric ? is_numeric(e.type) : e.type == ValueType::boolean;
    if (!ok) {
      semantic(raw.pos, "type mismatch: " + std::string(what) + " must be " + (numeric ? "numeric" : "boolean") +
                            ", found " + std::string(type_name(e.type)));
    }
    return e;
  }

  PhaseId phase_id(const BehaviorSpec& spec, const Named& n) {
    auto id = spec.find_phase(n.name);
    if (!id) semantic(n.pos, "unknown phase `" + n.name + "`");
    return *id;
  }

  AtomicModel atomic(const RawModel& raw) {
    AtomicModel m;
    m.name = raw.name.name;
    ports(raw, m.inports, m.outports);
    BehaviorSpec& spec = m.behavior;
    spec.name = m.name;
    for (const auto& p : m.inports) spec.inputs.push_back(p.name);
    for (const auto& p : m.outports) spec.outputs.push_back(p.name);

    for (const auto& [n, value] : raw.params) {
      if (std::any_of(spec.params.begin(), spec.params.end(), [&](const Param& p) { return p.name == n.name; })) {
        semantic(n.pos, "duplicate parameter `" + n.name + "`");
      }
      if (n.name == "e") semantic(n.pos, "`e` is reserved for the elapsed time");
      spec.params.push_back({n.name, value});
    }
    for (const auto& [n, value] : raw.vars) {
      if (n.name == "e") semantic(n.pos, "`e` is reserved for the elapsed time");
      if (std::any_of(spec.variables.begin(), spec.variables.end(), [&](const auto& v) { return v.name == n.name; })) {
        semantic(n.pos, "duplicate variable `" + n.name + "`");
      }
      if (std::any_of(spec.params.begin(), spec.params.end(), [&](const Param& p) { return p.name == n.name; })) {
        semantic(n.pos, "parameter `" + n.name + "` shadows a variable of the same name");
      }
      spec.variables.push_back({n.name, value});
    }

    for (const auto& p : raw.phases) {
      if (spec.find_phase(p.name.name)) semantic(p.name.pos, "duplicate phase `" + p.name.name + "`");
      spec.phases.push_back({p.name.name, std::nullopt});
    }
    const Scope lifetime_scope{&spec, false};
    for (std::size_t i = 0; i < raw.phases.size(); ++i) {
      if (raw.phases[i].lifetime) {
        spec.phases[i].lifetime = typed(*raw.phases[i].lifetime, lifetime_scope, true, "lifetime");
      }
    }
    if (!raw.init && spec.phases.empty()) semantic(raw.name.pos, "model `" + m.name + "` declares no phase");
    if (!raw.init) semantic(raw.name.pos, "model `" + m.name + "` has no `init` declaration");
    spec.initial = phase_id(spec, *raw.init);

    const Scope scope{&spec, true};
    for (const auto& rt : raw.transitions) {
      TransitionDef t;
      t.kind = rt.kind;
      t.source = rt.source.name;
      t.target = rt.target.name;
      t.trigger = rt.trigger.name;
      t.source_id = phase_id(spec, rt.source);
      t.target_id = phase_id(spec, rt.target);
      if (rt.kind == TransitionKind::external) {
        auto id = spec.find_input(rt.trigger.name);
        if (!id) semantic(rt.trigger.pos, "unknown input event `" + rt.trigger.name + "`");
        t.trigger_id = *id;
      }
      if (rt.condition) t.condition = typed(*rt.condition, scope, false, "condition");
      for (const auto& a : rt.actions) t.actions.push_back(assignment(spec, a, scope));
      if (rt.output) t.output = output(spec, m.outports, *rt.output, scope);
      spec.transitions.push_back(std::move(t));
    }
    for (const auto& inv : raw.invariants) spec.invariants.push_back(typed(inv, scope, false, "invariant"));
    return m;
  }

  Assignment assignment(const BehaviorSpec& spec, const RawAssignment& a, const Scope& scope) {
    const auto& vars = spec.variables;
    auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == a.target.name; });
    if (it == vars.end()) semantic(a.target.pos, "undeclared variable `" + a.target.name + "`");
    Expr value = expr(a.value, scope);
    const ValueType var_type = type_of(it->initial);
    const bool ok = value.type == var_type || (var_type == ValueType::real && value.type == ValueType::integer);
    if (!ok) {
      semantic(a.value.pos, "type mismatch: cannot assign " + std::string(type_name(value.type)) + " to " +
                                std::string(type_name(var_type)) + " variable `" + it->name + "`");
    }
    return {it->name, static_cast<std::uint32_t>(it - vars.begin()), std::move(value)};
  }

  OutputClause output(const BehaviorSpec& spec, const std::vector<Port>& outports, const RawOutput& o,
                      const Scope& scope) {
    const Port* port = find_port(outports, o.port.name);
    if (!port) semantic(o.port.pos, "unknown output port `" + o.port.name + "`");
    Expr value = expr(o.value, scope);
    bool ok = false;
    switch (port->type.kind()) {
      case PortKind::any: ok = true; break;
      case PortKind::integer: ok = value.type == ValueType::integer; break;
      case PortKind::real: ok = is_numeric(value.type); break;
      case PortKind::enumeration:
        ok = value.type == ValueType::label &&
             (value.op != ExprOp::literal || port->type.has_label(std::get<Label>(value.literal)));
        break;
    }
    if (!ok) {
      semantic(o.value.pos, "type mismatch: port `" + port->name + "` of type " + to_string(port->type) +
                                " cannot carry " + to_string(value));
    }
    const auto index = std::find(spec.outputs.begin(), spec.outputs.end(), port->name) - spec.outputs.begin();
    return {port->name, OutputId{static_cast<std::uint32_t>(index)}, std::move(value)};
  }

  CoupledModel coupled(const RawModel& raw) {
    CoupledModel m;
    m.name = raw.name.name;
    ports(raw, m.inports, m.outports);

    loading_.push_back(m.name);
    for (const auto& [model, inst] : raw.uses) {
      if (m.find_submodel(inst.name)) semantic(inst.pos, "duplicate instance `" + inst.name + "`");
      m.submodels.push_back({inst.name, model.name, load_submodel(model)});
    }
    loading_.pop_back();

    auto ports_of = [&](const RawRef& r, bool inputs) -> const std::vector<Port>& {
      if (r.ref.instance.empty()) return inputs ? m.inports : m.outports;
      const Submodel* sub = m.find_submodel(r.ref.instance);
      if (!sub) semantic(r.pos, "unknown instance `" + r.ref.instance + "`");
      if (!sub->model) {
        semantic(r.pos, "cannot couple to instance `" + sub->instance + "`: it refers to an enclosing model");
      }
      return inputs ? model_inports(*sub->model) : model_outports(*sub->model);
    };
    auto require = [&](const RawRef& r, bool inputs) {
      if (!find_port(ports_of(r, inputs), r.ref.port)) {
        const std::string owner = r.ref.instance.empty() ? "`" + m.name + "`" : "instance `" + r.ref.instance + "`";
        semantic(r.pos, owner + " has no " + (inputs ? "inport" : "outport") + " `" + r.ref.port + "`");
      }
    };
    for (const auto& [from, to] : raw.eic) {
      require(from, true);
      require(to, true);
      m.eic.push_back({from.ref, to.ref});
    }
    for (const auto& [from, to] : raw.ic) {
      require(from, false);
      require(to, true);
      m.ic.push_back({from.ref, to.ref});
    }
    for (const auto& [from, to] : raw.eoc) {
      require(from, false);
      require(to, false);
      m.eoc.push_back({from.ref, to.ref});
    }

    if (raw.select) {
      for (const auto& n : *raw.select) {
        if (!m.find_submodel(n.name)) semantic(n.pos, "unknown instance `" + n.name + "` in select");
        if (std::find(m.select.begin(), m.select.end(), n.name) != m.select.end()) {
          semantic(n.pos, "instance `" + n.name + "` appears twice in select");
        }
        m.select.push_back(n.name);
      }
      if (m.select.size() != m.submodels.size()) {
        semantic(raw.select->front().pos, "select must list every instance exactly once");
      }
    } else {
      for (const auto& s : m.submodels) m.select.push_back(s.instance);
    }
    return m;
  }

  std::optional<ModelPtr> load_submodel(const Named& model) {
    if (std::find(loading_.begin(), loading_.end(), model.name) != loading_.end()) return std::nullopt;
    if (auto it = cache_.find(model.name); it != cache_.end()) return it->second;
    std::optional<ModelSource> source;
    if (resolver_) source = resolver_(model.name);
    if (!source) semantic(model.pos, "unknown model `" + model.name + "`");

    auto tokens = Lexer(source->text, source->file).run();
    RawModel raw = Parser(std::move(tokens), source->file).run();
    if (raw.name.name != model.name) {
      throw ParseError(DiagnosticCategory::semantic, source->file, raw.name.pos.line, raw.name.pos.col,
                       "file declares model `" + raw.name.name + "`, expected `" + model.name + "`");
    }
    ModelPtr ptr = Resolver(source->file, resolver_, loading_, cache_).resolve(raw);
    cache_.emplace(model.name, ptr);
    return ptr;
  }

  const std::string& file_;
  const ModelResolver& resolver_;
  std::vector<std::string>& loading_;
  std::map<std::string, ModelPtr, std::less<>>& cache_;
};

}  // namespace

ModelDef parse_model(std::string_view text, std::string_view file, const ModelResolver& resolver) {
  const std::string file_name(file);
  auto tokens = Lexer(text, file_name).run();
  RawModel raw = Parser(std::move(tokens), file_name).run();
  std::vector<std::string> loading;
  std::map<std::string, ModelPtr, std::less<>> cache;
  return ModelDef{Resolver(file_name, resolver, loading, cache).resolve(raw)};
}

ModelDef load_model_file(const std::filesystem::path& path) {
  auto read = [](const std::filesystem::path& p) -> std::optional<std::string> {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto text = read(path);
  if (!text) throw ParseError(DiagnosticCategory::io, path.string(), 1, 1, "cannot read file");
  const auto dir = path.parent_path();
  ModelResolver resolver = [dir, read](std::string_view name) -> std::optional<ModelSource> {
    const auto candidate = dir / (std::string(name) + ".mdl");
    auto t = read(candidate);
    if (!t) return std::nullopt;
    return ModelSource{std::move(*t), candidate.string()};
  };
  return parse_model(*text, path.string(), resolver);
}

}  // namespace devsim
