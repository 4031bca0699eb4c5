#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "mvl/netlist.hpp"

namespace mvl {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' ||
         c == ']';
}

enum class Tok { Ident, Not, And, Or, Xor, Implies, LParen, RParen, Assign, Latch, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLocation where;
};

class Lexer {
 public:
  Lexer(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line_.size()) {
      const char c = line_[i];
      const SourceLocation at{line_no_, i + 1};
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (ident_start(c)) {
        std::size_t j = i + 1;
        while (j < line_.size() && ident_char(line_[j])) ++j;
        out.push_back({Tok::Ident, std::string(line_.substr(i, j - i)), at});
        i = j;
      } else if (line_.substr(i, 2) == "->") {
        out.push_back({Tok::Implies, "->", at});
        i += 2;
      } else if (line_.substr(i, 2) == "<=") {
        out.push_back({Tok::Latch, "<=", at});
        i += 2;
      } else {
        Tok kind;
        switch (c) {
          case '~': kind = Tok::Not; break;
          case '&': kind = Tok::And; break;
          case '|': kind = Tok::Or; break;
          case '^': kind = Tok::Xor; break;
          case '(': kind = Tok::LParen; break;
          case ')': kind = Tok::RParen; break;
          case '=': kind = Tok::Assign; break;
          default:
            throw Error(Errc::syntax, fmt::format("unexpected character '{}'", c), at);
        }
        out.push_back({kind, std::string(1, c), at});
        ++i;
      }
    }
    out.push_back({Tok::End, "", {line_no_, line_.size() + 1}});
    return out;
  }

 private:
  std::string_view line_;
  std::size_t line_no_;
};

class ExprParser {
 public:
  explicit ExprParser(std::span<const Token> toks) : toks_(toks) {}

  Expr parse_all() {
    Expr e = implies();
    if (peek().kind != Tok::End) fail("unexpected token");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  [[noreturn]] void fail(std::string_view what) const {
    const Token& t = peek();
    throw Error(Errc::syntax,
                t.kind == Tok::End ? fmt::format("{}: unexpected end of line", what)
                                   : fmt::format("{}: '{}'", what, t.text),
                t.where);
  }

  Expr implies() {
    Expr lhs = disjunction();
    if (peek().kind != Tok::Implies) return lhs;
    const SourceLocation at = take().where;
    Expr rhs = implies();
    return Expr{Expr::Op::Implies, {}, {std::move(lhs), std::move(rhs)}, at};
  }

  Expr chain(Tok tok, Expr::Op op, Expr (ExprParser::*next)()) {
    Expr first = (this->*next)();
    if (peek().kind != tok) return first;
    Expr node{op, {}, {}, peek().where};
    node.args.push_back(std::move(first));
    while (peek().kind == tok) {
      take();
      node.args.push_back((this->*next)());
    }
    return node;
  }

  Expr disjunction() { return chain(Tok::Or, Expr::Op::Or, &ExprParser::exclusive); }
  Expr exclusive() { return chain(Tok::Xor, Expr::Op::Xor, &ExprParser::conjunction); }
  Expr conjunction() { return chain(Tok::And, Expr::Op::And, &ExprParser::unary); }

  Expr unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: {
        const SourceLocation at = take().where;
        Expr inner = unary();
        return Expr{Expr::Op::Not, {}, {std::move(inner)}, at};
      }
      case Tok::LParen: {
        take();
        Expr inner = implies();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        take();
        return inner;
      }
      case Tok::Ident: {
        const Token& id = take();
        return Expr{Expr::Op::Ident, id.text, {}, id.where};
      }
      default:
        fail("expected an identifier, '~' or '('");
    }
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
};

bool is_keyword(std::string_view s) { return s == "inputs" || s == "outputs" || s == "reg"; }

struct Definition {
  std::string name;
  Expr expr;
  SourceLocation where;
};

struct Source {
  std::vector<std::pair<std::string, SourceLocation>> inputs, outputs, regs;
  std::vector<Definition> defs;
  std::vector<Definition> latches;
};

Source read_source(std::string_view text) {
  Source src;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto toks = Lexer(line, line_no).run();
    if (toks.front().kind == Tok::End) continue;
    const Token& head = toks.front();
    if (head.kind != Tok::Ident) {
      throw Error(Errc::syntax, fmt::format("unexpected '{}' at start of line", head.text),
                  head.where);
    }
    if (is_keyword(head.text) && toks[1].kind != Tok::Assign && toks[1].kind != Tok::Latch) {
      auto& list = head.text == "inputs" ? src.inputs : head.text == "outputs" ? src.outputs : src.regs;
      if (toks[1].kind == Tok::End) {
        throw Error(Errc::syntax, fmt::format("'{}' needs at least one name", head.text),
                    toks[1].where);
      }
      for (std::size_t i = 1; toks[i].kind != Tok::End; ++i) {
        if (toks[i].kind != Tok::Ident || is_keyword(toks[i].text)) {
          throw Error(Errc::syntax, fmt::format("expected a name, got '{}'", toks[i].text),
                      toks[i].where);
        }
        list.emplace_back(toks[i].text, toks[i].where);
      }
      continue;
    }
    if (is_keyword(head.text)) {
      throw Error(Errc::syntax, fmt::format("'{}' is a reserved word", head.text), head.where);
    }
    if (toks[1].kind != Tok::Assign && toks[1].kind != Tok::Latch) {
      throw Error(Errc::syntax, "expected '=' or '<=' after the signal name", toks[1].where);
    }
    Expr e = ExprParser(std::span<const Token>(toks).subspan(2)).parse_all();
    auto& list = toks[1].kind == Tok::Assign ? src.defs : src.latches;
    list.push_back({head.text, std::move(e), head.where});
  }
  return src;
}

class Elaborator {
 public:
  explicit Elaborator(const Source& src) : src_(src) {}

  Circuit run() {
    for (const auto& [name, at] : src_.inputs) declare(name, at, b_.add_input(name));
    for (const auto& [name, at] : src_.regs) declare(name, at, b_.add_register(name));
    for (const Definition& d : src_.defs) {
      if (bound_.count(d.name) || !defs_.emplace(d.name, &d).second) {
        throw Error(Errc::duplicate_definition, fmt::format("'{}' is defined twice", d.name),
                    d.where);
      }
    }
    std::unordered_map<std::string, const Definition*> latch_of;
    for (const Definition& l : src_.latches) {
      const auto it = bound_.find(l.name);
      if (it == bound_.end() || b_node_kind(l.name) != NodeKind::Register) {
        throw Error(Errc::undeclared_identifier,
                    fmt::format("'{}' is not a declared register", l.name), l.where);
      }
      if (!latch_of.emplace(l.name, &l).second) {
        throw Error(Errc::duplicate_definition,
                    fmt::format("register '{}' has two next-state assignments", l.name), l.where);
      }
    }
    for (const auto& [name, at] : src_.regs) {
      if (!latch_of.count(name)) {
        throw Error(Errc::syntax, fmt::format("register '{}' has no next-state assignment", name),
                    at);
      }
    }
    if (src_.outputs.empty()) throw Error(Errc::missing_output, "no outputs declared");

    std::vector<std::pair<std::string, NodeId>> outs;
    for (const auto& [name, at] : src_.outputs) outs.emplace_back(name, resolve(name, at));
    for (const auto& [name, at] : src_.regs) {
      const Definition* l = latch_of.at(name);
      b_.set_next_state(bound_.at(name), build(l->expr));
    }
    std::vector<std::string> rest;
    for (const auto& [name, def] : defs_) rest.push_back(name);
    std::sort(rest.begin(), rest.end());
    for (const std::string& name : rest) resolve(name, defs_.at(name)->where);

    for (auto& [name, node] : outs) b_.add_output(name, node);
    return b_.build();
  }

 private:
  NodeKind b_node_kind(const std::string& name) const { return kinds_.at(name); }

  void declare(const std::string& name, SourceLocation at, NodeId id) {
    if (bound_.count(name)) {
      throw Error(Errc::duplicate_definition, fmt::format("'{}' is declared twice", name), at);
    }
    bound_.emplace(name, id);
    kinds_.emplace(name, src_node_kind(name));
  }

  NodeKind src_node_kind(const std::string& name) const {
    for (const auto& r : src_.regs)
      if (r.first == name) return NodeKind::Register;
    return NodeKind::Input;
  }

  NodeId resolve(const std::string& name, SourceLocation at) {
    if (auto it = bound_.find(name); it != bound_.end()) return it->second;
    const auto def = defs_.find(name);
    if (def == defs_.end()) {
      throw Error(Errc::undeclared_identifier, fmt::format("'{}' is not declared", name), at);
    }
    if (!active_.insert(name).second) {
      throw Error(Errc::combinational_cycle,
                  fmt::format("combinational cycle through '{}'", name), def->second->where);
    }
    const NodeId id = build(def->second->expr);
    active_.erase(name);
    bound_.emplace(name, id);
    b_.name(id, name);
    return id;
  }

  NodeId build(const Expr& e) {
    switch (e.op) {
      case Expr::Op::Ident:
        return resolve(e.ident, e.where);
      case Expr::Op::Not:
        return b_.add_not(build(e.args[0]));
      case Expr::Op::And:
      case Expr::Op::Or: {
        std::vector<NodeId> ops;
        for (const Expr& a : e.args) ops.push_back(build(a));
        return b_.add_gate(e.op == Expr::Op::And ? GateKind::And : GateKind::Or, std::move(ops));
      }
      case Expr::Op::Xor: {
        NodeId acc = build(e.args[0]);
        for (std::size_t i = 1; i < e.args.size(); ++i) acc = b_.add_xor(acc, build(e.args[i]));
        return acc;
      }
      case Expr::Op::Implies: {
        const NodeId premise = b_.add_not(build(e.args[0]));
        return b_.add_or({premise, build(e.args[1])});
      }
    }
    throw Error(Errc::invalid_argument, "bad expression");
  }

  const Source& src_;
  CircuitBuilder b_;
  std::unordered_map<std::string, NodeId> bound_;
  std::unordered_map<std::string, NodeKind> kinds_;
  std::map<std::string, const Definition*> defs_;
  std::set<std::string> active_;
};

}  // namespace

Expr parse_expression(std::string_view text) {
  const auto toks = Lexer(text, 1).run();
  return ExprParser(toks).parse_all();
}

BinaryValue evaluate_expression(const Expr& expr,
                                const std::map<std::string, BinaryValue, std::less<>>& env) {
  const auto t = [](bool b) { return b ? BinaryValue::T : BinaryValue::F; };
  switch (expr.op) {
    case Expr::Op::Ident: {
      const auto it = env.find(expr.ident);
      if (it == env.end()) {
        throw Error(Errc::undeclared_identifier, fmt::format("'{}' has no value", expr.ident),
                    expr.where);
      }
      return it->second;
    }
    case Expr::Op::Not:
      return !evaluate_expression(expr.args[0], env);
    case Expr::Op::And: {
      bool all = true;
      for (const Expr& a : expr.args) all = all && evaluate_expression(a, env) == BinaryValue::T;
      return t(all);
    }
    case Expr::Op::Or: {
      bool any = false;
      for (const Expr& a : expr.args) any = any || evaluate_expression(a, env) == BinaryValue::T;
      return t(any);
    }
    case Expr::Op::Xor: {
      bool acc = false;
      for (const Expr& a : expr.args) acc = acc != (evaluate_expression(a, env) == BinaryValue::T);
      return t(acc);
    }
    case Expr::Op::Implies: {
      // Material implication: false only for T -> F.
      const bool p = evaluate_expression(expr.args[0], env) == BinaryValue::T;
      const bool q = evaluate_expression(expr.args[1], env) == BinaryValue::T;
      return t(!(p && !q));
    }
  }
  throw Error(Errc::invalid_argument, "bad expression");
}

ValidationReport parse_circuit_report(std::string_view text) {
  const Source src = read_source(text);
  Circuit c = Elaborator(src).run();
  return validate_and_order(c);
}

Circuit parse_circuit(std::string_view text) { return parse_circuit_report(text).circuit; }

Circuit load_circuit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_circuit(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}:{}", path, e.what()));
  }
}

// ---------------------------------------------------------------------------
// Printer

namespace {

class Printer {
 public:
  Printer(const Circuit& c, const PrintOptions& opt) : c_(c), opt_(opt) {
    const auto nodes = c.nodes();
    std::vector<std::size_t> readers(nodes.size(), 0);
    for (const Node& n : nodes)
      for (NodeId op : n.operands) ++readers[op];
    for (const Output& o : c.outputs()) ++readers[o.node];
    for (const Register& r : c.registers()) ++readers[r.next_state];

    std::set<std::string, std::less<>> taken;
    for (const auto& [name, id] : c.names()) taken.insert(name);

    label_.resize(nodes.size());
    for (NodeId id = 0; id < nodes.size(); ++id) {
      if (const auto name = c.name_of(id)) {
        label_[id] = std::string(*name);
      } else if (!opt_.expand_shared && nodes[id].kind == NodeKind::Gate && readers[id] > 1) {
        std::string fresh = fmt::format("_n{}", id);
        while (taken.count(fresh)) fresh += "_";
        taken.insert(fresh);
        label_[id] = fresh;
      }
    }
  }

  std::string run() {
    std::string out;
    const auto list = [&](std::string_view key, const std::vector<std::string>& names) {
      if (names.empty()) return;
      out += key;
      for (const auto& n : names) out += " " + n;
      out += "\n";
    };
    list("inputs", {c_.inputs().begin(), c_.inputs().end()});
    std::vector<std::string> outs;
    for (const Output& o : c_.outputs()) outs.push_back(o.name);
    list("outputs", outs);
    for (const Register& r : c_.registers()) out += "reg " + r.name + "\n";

    const auto nodes = c_.nodes();
    for (NodeId id = 0; id < nodes.size(); ++id) {
      if (nodes[id].kind != NodeKind::Gate || !label_[id]) continue;
      out += fmt::format("{} = {}\n", *label_[id], body(id));
    }
    // Names bound to a node whose display name differs.
    for (const auto& [name, id] : c_.names()) {
      if (label_[id] && *label_[id] != name) out += fmt::format("{} = {}\n", name, *label_[id]);
    }
    for (const Register& r : c_.registers()) {
      out += fmt::format("{} <= {}\n", r.name, operand(r.next_state));
    }
    return out;
  }

 private:
  std::string operand(NodeId id) const {
    if (label_[id]) return *label_[id];
    const Node& n = c_.node(id);
    if (n.gate == GateKind::Not) return body(id);
    return "(" + body(id) + ")";
  }

  std::string body(NodeId id) const {
    const Node& n = c_.node(id);
    if (n.kind != NodeKind::Gate) return *label_[id];
    if (n.gate == GateKind::Not) return "~" + operand(n.operands[0]);
    std::string_view sep = n.gate == GateKind::And ? " & " : n.gate == GateKind::Or ? " | " : " ^ ";
    std::string s;
    for (std::size_t i = 0; i < n.operands.size(); ++i) {
      if (i) s += sep;
      s += operand(n.operands[i]);
    }
    return s;
  }

  const Circuit& c_;
  PrintOptions opt_;
  std::vector<std::optional<std::string>> label_;
};

}  // namespace

std::string print_circuit(const Circuit& circuit, const PrintOptions& options) {
  return Printer(circuit, options).run();
}

}  // namespace mvl
