#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvl/value.hpp"

namespace mvl {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Input, Register, Gate };

/// One vertex of the circuit DAG. `index` is the input position for Input
/// nodes and the register position for Register nodes.
struct Node {
  NodeKind kind = NodeKind::Gate;
  GateKind gate = GateKind::Not;
  std::uint32_t index = 0;
  std::vector<NodeId> operands;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Output {
  std::string name;
  NodeId node = 0;
  friend bool operator==(const Output&, const Output&) = default;
};

struct Register {
  std::string name;
  NodeId node = 0;        // the Register node reading the current state
  NodeId next_state = 0;  // node latched at the end of each cycle
  friend bool operator==(const Register&, const Register&) = default;
};

struct Warning {
  std::string message;
  std::optional<NodeId> node;
};

/// Immutable gate-level design. Nodes are stored in topological order: every
/// gate operand precedes the gate. Register nodes break the cycles of
/// sequential designs.
class Circuit {
 public:
  Circuit() = default;

  std::span<const Node> nodes() const noexcept { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t gate_count() const noexcept;

  std::span<const std::string> inputs() const noexcept { return input_names_; }
  std::size_t input_count() const noexcept { return input_names_.size(); }
  NodeId input_node(std::size_t index) const { return input_nodes_.at(index); }
  std::optional<std::size_t> input_index(std::string_view name) const;

  std::span<const Output> outputs() const noexcept { return outputs_; }
  /// Throws Errc::missing_output for an unknown name.
  const Output& output(std::string_view name) const;
  std::size_t output_index(std::string_view name) const;

  std::span<const Register> registers() const noexcept { return registers_; }
  bool is_sequential() const noexcept { return !registers_.empty(); }

  /// Signal names (definitions, inputs, registers) bound to nodes.
  const std::map<std::string, NodeId, std::less<>>& names() const noexcept { return names_; }
  /// Preferred display name of a node, if it carries one.
  std::optional<std::string_view> name_of(NodeId id) const;

  /// Structural equality: nodes, interface and names.
  friend bool operator==(const Circuit&, const Circuit&);

 private:
  friend class CircuitBuilder;
  friend struct CircuitAccess;

  std::vector<Node> nodes_;
  std::vector<std::string> input_names_;
  std::vector<NodeId> input_nodes_;
  std::vector<Output> outputs_;
  std::vector<Register> registers_;
  std::map<std::string, NodeId, std::less<>> names_;
  std::vector<std::optional<std::string>> primary_names_;
};

/// Programmatic construction. Gates may only reference existing nodes, so the
/// builder cannot create combinational cycles; registers close sequential
/// loops through `set_next_state`.
class CircuitBuilder {
 public:
  NodeId add_input(std::string name);
  NodeId add_register(std::string name);
  NodeId add_gate(GateKind kind, std::vector<NodeId> operands);
  NodeId add_not(NodeId a) { return add_gate(GateKind::Not, {a}); }
  NodeId add_and(std::vector<NodeId> ops) { return add_gate(GateKind::And, std::move(ops)); }
  NodeId add_or(std::vector<NodeId> ops) { return add_gate(GateKind::Or, std::move(ops)); }
  NodeId add_xor(NodeId a, NodeId b) { return add_gate(GateKind::Xor, {a, b}); }
  /// Binds a signal name to an existing node. The first name bound to a node
  /// becomes its display name.
  void name(NodeId node, std::string name);
  void set_next_state(NodeId register_node, NodeId next);
  void add_output(std::string name, NodeId node);

  std::size_t node_count() const noexcept { return circuit_.nodes_.size(); }

  /// Validates and returns the circuit; the builder is left empty.
  Circuit build();

 private:
  NodeId push(Node node);
  Circuit circuit_;
  std::vector<bool> next_state_set_;
};

struct ValidationReport {
  Circuit circuit;
  std::vector<Warning> warnings;
};

/// Checks the structural invariants and re-sorts nodes topologically (stable:
/// an already ordered circuit is returned unchanged). Unreferenced gates are
/// reported as warnings.
ValidationReport validate_and_order(const Circuit& circuit);

// ---------------------------------------------------------------------------
// Text format.

/// Expression tree as written in the source, before desugaring.
struct Expr {
  enum class Op : std::uint8_t { Ident, Not, And, Or, Xor, Implies };
  Op op = Op::Ident;
  std::string ident;
  std::vector<Expr> args;
  SourceLocation where;
};

/// Parses one expression (precedence: ~, &, ^, |, -> with -> right-associative).
Expr parse_expression(std::string_view text);

/// Binary evaluation of a raw expression with implication kept primitive.
BinaryValue evaluate_expression(const Expr& expr,
                                const std::map<std::string, BinaryValue, std::less<>>& env);

/// Parses the line-oriented netlist format:
///   inputs a b c      outputs f      reg q
///   f = a & ~b        q <= q ^ c
/// Implication is rewritten as ~a | b; chains of one operator become n-ary
/// AND/OR gates while XOR chains fold left into binary gates.
Circuit parse_circuit(std::string_view text);
/// Like parse_circuit but also returns validation warnings.
ValidationReport parse_circuit_report(std::string_view text);
Circuit load_circuit(const std::string& path);

struct PrintOptions {
  /// Inline every shared subexpression instead of naming it.
  bool expand_shared = false;
};

/// Deterministic canonical printer; its output parses back to the same circuit.
std::string print_circuit(const Circuit& circuit, const PrintOptions& options = {});

}  // namespace mvl
