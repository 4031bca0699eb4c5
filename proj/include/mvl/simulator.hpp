#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvl/netlist.hpp"
#include "mvl/value.hpp"

namespace mvl {

/// Complete assignment of M values to the circuit inputs, by input position.
class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(std::vector<MValue> values) : values_(std::move(values)) {}

  /// Builds a valuation from "name=value" pairs; every input must appear once.
  static Valuation from_named(const Circuit& circuit,
                              const std::map<std::string, MValue, std::less<>>& named);
  /// Parses "a=2,b=-1,c=inf".
  static Valuation parse(const Circuit& circuit, std::string_view text,
                         const ValueSyntax& syntax = {});

  std::span<const MValue> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  MValue operator[](std::size_t i) const { return values_.at(i); }

 private:
  std::vector<MValue> values_;
};

/// Node values of one evaluation plus, for every gate, the operand position
/// its value was taken from.
template <class V>
struct BasicTrace {
  std::vector<V> node_values;
  std::vector<std::optional<NodeId>> provenance;  // source operand node; empty for leaves
  std::vector<std::pair<std::string, V>> outputs;

  const V& output(std::string_view name) const {
    for (const auto& [n, v] : outputs)
      if (n == name) return v;
    throw Error(Errc::missing_output, std::string("no output named '") + std::string(name) + "'");
  }
};

using Trace = BasicTrace<MValue>;

/// Evaluates every node over any signed lattice. `register_values` supplies
/// the current state of register nodes (empty for combinational circuits).
template <SignedLattice V>
BasicTrace<V> evaluate_nodes(const Circuit& circuit, std::span<const V> input_values,
                             std::span<const V> register_values) {
  BasicTrace<V> trace;
  const auto nodes = circuit.nodes();
  trace.node_values.reserve(nodes.size());
  trace.provenance.assign(nodes.size(), std::nullopt);
  std::vector<V> ops;
  for (NodeId id = 0; id < nodes.size(); ++id) {
    const Node& n = nodes[id];
    switch (n.kind) {
      case NodeKind::Input:
        trace.node_values.push_back(input_values[n.index]);
        break;
      case NodeKind::Register:
        trace.node_values.push_back(register_values[n.index]);
        break;
      case NodeKind::Gate: {
        ops.clear();
        for (NodeId op : n.operands) ops.push_back(trace.node_values[op]);
        const auto outcome = evaluate_gate<V>(n.gate, ops);
        trace.node_values.push_back(outcome.value);
        trace.provenance[id] = n.operands[outcome.source];
        break;
      }
    }
  }
  for (const Output& o : circuit.outputs()) {
    trace.outputs.emplace_back(o.name, trace.node_values[o.node]);
  }
  return trace;
}

/// Full-trace evaluation over M. Rejects sequential circuits and incomplete
/// valuations.
Trace evaluate(const Circuit& circuit, const Valuation& valuation);

/// Output values only.
std::vector<MValue> evaluate_outputs(const Circuit& circuit, const Valuation& valuation);

/// Outputs for many valuations; `workers == 0` uses every core. The result is
/// independent of the worker count.
std::vector<std::vector<MValue>> evaluate_batch(const Circuit& circuit,
                                                std::span<const Valuation> valuations,
                                                unsigned workers = 0);

/// Strong-Kleene evaluation; returns one value per output.
std::vector<TernaryValue> evaluate_ternary(const Circuit& circuit,
                                           std::span<const TernaryValue> inputs);
TernaryValue evaluate_ternary(const Circuit& circuit, std::span<const TernaryValue> inputs,
                              std::string_view output);

std::vector<BinaryValue> evaluate_binary(const Circuit& circuit,
                                         std::span<const BinaryValue> inputs);

/// Bit-parallel binary simulation: bit k of every word is one input vector.
/// Returns one word per output.
std::vector<std::uint64_t> simulate_words(const Circuit& circuit,
                                          std::span<const std::uint64_t> input_words);

// ---------------------------------------------------------------------------
// Provenance forest.

struct ProvenanceTree {
  std::int64_t magnitude = 0;         // shared |value| of all members
  NodeId root = 0;                    // the leaf every member traces back to
  std::optional<std::size_t> root_input;  // input position when the root is an input
  std::vector<NodeId> nodes;          // ascending
  std::vector<std::pair<NodeId, NodeId>> edges;  // (operand, gate)
};

struct Forest {
  std::vector<ProvenanceTree> trees;  // ordered by root node id
  std::vector<std::size_t> tree_of;   // node id -> tree index

  const ProvenanceTree& tree_containing(NodeId id) const { return trees.at(tree_of.at(id)); }
};

Forest extract_forest(const Trace& trace, const Circuit& circuit);

/// Follows provenance from `node` down to its leaf; the path starts at `node`.
std::vector<NodeId> provenance_path(const Trace& trace, NodeId node);

// ---------------------------------------------------------------------------
// Export.

std::string trace_to_json(const Trace& trace, const Circuit& circuit, int indent = 2);
std::string trace_to_dot(const Trace& trace, const Circuit& circuit);

}  // namespace mvl
