#include "mvl/simulator.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

namespace mvl {
namespace {

void require_combinational(const Circuit& circuit) {
  if (circuit.is_sequential()) {
    throw Error(Errc::sequential_circuit,
                "circuit has registers; use the sequential simulator");
  }
}

template <class T>
void require_complete(const Circuit& circuit, std::span<const T> inputs) {
  if (inputs.size() != circuit.input_count()) {
    throw Error(Errc::incomplete_valuation,
                fmt::format("valuation assigns {} value(s) but the circuit has {} input(s)",
                            inputs.size(), circuit.input_count()));
  }
}

}  // namespace

Valuation Valuation::from_named(const Circuit& circuit,
                                const std::map<std::string, MValue, std::less<>>& named) {
  std::vector<MValue> values;
  values.reserve(circuit.input_count());
  for (const std::string& input : circuit.inputs()) {
    const auto it = named.find(input);
    if (it == named.end()) {
      throw Error(Errc::incomplete_valuation, fmt::format("input '{}' has no value", input));
    }
    values.push_back(it->second);
  }
  for (const auto& [name, value] : named) {
    if (!circuit.input_index(name)) {
      throw Error(Errc::incomplete_valuation, fmt::format("'{}' is not an input", name));
    }
  }
  return Valuation(std::move(values));
}

Valuation Valuation::parse(const Circuit& circuit, std::string_view text,
                           const ValueSyntax& syntax) {
  std::map<std::string, MValue, std::less<>> named;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    pos = comma + 1;
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::syntax, fmt::format("'{}' is not of the form name=value", item));
    }
    const std::string name(item.substr(0, eq));
    if (!named.emplace(name, parse_value(item.substr(eq + 1), syntax)).second) {
      throw Error(Errc::duplicate_definition, fmt::format("'{}' assigned twice", name));
    }
  }
  return from_named(circuit, named);
}

Trace evaluate(const Circuit& circuit, const Valuation& valuation) {
  require_combinational(circuit);
  require_complete(circuit, valuation.values());
  return evaluate_nodes<MValue>(circuit, valuation.values(), {});
}

std::vector<MValue> evaluate_outputs(const Circuit& circuit, const Valuation& valuation) {
  require_combinational(circuit);
  require_complete(circuit, valuation.values());
  // Streaming variant: only live values are needed, but a flat vector is
  // cheaper than liveness bookkeeping at these sizes.
  const auto nodes = circuit.nodes();
  std::vector<MValue> values;
  values.reserve(nodes.size());
  std::vector<MValue> ops;
  for (const Node& n : nodes) {
    if (n.kind == NodeKind::Input) {
      values.push_back(valuation[n.index]);
      continue;
    }
    ops.clear();
    for (NodeId op : n.operands) ops.push_back(values[op]);
    values.push_back(evaluate_gate<MValue>(n.gate, ops).value);
  }
  std::vector<MValue> out;
  for (const Output& o : circuit.outputs()) out.push_back(values[o.node]);
  return out;
}

std::vector<std::vector<MValue>> evaluate_batch(const Circuit& circuit,
                                                std::span<const Valuation> valuations,
                                                unsigned workers) {
  require_combinational(circuit);
  std::vector<std::vector<MValue>> results(valuations.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, valuations.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < valuations.size(); ++i)
      results[i] = evaluate_outputs(circuit, valuations[i]);
    return results;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < valuations.size(); i += workers)
          results[i] = evaluate_outputs(circuit, valuations[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

std::vector<TernaryValue> evaluate_ternary(const Circuit& circuit,
                                           std::span<const TernaryValue> inputs) {
  require_combinational(circuit);
  require_complete(circuit, inputs);
  const auto nodes = circuit.nodes();
  std::vector<TernaryValue> values;
  values.reserve(nodes.size());
  std::vector<TernaryValue> ops;
  for (const Node& n : nodes) {
    if (n.kind == NodeKind::Input) {
      values.push_back(inputs[n.index]);
      continue;
    }
    ops.clear();
    for (NodeId op : n.operands) ops.push_back(values[op]);
    values.push_back(k3_apply(n.gate, ops));
  }
  std::vector<TernaryValue> out;
  for (const Output& o : circuit.outputs()) out.push_back(values[o.node]);
  return out;
}

TernaryValue evaluate_ternary(const Circuit& circuit, std::span<const TernaryValue> inputs,
                              std::string_view output) {
  const std::size_t index = circuit.output_index(output);
  return evaluate_ternary(circuit, inputs)[index];
}

std::vector<BinaryValue> evaluate_binary(const Circuit& circuit,
                                         std::span<const BinaryValue> inputs) {
  require_combinational(circuit);
  require_complete(circuit, inputs);
  const auto nodes = circuit.nodes();
  std::vector<BinaryValue> values;
  values.reserve(nodes.size());
  std::vector<BinaryValue> ops;
  for (const Node& n : nodes) {
    if (n.kind == NodeKind::Input) {
      values.push_back(inputs[n.index]);
      continue;
    }
    ops.clear();
    for (NodeId op : n.operands) ops.push_back(values[op]);
    values.push_back(binary_apply(n.gate, ops));
  }
  std::vector<BinaryValue> out;
  for (const Output& o : circuit.outputs()) out.push_back(values[o.node]);
  return out;
}

std::vector<std::uint64_t> simulate_words(const Circuit& circuit,
                                          std::span<const std::uint64_t> input_words) {
  require_combinational(circuit);
  require_complete(circuit, input_words);
  const auto nodes = circuit.nodes();
  std::vector<std::uint64_t> w(nodes.size());
  for (NodeId id = 0; id < nodes.size(); ++id) {
    const Node& n = nodes[id];
    if (n.kind == NodeKind::Input) {
      w[id] = input_words[n.index];
      continue;
    }
    switch (n.gate) {
      case GateKind::Not:
        w[id] = ~w[n.operands[0]];
        break;
      case GateKind::And: {
        std::uint64_t acc = ~std::uint64_t{0};
        for (NodeId op : n.operands) acc &= w[op];
        w[id] = acc;
        break;
      }
      case GateKind::Or: {
        std::uint64_t acc = 0;
        for (NodeId op : n.operands) acc |= w[op];
        w[id] = acc;
        break;
      }
      case GateKind::Xor:
        w[id] = w[n.operands[0]] ^ w[n.operands[1]];
        break;
    }
  }
  std::vector<std::uint64_t> out;
  for (const Output& o : circuit.outputs()) out.push_back(w[o.node]);
  return out;
}

// ---------------------------------------------------------------------------

Forest extract_forest(const Trace& trace, const Circuit& circuit) {
  const std::size_t count = circuit.node_count();
  if (trace.node_values.size() != count || trace.provenance.size() != count) {
    throw Error(Errc::trace_mismatch, "trace was not produced by this circuit");
  }
  Forest forest;
  forest.tree_of.assign(count, 0);
  // Nodes are topologically ordered, so a node's provenance source has
  // already been assigned to its tree.
  for (NodeId id = 0; id < count; ++id) {
    const auto& src = trace.provenance[id];
    const Node& n = circuit.node(id);
    if (n.kind == NodeKind::Gate) {
      if (!src || *src >= id ||
          std::find(n.operands.begin(), n.operands.end(), *src) == n.operands.end()) {
        throw Error(Errc::trace_mismatch, fmt::format("bad provenance for node {}", id));
      }
      if (trace.node_values[*src].magnitude() != trace.node_values[id].magnitude()) {
        throw Error(Errc::trace_mismatch,
                    fmt::format("node {} does not carry the magnitude of its source", id));
      }
      const std::size_t t = forest.tree_of[*src];
      forest.tree_of[id] = t;
      forest.trees[t].nodes.push_back(id);
      forest.trees[t].edges.emplace_back(*src, id);
    } else {
      if (src) throw Error(Errc::trace_mismatch, fmt::format("leaf {} has a provenance", id));
      ProvenanceTree tree;
      tree.magnitude = trace.node_values[id].magnitude();
      tree.root = id;
      if (n.kind == NodeKind::Input) tree.root_input = n.index;
      tree.nodes.push_back(id);
      forest.tree_of[id] = forest.trees.size();
      forest.trees.push_back(std::move(tree));
    }
  }
  return forest;
}

std::vector<NodeId> provenance_path(const Trace& trace, NodeId node) {
  std::vector<NodeId> path{node};
  while (trace.provenance.at(path.back())) path.push_back(*trace.provenance[path.back()]);
  return path;
}

// ---------------------------------------------------------------------------

namespace {

std::string node_label(const Circuit& c, NodeId id) {
  if (const auto name = c.name_of(id)) return std::string(*name);
  const Node& n = c.node(id);
  return fmt::format("{}_{}", to_string(n.gate), id);
}

}  // namespace

std::string trace_to_json(const Trace& trace, const Circuit& circuit, int indent) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = 1;
  j["nodes"] = ordered_json::array();
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const Node& n = circuit.node(id);
    ordered_json e;
    e["id"] = id;
    e["label"] = node_label(circuit, id);
    e["kind"] = n.kind == NodeKind::Input      ? "input"
                : n.kind == NodeKind::Register ? "register"
                                               : std::string(to_string(n.gate));
    e["value"] = format_value(trace.node_values[id]);
    if (trace.provenance[id]) e["provenance"] = *trace.provenance[id];
    else e["provenance"] = nullptr;
    j["nodes"].push_back(std::move(e));
  }
  ordered_json outs = ordered_json::object();
  for (const auto& [name, v] : trace.outputs) outs[name] = format_value(v);
  j["outputs"] = std::move(outs);
  return j.dump(indent);
}

std::string trace_to_dot(const Trace& trace, const Circuit& circuit) {
  static constexpr std::string_view palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                                 "#bcbd22", "#17becf"};
  std::vector<std::int64_t> magnitudes;
  for (const MValue& v : trace.node_values) magnitudes.push_back(v.magnitude());
  std::sort(magnitudes.begin(), magnitudes.end());
  magnitudes.erase(std::unique(magnitudes.begin(), magnitudes.end()), magnitudes.end());
  const auto color_of = [&](MValue v) {
    const auto pos = std::lower_bound(magnitudes.begin(), magnitudes.end(), v.magnitude()) -
                     magnitudes.begin();
    return palette[static_cast<std::size_t>(pos) % std::size(palette)];
  };

  std::string out = "digraph trace {\n  rankdir=BT;\n  node [fontname=\"monospace\"];\n";
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const Node& n = circuit.node(id);
    const MValue v = trace.node_values[id];
    const std::string_view shape = n.kind == NodeKind::Gate ? "box" : "ellipse";
    out += fmt::format("  n{} [label=\"{}\\n{}\", shape={}, color=\"{}\"];\n", id,
                       node_label(circuit, id), format_value(v), shape, color_of(v));
  }
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    for (NodeId op : circuit.node(id).operands) {
      if (trace.provenance[id] == op) {
        out += fmt::format("  n{} -> n{} [color=\"{}\", penwidth=2];\n", op, id,
                           color_of(trace.node_values[id]));
      } else {
        out += fmt::format("  n{} -> n{} [style=dashed, color=\"#bbbbbb\"];\n", op, id);
      }
    }
  }
  for (const Output& o : circuit.outputs()) {
    out += fmt::format("  \"out:{}\" [shape=plaintext];\n  n{} -> \"out:{}\";\n", o.name, o.node,
                       o.name);
  }
  out += "}\n";
  return out;
}

}  // namespace mvl
