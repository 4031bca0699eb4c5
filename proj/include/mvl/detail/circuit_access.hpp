#pragma once

// Unchecked access to Circuit internals for the validator and for tests that
// need malformed circuits.

#include <optional>
#include <string>
#include <vector>

#include "mvl/netlist.hpp"

namespace mvl {

struct CircuitAccess {
  /// Assembles a circuit without any checking; the caller is expected to run
  /// validate_and_order on the result.
  static Circuit from_parts(std::vector<Node> nodes, std::vector<std::string> input_names,
                            std::vector<NodeId> input_nodes, std::vector<Output> outputs,
                            std::vector<Register> registers) {
    Circuit c;
    c.nodes_ = std::move(nodes);
    c.input_names_ = std::move(input_names);
    c.input_nodes_ = std::move(input_nodes);
    c.outputs_ = std::move(outputs);
    c.registers_ = std::move(registers);
    c.primary_names_.assign(c.nodes_.size(), std::nullopt);
    for (std::size_t i = 0; i < c.input_names_.size(); ++i) {
      c.names_.emplace(c.input_names_[i], c.input_nodes_[i]);
      if (c.input_nodes_[i] < c.nodes_.size()) c.primary_names_[c.input_nodes_[i]] = c.input_names_[i];
    }
    return c;
  }


  static std::vector<Node>& nodes(Circuit& c) { return c.nodes_; }

  // Copies inputs, outputs, registers and names of `src` into `dst`, whose
  // nodes are `src`'s nodes permuted by `order` (remap is its inverse).
  static void copy_interface(const Circuit& src, Circuit& dst, const std::vector<NodeId>& remap,
                             const std::vector<NodeId>& order) {
    dst.input_names_ = src.input_names_;
    dst.input_nodes_.clear();
    for (NodeId id : src.input_nodes_) dst.input_nodes_.push_back(remap[id]);
    dst.outputs_ = src.outputs_;
    for (Output& o : dst.outputs_) o.node = remap[o.node];
    dst.registers_ = src.registers_;
    for (Register& r : dst.registers_) {
      r.node = remap[r.node];
      r.next_state = remap[r.next_state];
    }
    dst.names_ = src.names_;
    for (auto& [name, id] : dst.names_) id = remap[id];
    dst.primary_names_.assign(order.size(), std::nullopt);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      if (order[pos] < src.primary_names_.size()) {
        dst.primary_names_[pos] = src.primary_names_[order[pos]];
      }
    }
  }
};

}  // namespace mvl
