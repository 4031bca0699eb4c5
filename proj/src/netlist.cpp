#include "mvl/netlist.hpp"
#include "mvl/detail/circuit_access.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include <fmt/format.h>

namespace mvl {


std::size_t Circuit::gate_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == NodeKind::Gate; }));
}

std::optional<std::size_t> Circuit::input_index(std::string_view name) const {
  for (std::size_t i = 0; i < input_names_.size(); ++i)
    if (input_names_[i] == name) return i;
  return std::nullopt;
}

const Output& Circuit::output(std::string_view name) const {
  return outputs_[output_index(name)];
}

std::size_t Circuit::output_index(std::string_view name) const {
  for (std::size_t i = 0; i < outputs_.size(); ++i)
    if (outputs_[i].name == name) return i;
  throw Error(Errc::missing_output, fmt::format("no output named '{}'", name));
}

std::optional<std::string_view> Circuit::name_of(NodeId id) const {
  if (id < primary_names_.size() && primary_names_[id]) return *primary_names_[id];
  return std::nullopt;
}

bool operator==(const Circuit& a, const Circuit& b) {
  return a.nodes_ == b.nodes_ && a.input_names_ == b.input_names_ &&
         a.input_nodes_ == b.input_nodes_ && a.outputs_ == b.outputs_ &&
         a.registers_ == b.registers_ && a.names_ == b.names_ &&
         a.primary_names_ == b.primary_names_;
}

// ---------------------------------------------------------------------------

NodeId CircuitBuilder::push(Node node) {
  const auto id = static_cast<NodeId>(circuit_.nodes_.size());
  circuit_.nodes_.push_back(std::move(node));
  circuit_.primary_names_.emplace_back();
  return id;
}

NodeId CircuitBuilder::add_input(std::string name) {
  Node n;
  n.kind = NodeKind::Input;
  n.index = static_cast<std::uint32_t>(circuit_.input_names_.size());
  const NodeId id = push(std::move(n));
  this->name(id, name);
  circuit_.input_names_.push_back(std::move(name));
  circuit_.input_nodes_.push_back(id);
  return id;
}

NodeId CircuitBuilder::add_register(std::string name) {
  Node n;
  n.kind = NodeKind::Register;
  n.index = static_cast<std::uint32_t>(circuit_.registers_.size());
  const NodeId id = push(std::move(n));
  this->name(id, name);
  circuit_.registers_.push_back({std::move(name), id, id});
  next_state_set_.push_back(false);
  return id;
}

NodeId CircuitBuilder::add_gate(GateKind kind, std::vector<NodeId> operands) {
  check_arity(kind, operands.size());
  for (NodeId op : operands) {
    if (op >= circuit_.nodes_.size()) {
      throw Error(Errc::invalid_argument, fmt::format("operand {} does not exist yet", op));
    }
  }
  Node n;
  n.kind = NodeKind::Gate;
  n.gate = kind;
  n.operands = std::move(operands);
  return push(std::move(n));
}

void CircuitBuilder::name(NodeId node, std::string name) {
  if (node >= circuit_.nodes_.size()) {
    throw Error(Errc::invalid_argument, fmt::format("node {} does not exist", node));
  }
  auto [it, inserted] = circuit_.names_.emplace(name, node);
  if (!inserted) {
    if (it->second == node) return;
    throw Error(Errc::duplicate_definition, fmt::format("'{}' is defined twice", name));
  }
  if (!circuit_.primary_names_[node]) circuit_.primary_names_[node] = std::move(name);
}

void CircuitBuilder::set_next_state(NodeId register_node, NodeId next) {
  if (register_node >= circuit_.nodes_.size() ||
      circuit_.nodes_[register_node].kind != NodeKind::Register) {
    throw Error(Errc::invalid_argument, "next state assigned to a non-register node");
  }
  if (next >= circuit_.nodes_.size()) {
    throw Error(Errc::invalid_argument, fmt::format("node {} does not exist", next));
  }
  const auto index = circuit_.nodes_[register_node].index;
  if (next_state_set_[index]) {
    throw Error(Errc::duplicate_definition,
                fmt::format("register '{}' has two next-state assignments",
                            circuit_.registers_[index].name));
  }
  circuit_.registers_[index].next_state = next;
  next_state_set_[index] = true;
}

void CircuitBuilder::add_output(std::string name, NodeId node) {
  for (const Output& o : circuit_.outputs_) {
    if (o.name == name) {
      throw Error(Errc::duplicate_definition, fmt::format("output '{}' declared twice", name));
    }
  }
  this->name(node, name);
  circuit_.outputs_.push_back({std::move(name), node});
}

Circuit CircuitBuilder::build() {
  for (std::size_t r = 0; r < next_state_set_.size(); ++r) {
    if (!next_state_set_[r]) {
      throw Error(Errc::syntax, fmt::format("register '{}' has no next-state assignment",
                                            circuit_.registers_[r].name));
    }
  }
  Circuit c = std::move(circuit_);
  circuit_ = Circuit{};
  next_state_set_.clear();
  return validate_and_order(c).circuit;
}

// ---------------------------------------------------------------------------

ValidationReport validate_and_order(const Circuit& circuit) {
  const auto nodes = circuit.nodes();
  const std::size_t count = nodes.size();

  if (circuit.outputs().empty()) throw Error(Errc::missing_output, "circuit has no outputs");

  std::vector<std::vector<NodeId>> fanout(count);
  std::vector<std::size_t> pending(count, 0);
  for (NodeId id = 0; id < count; ++id) {
    const Node& n = nodes[id];
    switch (n.kind) {
      case NodeKind::Input:
        if (n.index >= circuit.input_count() || circuit.input_node(n.index) != id) {
          throw Error(Errc::invalid_argument, fmt::format("input node {} is not declared", id));
        }
        break;
      case NodeKind::Register:
        if (n.index >= circuit.registers().size() || circuit.registers()[n.index].node != id) {
          throw Error(Errc::invalid_argument, fmt::format("register node {} is not declared", id));
        }
        break;
      case NodeKind::Gate:
        check_arity(n.gate, n.operands.size());
        for (NodeId op : n.operands) {
          if (op >= count) {
            throw Error(Errc::undeclared_identifier,
                        fmt::format("node {} references missing node {}", id, op));
          }
          fanout[op].push_back(id);
          ++pending[id];
        }
        break;
    }
  }
  for (const Output& o : circuit.outputs()) {
    if (o.node >= count) {
      throw Error(Errc::undeclared_identifier, fmt::format("output '{}' is dangling", o.name));
    }
  }
  for (const Register& r : circuit.registers()) {
    if (r.next_state >= count) {
      throw Error(Errc::undeclared_identifier,
                  fmt::format("register '{}' has a dangling next state", r.name));
    }
  }

  // Stable Kahn: among ready nodes always take the smallest original id, so an
  // already ordered circuit maps to itself.
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId id = 0; id < count; ++id)
    if (pending[id] == 0) ready.push(id);
  std::vector<NodeId> order;
  order.reserve(count);
  while (!ready.empty()) {
    const NodeId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (NodeId succ : fanout[id])
      if (--pending[succ] == 0) ready.push(succ);
  }
  if (order.size() != count) {
    NodeId culprit = 0;
    for (NodeId id = 0; id < count; ++id)
      if (pending[id] != 0) {
        culprit = id;
        break;
      }
    const auto name = circuit.name_of(culprit);
    throw Error(Errc::combinational_cycle,
                fmt::format("combinational cycle through {}",
                            name ? std::string(*name) : fmt::format("node {}", culprit)));
  }

  std::vector<NodeId> remap(count);
  for (std::size_t pos = 0; pos < count; ++pos) remap[order[pos]] = static_cast<NodeId>(pos);

  ValidationReport report;
  Circuit& out = report.circuit;
  auto& out_nodes = CircuitAccess::nodes(out);
  out_nodes.reserve(count);
  for (NodeId old : order) {
    Node n = nodes[old];
    for (NodeId& op : n.operands) op = remap[op];
    out_nodes.push_back(std::move(n));
  }
  CircuitAccess::copy_interface(circuit, out, remap, order);

  // Dead-cone roots: gates that nothing reads.
  std::vector<bool> live(count, false);
  std::vector<NodeId> stack;
  for (const Output& o : out.outputs()) stack.push_back(o.node);
  for (const Register& r : out.registers()) stack.push_back(r.next_state);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (live[id]) continue;
    live[id] = true;
    for (NodeId op : out.nodes()[id].operands) stack.push_back(op);
  }
  std::vector<std::size_t> readers(count, 0);
  for (const Node& n : out.nodes())
    for (NodeId op : n.operands) ++readers[op];
  for (NodeId id = 0; id < count; ++id) {
    if (live[id] || out.nodes()[id].kind != NodeKind::Gate || readers[id] != 0) continue;
    const auto name = out.name_of(id);
    report.warnings.push_back(
        {fmt::format("{} is not used by any output or register",
                     name ? fmt::format("'{}'", *name) : fmt::format("node {}", id)),
         id});
  }
  return report;
}

}  // namespace mvl
