#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mvl/netlist.hpp"
#include "mvl/value.hpp"

namespace mvl::testing {

inline std::string var(std::size_t i) { return fmt::format("x{}", i + 1); }

inline Circuit gate_n(GateKind kind, std::size_t n) {
  CircuitBuilder b;
  std::vector<NodeId> ins;
  for (std::size_t i = 0; i < n; ++i) ins.push_back(b.add_input(var(i)));
  b.add_output("f", b.add_gate(kind, ins));
  return b.build();
}

inline Circuit and_n(std::size_t n) { return gate_n(GateKind::And, n); }
inline Circuit or_n(std::size_t n) { return gate_n(GateKind::Or, n); }

/// 2^k-to-1 multiplexer, data d0.., selectors s0.. (s0 least significant).
inline Circuit mux(std::size_t k) {
  CircuitBuilder b;
  const std::size_t n = std::size_t{1} << k;
  std::vector<NodeId> d, s, ns;
  for (std::size_t i = 0; i < n; ++i) d.push_back(b.add_input(fmt::format("d{}", i)));
  for (std::size_t i = 0; i < k; ++i) s.push_back(b.add_input(fmt::format("s{}", i)));
  for (std::size_t i = 0; i < k; ++i) ns.push_back(b.add_not(s[i]));
  std::vector<NodeId> terms;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<NodeId> ops{d[j]};
    for (std::size_t i = 0; i < k; ++i) ops.push_back(((j >> i) & 1) ? s[i] : ns[i]);
    terms.push_back(b.add_and(ops));
  }
  b.add_output("f", terms.size() == 1 ? terms[0] : b.add_or(terms));
  return b.build();
}

/// d-stage shift register q1 <= d, q2 <= q1, ...; output is the last stage.
inline Circuit shift_register(std::size_t depth) {
  CircuitBuilder b;
  const NodeId d = b.add_input("d");
  NodeId prev = d;
  for (std::size_t i = 0; i < depth; ++i) {
    const NodeId q = b.add_register(fmt::format("q{}", i + 1));
    b.set_next_state(q, prev);
    prev = q;
  }
  b.add_output("y", prev);
  return b.build();
}

struct RandomCircuitOptions {
  std::size_t inputs = 4;
  std::size_t gates = 10;
  std::size_t outputs = 1;
  std::size_t max_fanin = 3;
};

/// Random DAG over all four gate kinds. Every input is read by some gate and
/// the outputs are the last gates created.
inline Circuit random_circuit(std::mt19937_64& rng, const RandomCircuitOptions& o) {
  CircuitBuilder b;
  std::vector<NodeId> pool;
  for (std::size_t i = 0; i < o.inputs; ++i) pool.push_back(b.add_input(var(i)));
  const auto pick = [&](std::size_t bound) {
    return static_cast<std::size_t>(rng() % bound);
  };
  std::vector<NodeId> gates;
  for (std::size_t g = 0; g < o.gates; ++g) {
    const auto roll = pick(10);
    GateKind kind = roll < 2 ? GateKind::Not : roll < 5 ? GateKind::And
                  : roll < 8 ? GateKind::Or : GateKind::Xor;
    std::size_t arity = kind == GateKind::Not ? 1 : kind == GateKind::Xor ? 2
                        : 2 + pick(o.max_fanin - 1);
    std::vector<NodeId> ops;
    // Early gates consume the inputs in order so none is left unread.
    if (g < o.inputs) ops.push_back(pool[g]);
    while (ops.size() < arity) ops.push_back(pool[pick(pool.size())]);
    const NodeId id = b.add_gate(kind, ops);
    pool.push_back(id);
    gates.push_back(id);
  }
  for (std::size_t i = 0; i < o.outputs; ++i) {
    b.add_output(fmt::format("o{}", i), gates[gates.size() - 1 - i]);
  }
  return b.build();
}

/// Distinct magnitudes 1..n in random order with random signs.
inline std::vector<MValue> distinct_valuation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::int64_t> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = static_cast<std::int64_t>(i + 1);
  std::shuffle(mags.begin(), mags.end(), rng);
  std::vector<MValue> out;
  for (auto m : mags) out.emplace_back((rng() & 1) ? m : -m);
  return out;
}

}  // namespace mvl::testing
