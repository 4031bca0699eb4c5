#include <doctest.h>

#include <random>

#include "mvl/detail/circuit_access.hpp"
#include "mvl/netlist.hpp"
#include "mvl/simulator.hpp"
#include "support/circuits.hpp"

using namespace mvl;

namespace {

Errc error_of(std::string_view text) {
  try {
    parse_circuit(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::io;
}

std::vector<BinaryValue> bits(std::uint64_t word, std::size_t n) {
  std::vector<BinaryValue> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(((word >> i) & 1) ? BinaryValue::T : BinaryValue::F);
  return out;
}

}  // namespace

TEST_CASE("parse a small netlist") {
  const Circuit c = parse_circuit("inputs a b\noutputs f\nf = a & ~b\n");
  CHECK(c.input_count() == 2);
  CHECK(c.outputs().size() == 1);
  // Two inputs, the inverter and the conjunction.
  CHECK(c.node_count() == 4);
  CHECK(c.gate_count() == 2);
  CHECK_FALSE(c.is_sequential());
}

TEST_CASE("no complementation rewriting") {
  const Circuit c = parse_circuit("inputs x\noutputs f\nf = x | ~x\n");
  CHECK(c.gate_count() == 2);
  const Trace t = evaluate(c, Valuation({MValue(3)}));
  CHECK(t.output("f") == MValue(3));
}

TEST_CASE("parse errors") {
  CHECK(error_of("inputs a\noutputs f\nf = f | a\n") == Errc::combinational_cycle);
  CHECK(error_of("inputs a\noutputs f\nf = a | b\n") == Errc::undeclared_identifier);
  CHECK(error_of("inputs a\noutputs f\nf = a\nf = ~a\n") == Errc::duplicate_definition);
  CHECK(error_of("inputs a a\noutputs f\nf = a\n") == Errc::duplicate_definition);
  CHECK(error_of("inputs a\noutputs f\nf = a &\n") == Errc::syntax);
  CHECK(error_of("inputs a\noutputs f g\nf = a\n") == Errc::undeclared_identifier);
  CHECK(error_of("inputs a\noutputs f\ng = a\nh = g & k\nk = h\nf = k\n") ==
        Errc::combinational_cycle);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_circuit("inputs a b\noutputs f\nf = a & (b |\n");
    FAIL("no error");
  } catch (const Error& e) {
    REQUIRE(e.location().has_value());
    CHECK(e.location()->line == 3);
  }
}

TEST_CASE("operator precedence") {
  const Expr e = parse_expression("a | b & ~c ^ d");
  const std::vector<std::string> names{"a", "b", "c", "d"};
  for (std::uint64_t w = 0; w < 16; ++w) {
    const auto in = bits(w, 4);
    const bool a = in[0] == BinaryValue::T, b = in[1] == BinaryValue::T,
               c = in[2] == BinaryValue::T, d = in[3] == BinaryValue::T;
    const bool expected = a || ((b && !c) != d);
    std::map<std::string, BinaryValue, std::less<>> env;
    for (std::size_t i = 0; i < 4; ++i) env[names[i]] = in[i];
    CHECK((evaluate_expression(e, env) == BinaryValue::T) == expected);
  }
}

TEST_CASE("implication is desugared") {
  const Circuit c = parse_circuit("inputs a b\noutputs f\nf = a -> b\n");
  for (const Node& n : c.nodes())
    if (n.kind == NodeKind::Gate) CHECK((n.gate == GateKind::Not || n.gate == GateKind::Or));
  const Expr e = parse_expression("a -> b");
  for (std::uint64_t w = 0; w < 4; ++w) {
    const auto in = bits(w, 2);
    const std::map<std::string, BinaryValue, std::less<>> env{{"a", in[0]}, {"b", in[1]}};
    CHECK(evaluate_binary(c, in)[0] == evaluate_expression(e, env));
  }
  // right associative
  const Circuit r = parse_circuit("inputs a b c\noutputs f\nf = a -> b -> c\n");
  const auto out = evaluate_binary(r, bits(0b011, 3));  // a=T b=T c=F
  CHECK(out[0] == BinaryValue::F);
}

TEST_CASE("sugar preserves binary semantics") {
  const char* src =
      "inputs a b c d\noutputs f g\n"
      "t = (a -> b) ^ (c | ~d)\n"
      "f = t & (a ^ b ^ c) | d\n"
      "g = ~(a & b & c) -> t\n";
  const Circuit c = parse_circuit(src);
  const Expr f = parse_expression("((a -> b) ^ (c | ~d)) & (a ^ b ^ c) | d");
  const Expr g = parse_expression("~(a & b & c) -> ((a -> b) ^ (c | ~d))");
  for (std::uint64_t w = 0; w < 16; ++w) {
    const auto in = bits(w, 4);
    std::map<std::string, BinaryValue, std::less<>> env{
        {"a", in[0]}, {"b", in[1]}, {"c", in[2]}, {"d", in[3]}};
    const auto out = evaluate_binary(c, in);
    CHECK(out[0] == evaluate_expression(f, env));
    CHECK(out[1] == evaluate_expression(g, env));
  }
}

TEST_CASE("sequential netlist") {
  const Circuit c = parse_circuit(
      "inputs d\noutputs y\nreg q1\nreg q2\nq1 <= d\nq2 <= q1\ny = q2\n");
  CHECK(c.is_sequential());
  CHECK(c.registers().size() == 2);
  const Circuit self = parse_circuit("inputs d\noutputs y\nreg q\nq <= q | d\ny = q\n");
  CHECK(self.registers().size() == 1);
}

TEST_CASE("validate_and_order is idempotent") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Circuit c = testing::random_circuit(rng, {5, 15, 2, 3});
    const auto once = validate_and_order(c);
    CHECK(once.circuit == c);
    CHECK(validate_and_order(once.circuit).circuit == once.circuit);
  }
}

TEST_CASE("unreferenced node warning") {
  const auto report = parse_circuit_report("inputs a b\noutputs f\nf = a & b\nunused = a | b\n");
  CHECK(report.warnings.size() == 1);
  CHECK(report.circuit.gate_count() == 2);
}

TEST_CASE("validate reorders an unordered circuit") {
  // gate 0 reads gate 1, which is listed after it
  std::vector<Node> nodes{
      Node{NodeKind::Gate, GateKind::Not, 0, {1}},
      Node{NodeKind::Gate, GateKind::And, 0, {2, 3}},
      Node{NodeKind::Input, GateKind::Not, 0, {}},
      Node{NodeKind::Input, GateKind::Not, 1, {}},
  };
  const Circuit raw = CircuitAccess::from_parts(nodes, {"a", "b"}, {2, 3},
                                                        {Output{"f", 0}}, {});
  const auto report = validate_and_order(raw);
  const Circuit& c = report.circuit;
  for (NodeId id = 0; id < c.node_count(); ++id)
    for (NodeId op : c.node(id).operands) CHECK(op < id);
  const auto out = evaluate_binary(c, bits(0b11, 2));
  CHECK(out[0] == BinaryValue::F);

  std::vector<Node> cyc{Node{NodeKind::Input, GateKind::Not, 0, {}},
                        Node{NodeKind::Gate, GateKind::And, 0, {0, 2}},
                        Node{NodeKind::Gate, GateKind::Not, 0, {1}}};
  const Circuit bad = CircuitAccess::from_parts(cyc, {"a"}, {0}, {Output{"f", 2}}, {});
  CHECK_THROWS_AS(validate_and_order(bad), Error);
}

TEST_CASE("print/parse round trip") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const Circuit c = testing::random_circuit(rng, {4, 12, 2, 3});
    const Circuit once = parse_circuit(print_circuit(c));
    const std::string text = print_circuit(once);
    CHECK(print_circuit(parse_circuit(text)) == text);
    CHECK(parse_circuit(text) == once);
    for (std::uint64_t w = 0; w < 16; ++w)
      CHECK(evaluate_binary(once, bits(w, 4)) == evaluate_binary(c, bits(w, 4)));

    const Circuit expanded = parse_circuit(print_circuit(c, {.expand_shared = true}));
    for (std::uint64_t w = 0; w < 16; ++w)
      CHECK(evaluate_binary(expanded, bits(w, 4)) == evaluate_binary(c, bits(w, 4)));
  }
  const char* src = "inputs d\noutputs y\nreg q\nq <= ~q ^ d\ny = q & d\n";
  const std::string text = print_circuit(parse_circuit(src));
  CHECK(print_circuit(parse_circuit(text)) == text);
}

TEST_CASE("aliases and comments") {
  const Circuit c = parse_circuit(
      "# header\ninputs a b   # two inputs\noutputs f g\nf = a | b\ng = f\n");
  CHECK(c.output("f").node == c.output("g").node);
}

TEST_CASE("builder rejects missing next state") {
  CircuitBuilder b;
  const NodeId d = b.add_input("d");
  const NodeId q = b.add_register("q");
  b.add_output("y", b.add_and({d, q}));
  CHECK_THROWS_AS(b.build(), Error);
}
