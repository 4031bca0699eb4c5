#include <doctest.h>

#include <array>
#include <random>
#include <vector>

#include "mvl/value.hpp"

using namespace mvl;

namespace {

MValue v(std::int64_t x) { return MValue(x); }
const MValue kTop = MValue::top();
const MValue kBot = MValue::bottom();

std::vector<MValue> small_domain() {
  std::vector<MValue> out;
  for (std::int64_t m = 1; m <= 4; ++m) {
    out.push_back(v(m));
    out.push_back(v(-m));
  }
  out.push_back(kTop);
  out.push_back(kBot);
  return out;
}

MValue random_value(std::mt19937_64& rng) {
  const auto r = rng() % 22;
  if (r == 0) return kTop;
  if (r == 1) return kBot;
  const auto m = static_cast<std::int64_t>(1 + rng() % 10);
  return (rng() & 1) ? v(m) : v(-m);
}

}  // namespace

TEST_CASE("operator table rows") {
  struct Row { std::int64_t a, b, na, nb, conj, disj, x; };
  const std::array<Row, 4> rows{{{-2, -1, 2, 1, -2, -1, -1},
                                 {-2, 1, 2, -1, -2, 1, 1},
                                 {-1, 2, 1, -2, -1, 2, 1},
                                 {1, 2, -1, -2, 1, 2, -1}}};
  for (const Row& r : rows) {
    CAPTURE(r.a);
    CAPTURE(r.b);
    CHECK(apply_gate(GateKind::Not, {v(r.a)}) == v(r.na));
    CHECK(apply_gate(GateKind::Not, {v(r.b)}) == v(r.nb));
    CHECK(apply_gate(GateKind::And, {v(r.a), v(r.b)}) == v(r.conj));
    CHECK(apply_gate(GateKind::Or, {v(r.a), v(r.b)}) == v(r.disj));
    CHECK(apply_gate(GateKind::Xor, {v(r.a), v(r.b)}) == v(r.x));
  }
}

TEST_CASE("gate examples") {
  CHECK(apply_gate(GateKind::Not, {kTop}) == kBot);
  for (const MValue a : small_domain()) CHECK(apply_gate(GateKind::Or, {a, kTop}) == kTop);
  CHECK(apply_gate(GateKind::Xor, {v(3), v(5)}) == v(-3));
  CHECK(apply_gate(GateKind::Xor, {v(-3), v(5)}) == v(3));
  CHECK(apply_gate(GateKind::And, {v(4), v(-1), v(2)}) == v(-1));
  CHECK(apply_gate(GateKind::Or, {v(4), v(-1), v(7)}) == v(7));
}

TEST_CASE("arity errors") {
  const auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io;
  };
  CHECK(code([] { apply_gate(GateKind::Not, {v(1), v(2)}); }) == Errc::arity);
  CHECK(code([] { apply_gate(GateKind::And, {v(1)}); }) == Errc::arity);
  CHECK(code([] { apply_gate(GateKind::Xor, {v(1), v(2), v(3)}); }) == Errc::arity);
  CHECK(code([] { k3_apply(GateKind::Or, {TernaryValue::T}); }) == Errc::arity);
}

TEST_CASE("zero is not a value") {
  CHECK_THROWS_AS(MValue(0), Error);
  CHECK_THROWS_AS(parse_value("0"), Error);
  CHECK_THROWS_AS(parse_value("-0"), Error);
}

TEST_CASE("gate provenance") {
  const std::array<MValue, 3> tie{v(2), v(2), v(5)};
  CHECK(evaluate_gate<MValue>(GateKind::And, tie).source == 0);
  const std::array<MValue, 2> x1{v(3), v(-1)};
  CHECK(evaluate_gate<MValue>(GateKind::Xor, x1).source == 1);
  const std::array<MValue, 2> x2{v(-3), v(3)};
  CHECK(evaluate_gate<MValue>(GateKind::Xor, x2).source == 0);
  const std::array<MValue, 2> o{v(-3), v(4)};
  CHECK(evaluate_gate<MValue>(GateKind::Or, o).source == 1);
}

TEST_CASE("binary projection") {
  CHECK(project_binary(v(-2)) == BinaryValue::F);
  CHECK(project_binary(v(1)) == BinaryValue::T);
  CHECK(project_binary(kTop) == BinaryValue::T);
  CHECK(project_binary(kBot) == BinaryValue::F);
}

TEST_CASE("ternary projection") {
  CHECK(project_ternary(v(1), 2) == TernaryValue::X);
  CHECK(project_ternary(v(-1), 2) == TernaryValue::X);
  CHECK(project_ternary(v(2), 2) == TernaryValue::T);
  CHECK(project_ternary(v(-3), 2) == TernaryValue::F);
  CHECK(project_ternary(kBot, 1000) == TernaryValue::F);
  CHECK_THROWS_AS(project_ternary(v(1), 0), Error);
  for (const MValue a : small_domain())
    CHECK(project_ternary(a, 1) == to_ternary(project_binary(a)));
}

TEST_CASE("strong Kleene tables") {
  using enum TernaryValue;
  CHECK(k3_apply(GateKind::Or, {T, X}) == T);
  CHECK(k3_apply(GateKind::And, {X, X}) == X);
  CHECK(k3_apply(GateKind::Or, {X, k3_apply(GateKind::Not, {X})}) == X);
  CHECK(k3_apply(GateKind::Xor, {T, F}) == T);
  CHECK(k3_apply(GateKind::Xor, {T, X}) == X);
  CHECK(k3_apply(GateKind::And, {F, X}) == F);
  CHECK(k3_apply(GateKind::Not, {X}) == X);
}

TEST_CASE("homomorphisms commute with every gate") {
  const auto dom = small_domain();
  const std::array<GateKind, 3> binary{GateKind::And, GateKind::Or, GateKind::Xor};
  for (const MValue a : dom) {
    const std::array<MValue, 1> one{a};
    const std::array<BinaryValue, 1> pb{project_binary(a)};
    CHECK(project_binary(apply_gate(GateKind::Not, one)) == binary_apply(GateKind::Not, pb));
    for (const MValue b : dom) {
      const std::array<MValue, 2> ops{a, b};
      const std::array<BinaryValue, 2> bin{project_binary(a), project_binary(b)};
      for (GateKind k : binary) {
        const MValue r = apply_gate(k, ops);
        REQUIRE(project_binary(r) == binary_apply(k, bin));
        for (std::int64_t n : {1, 2, 3, 5}) {
          const std::array<TernaryValue, 2> ter{project_ternary(a, n), project_ternary(b, n)};
          REQUIRE(project_ternary(r, n) == k3_apply(k, ter));
        }
      }
    }
  }
}

TEST_CASE("De Morgan algebra laws on random triples") {
  std::mt19937_64 rng(11);
  const auto And = [](MValue a, MValue b) { return apply_gate(GateKind::And, {a, b}); };
  const auto Or = [](MValue a, MValue b) { return apply_gate(GateKind::Or, {a, b}); };
  const auto Not = [](MValue a) { return apply_gate(GateKind::Not, {a}); };
  for (int i = 0; i < 20000; ++i) {
    const MValue a = random_value(rng), b = random_value(rng), c = random_value(rng);
    REQUIRE(And(a, b) == And(b, a));
    REQUIRE(And(a, And(b, c)) == And(And(a, b), c));
    REQUIRE(Or(a, Or(b, c)) == Or(Or(a, b), c));
    REQUIRE(And(a, a) == a);
    REQUIRE(And(a, Or(a, b)) == a);
    REQUIRE(Or(a, And(a, b)) == a);
    REQUIRE(And(a, Or(b, c)) == Or(And(a, b), And(a, c)));
    REQUIRE(Or(a, And(b, c)) == And(Or(a, b), Or(a, c)));
    REQUIRE(And(a, kTop) == a);
    REQUIRE(Or(a, kBot) == a);
    REQUIRE(And(a, kBot) == kBot);
    REQUIRE(Or(a, kTop) == kTop);
    REQUIRE(Not(Not(a)) == a);
    REQUIRE(Not(And(a, b)) == Or(Not(a), Not(b)));
    REQUIRE(And(a, Not(a)) <= Or(b, Not(b)));
    // |a ^ b| = min(|a|, |b|)
    REQUIRE(apply_gate(GateKind::Xor, {a, b}).abs() == std::min(a.abs(), b.abs()));
    // comparisons against a strictly larger magnitude ignore the sign of b
    if (a.abs() > b.abs()) REQUIRE((a > b) == (a > -b));
  }
  CHECK(Not(kBot) == kTop);
  CHECK(Not(kTop) == kBot);
  CHECK(Or(v(3), Not(v(3))) == v(3));
  CHECK(Or(v(3), Not(v(3))) != kTop);
  CHECK(Or(kTop, Not(kTop)) == kTop);
}

TEST_CASE("value syntax") {
  CHECK(parse_value("5") == v(5));
  CHECK(parse_value("-12") == v(-12));
  CHECK(parse_value("inf") == kTop);
  CHECK(parse_value("-inf") == kBot);
  CHECK_THROWS_AS(parse_value("2x"), Error);
  CHECK_THROWS_AS(parse_value(""), Error);
  CHECK(parse_value("100", ValueSyntax{100}) == kTop);
  CHECK(parse_value("-250", ValueSyntax{100}) == kBot);
  CHECK(parse_value("99", ValueSyntax{100}) == v(99));
  CHECK(format_value(v(-7)) == "-7");
  CHECK(format_value(kTop) == "inf");
  CHECK(format_value(kBot) == "-inf");
  CHECK(parse_ternary('X') == TernaryValue::X);
  CHECK_THROWS_AS(parse_ternary('q'), Error);
}
