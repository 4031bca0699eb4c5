#include <doctest.h>

#include <random>

#include <json.hpp>

#include "mvl/sequential.hpp"
#include "support/circuits.hpp"

using namespace mvl;

namespace {

TemporalValue tv(std::int64_t truth, std::int64_t epoch) {
  return TemporalValue(truth < 0, epoch, truth < 0 ? -truth : truth);
}

/// Random circuit with `regs` registers whose next states are random gates.
Circuit random_sequential(std::mt19937_64& rng, std::size_t inputs, std::size_t regs,
                          std::size_t gates) {
  CircuitBuilder b;
  std::vector<NodeId> pool;
  for (std::size_t i = 0; i < inputs; ++i) pool.push_back(b.add_input(fmt::format("x{}", i)));
  std::vector<NodeId> rn;
  for (std::size_t i = 0; i < regs; ++i) {
    rn.push_back(b.add_register(fmt::format("q{}", i)));
    pool.push_back(rn.back());
  }
  for (std::size_t g = 0; g < gates; ++g) {
    const auto roll = rng() % 4;
    const NodeId a = pool[rng() % pool.size()];
    const NodeId c = pool[rng() % pool.size()];
    NodeId id;
    if (roll == 0) id = b.add_not(a);
    else if (roll == 1) id = b.add_and({a, c});
    else if (roll == 2) id = b.add_or({a, c});
    else id = b.add_xor(a, c);
    pool.push_back(id);
  }
  for (std::size_t i = 0; i < regs; ++i)
    b.set_next_state(rn[i], pool[pool.size() - 1 - (rng() % std::min<std::size_t>(4, gates))]);
  b.add_output("y", pool.back());
  return b.build();
}

std::vector<std::vector<BinaryValue>> project_inputs(const RunResult& r) {
  std::vector<std::vector<BinaryValue>> out;
  for (const auto& row : r.inputs) {
    std::vector<BinaryValue> b;
    for (const auto& v : row) b.push_back(v.negative() ? BinaryValue::F : BinaryValue::T);
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

TEST_CASE("temporal order") {
  CHECK(tv(5, 0) < tv(1, 1));
  CHECK(tv(-1, 1) < tv(-5, 0));
  CHECK(tv(-999, 40) < tv(1, -1));
  CHECK(tv(3, -1) < tv(1, 0));
  CHECK(TemporalValue::infinite(false, 0) > tv(999, 40));
  CHECK(TemporalValue::infinite(true, 40) < tv(-999, 40));
  CHECK(-tv(3, 2) == tv(-3, 2));
  CHECK(tv(3, 2).truth_value() == MValue(3));
  CHECK_THROWS_AS(TemporalValue(false, -2, 1), Error);
  CHECK_THROWS_AS(TemporalValue(false, 0, 0), Error);
  CHECK(format_temporal(tv(5, 0)) == "00 005");
  CHECK(format_temporal(tv(-4, 1)) == "-01 004");
  CHECK(format_temporal(tv(2, -1)) == "pb 002");
  CHECK(format_temporal(TemporalValue::infinite(true, 3)) == "-03 inf");
}

TEST_CASE("temporal values obey the gate algebra") {
  std::mt19937_64 rng(3);
  const auto draw = [&] {
    const bool neg = rng() & 1;
    const auto epoch = static_cast<std::int64_t>(rng() % 4) - 1;
    if (rng() % 10 == 0) return TemporalValue::infinite(neg, epoch);
    return TemporalValue(neg, epoch, 1 + static_cast<std::int64_t>(rng() % 5));
  };
  for (int i = 0; i < 5000; ++i) {
    const TemporalValue a = draw(), b = draw();
    const std::array<TemporalValue, 2> ops{a, b};
    const auto x = evaluate_gate<TemporalValue>(GateKind::Xor, ops).value;
    CHECK(abs_value(x) == std::min(abs_value(a), abs_value(b)));
    CHECK(-(-a) == a);
    const auto lo = evaluate_gate<TemporalValue>(GateKind::And, ops).value;
    const std::array<TemporalValue, 2> neg{-a, -b};
    CHECK(-lo == evaluate_gate<TemporalValue>(GateKind::Or, neg).value);
  }
}

TEST_CASE("shift register latching") {
  const Circuit c = testing::shift_register(2);
  SeqState s;
  s.registers = {tv(1, -1), tv(-2, -1)};
  const std::vector<TemporalValue> d0{tv(5, 0)};
  const auto r1 = step(c, s, d0);
  CHECK(r1.next.cycle == 1);
  CHECK(r1.next.registers[0].epoch() == 0);
  CHECK(r1.next.registers[1].epoch() == -1);
  const std::vector<TemporalValue> d1{tv(-3, 1)};
  const auto r2 = step(c, r1.next, d1);
  CHECK(r2.next.registers[0].epoch() == 1);
  CHECK(r2.next.registers[1].epoch() == 0);
  CHECK_THROWS_AS(step(c, r1.next, d0), Error);  // stale epoch
  CHECK_THROWS_AS(step(c, s, std::vector<TemporalValue>{}), Error);
}

TEST_CASE("pre-birth value wins a minimum") {
  const Circuit c = parse_circuit("inputs d\noutputs y\nreg q\nq <= q & d\ny = q\n");
  SeqState s;
  s.registers = {tv(2, -1)};
  const auto r = step(c, s, std::vector<TemporalValue>{tv(1, 0)});
  CHECK(r.next.registers[0] == tv(2, -1));
}

TEST_CASE("signed-permutation stimulus") {
  CircuitBuilder b;
  std::vector<NodeId> in;
  for (int i = 0; i < 6; ++i) in.push_back(b.add_input(fmt::format("x{}", i)));
  b.add_output("y", b.add_or(in));
  const Circuit c = b.build();
  StimulusPlan plan;
  plan.seed = 11;
  const RunResult r = run(c, plan, 41);
  for (std::size_t t = 0; t < r.inputs.size(); ++t) {
    std::vector<std::int64_t> truths;
    for (const auto& v : r.inputs[t]) {
      CHECK(v.epoch() == static_cast<std::int64_t>(t));
      truths.push_back(v.truth());
    }
    std::sort(truths.begin(), truths.end());
    CHECK(truths == std::vector<std::int64_t>{1, 2, 3, 4, 5, 6});
  }
  CHECK(r.inputs[40][0].epoch() == 40);
  CHECK(r.states.size() == 42);
  CHECK(detect_initialization(r).length == std::optional<std::size_t>(0));
  CHECK_THROWS_AS(run(c, plan, 0), Error);

  plan.control_inputs = {"x5"};
  const RunResult rc = run(c, plan, 3);
  for (const auto& row : rc.inputs) CHECK(row[5].infinite_truth());
  for (std::size_t t = 0; t < rc.outputs.size(); ++t)
    CHECK(rc.outputs[t][0].infinite_truth() == !rc.inputs[t][5].negative());
}

TEST_CASE("row stimulus and underrun") {
  const Circuit c = testing::shift_register(1);
  StimulusPlan plan;
  plan.source = StimulusPlan::Source::Rows;
  plan.rows = parse_stimulus_csv(c, "d\n5\n-2\ninf\n");
  REQUIRE(plan.rows.size() == 3);
  const RunResult r = run(c, plan, 3);
  CHECK(r.states[3].registers[0].infinite_truth());
  CHECK_THROWS_AS(run(c, plan, 4), Error);
  plan.rows = {{MValue(1000)}};
  CHECK_THROWS_AS(run(c, plan, 1), Error);
  CHECK_THROWS_AS(parse_stimulus_csv(c, "e\n1\n"), Error);
  CHECK_THROWS_AS(parse_stimulus_csv(c, "d\n0\n"), Error);
}

TEST_CASE("initialization detection") {
  for (std::size_t d = 1; d <= 4; ++d) {
    const Circuit c = testing::shift_register(d);
    StimulusPlan plan;
    plan.seed = d;
    const RunResult r = run(c, plan, 8);
    const auto rep = detect_initialization(r);
    CHECK(rep.length == std::optional<std::size_t>(d));
    CHECK(ternary_init_oracle(c, project_inputs(r)) == std::optional<std::size_t>(d));
    CHECK(rep.min_epoch[0] == -1);
    CHECK(rep.shifted_length[0] == 3);
  }
  // a register holding itself with an unbeatable pre-birth value
  const Circuit hold = parse_circuit("inputs d\noutputs y\nreg q\nq <= q | d\ny = q\n");
  StimulusPlan plan;
  plan.initial_registers = std::vector<TemporalValue>{TemporalValue::infinite(false, -1)};
  CHECK_FALSE(detect_initialization(run(hold, plan, 10)).length.has_value());

  const Circuit self = parse_circuit("inputs d\noutputs y\nreg q\nq <= q\ny = q & d\n");
  const std::vector<std::vector<BinaryValue>> ones(5, {BinaryValue::T});
  CHECK_FALSE(ternary_init_oracle(self, ones).has_value());
  const Circuit direct = parse_circuit("inputs d\noutputs y\nreg q\nq <= d\ny = q\n");
  CHECK(ternary_init_oracle(direct, ones) == std::optional<std::size_t>(1));
}

TEST_CASE("random sequential circuits") {
  std::mt19937_64 rng(5);
  for (int inst = 0; inst < 60; ++inst) {
    const Circuit c = random_sequential(rng, 2 + rng() % 3, 1 + rng() % 3, 4 + rng() % 8);
    StimulusPlan plan;
    plan.seed = inst;
    const std::size_t horizon = 8;
    const RunResult r = run(c, plan, horizon);
    const auto stim = project_inputs(r);

    // oracle agreement
    const auto rep = detect_initialization(r);
    CHECK(rep.length == ternary_init_oracle(c, stim));

    // epochs never run ahead of the clock
    for (std::size_t t = 0; t < r.states.size(); ++t)
      for (const auto& v : r.states[t].registers) CHECK(v.epoch() < static_cast<std::int64_t>(t));

    // projection consistency from a binary initial state
    StimulusPlan seeded = plan;
    std::vector<BinaryValue> init_bin;
    std::vector<TemporalValue> init;
    for (std::size_t i = 0; i < c.registers().size(); ++i) {
      const bool neg = rng() & 1;
      init_bin.push_back(neg ? BinaryValue::F : BinaryValue::T);
      init.emplace_back(neg, -1, static_cast<std::int64_t>(i + 1));
    }
    seeded.initial_registers = init;
    const RunResult m = run(c, seeded, horizon);
    const auto bin = binary_sequential_run(c, init_bin, project_inputs(m));
    for (std::size_t t = 0; t < horizon; ++t)
      CHECK((m.outputs[t][0].negative() ? BinaryValue::F : BinaryValue::T) == bin[t][0]);
  }
}

TEST_CASE("epochs follow the provenance forest") {
  std::mt19937_64 rng(8);
  for (int inst = 0; inst < 30; ++inst) {
    const Circuit c = random_sequential(rng, 3, 2, 8);
    StimulusPlan plan;
    plan.seed = 100 + inst;
    SeqState s;
    s.registers = pre_birth_values(c.registers().size(), inst);
    for (std::size_t t = 0; t < 6; ++t) {
      const auto in = stimulus_row(c, plan, t);
      const auto st = step(c, s, in);
      for (const Register& reg : c.registers()) {
        NodeId id = reg.next_state;
        while (st.trace.provenance[id]) id = *st.trace.provenance[id];
        CHECK(st.trace.node_values[id].epoch() == st.trace.node_values[reg.next_state].epoch());
      }
      s = st.next;
    }
  }
}

TEST_CASE("run json") {
  const Circuit c = testing::shift_register(2);
  StimulusPlan plan;
  const RunResult r = run(c, plan, 3);
  const auto j = nlohmann::json::parse(run_to_json(r, c, detect_initialization(r)));
  CHECK(j["rows"].size() == 3);
  CHECK(j["initialization"]["length"] == 2);
  CHECK(j["rows"][1]["inputs"]["d"].get<std::string>().find("01 ") != std::string::npos);
}
