#include "mvl/sequential.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "mvl/abstraction.hpp"
#include "mvl/random.hpp"

namespace mvl {

TemporalValue::TemporalValue(bool negative, std::int64_t epoch, std::int64_t truth)
    : negative_(negative), epoch_(epoch), truth_(truth) {
  if (epoch < kPreBirth) throw Error(Errc::invalid_argument, fmt::format("epoch {} below -1", epoch));
  if (truth < 1) throw Error(Errc::invalid_argument, fmt::format("truth part {} below 1", truth));
}

TemporalValue TemporalValue::infinite(bool negative, std::int64_t epoch) {
  TemporalValue t(negative, epoch, 1);
  t.inf_ = true;
  t.truth_ = 0;
  return t;
}

MValue TemporalValue::truth_value() const {
  const MValue m = inf_ ? MValue::top() : MValue(truth_);
  return negative_ ? -m : m;
}

std::strong_ordering operator<=>(const TemporalValue& a, const TemporalValue& b) noexcept {
  if (a.negative_ != b.negative_) {
    return a.negative_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  const auto ka = std::tuple(a.inf_, a.epoch_, a.truth_);
  const auto kb = std::tuple(b.inf_, b.epoch_, b.truth_);
  return a.negative_ ? kb <=> ka : ka <=> kb;
}

std::string format_temporal(const TemporalValue& v, int digits) {
  const std::string epoch = v.pre_birth() ? "pb" : fmt::format("{:02}", v.epoch());
  const std::string truth =
      v.infinite_truth() ? "inf" : fmt::format("{:0{}}", v.truth(), std::max(digits, 1));
  return fmt::format("{}{} {}", v.negative() ? "-" : "", epoch, truth);
}

namespace {

std::int64_t truth_limit(int digits) {
  std::int64_t limit = 1;
  for (int i = 0; i < digits && limit < INT64_MAX / 10; ++i) limit *= 10;
  return limit;  // exclusive
}

void require_registers(const Circuit& c, const std::vector<TemporalValue>& regs) {
  if (regs.size() != c.registers().size()) {
    throw Error(Errc::incomplete_valuation,
                fmt::format("state has {} register values, circuit has {} registers", regs.size(),
                            c.registers().size()));
  }
}

}  // namespace

StepResult step(const Circuit& circuit, const SeqState& state,
                std::span<const TemporalValue> inputs) {
  require_registers(circuit, state.registers);
  if (inputs.size() != circuit.input_count()) {
    throw Error(Errc::incomplete_valuation,
                fmt::format("cycle {} assigns {} of {} inputs", state.cycle, inputs.size(),
                            circuit.input_count()));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].epoch() != static_cast<std::int64_t>(state.cycle)) {
      throw Error(Errc::epoch_mismatch,
                  fmt::format("input '{}' has epoch {} at cycle {}", circuit.inputs()[i],
                              inputs[i].epoch(), state.cycle));
    }
  }
  StepResult r;
  r.trace = evaluate_nodes<TemporalValue>(circuit, inputs, state.registers);
  r.next.cycle = state.cycle + 1;
  for (const Register& reg : circuit.registers()) {
    r.next.registers.push_back(r.trace.node_values[reg.next_state]);
  }
  return r;
}

std::vector<TemporalValue> pre_birth_values(std::size_t registers, std::uint64_t seed) {
  std::vector<TemporalValue> out;
  if (registers == 0) return out;
  std::mt19937_64 rng(mix_seed(seed));
  const SignedPermutation w = random_signed_permutation(registers, rng);
  for (std::size_t i = 0; i < registers; ++i) {
    out.emplace_back(w.negative[i], TemporalValue::kPreBirth, static_cast<std::int64_t>(w.sigma[i]));
  }
  return out;
}

std::vector<TemporalValue> stimulus_row(const Circuit& circuit, const StimulusPlan& plan,
                                        std::size_t cycle) {
  const std::size_t n = circuit.input_count();
  const auto epoch = static_cast<std::int64_t>(cycle);
  const std::int64_t limit = truth_limit(plan.truth_digits);
  std::vector<bool> control(n, false);
  for (const std::string& name : plan.control_inputs) {
    const auto idx = circuit.input_index(name);
    if (!idx) throw Error(Errc::undeclared_identifier, fmt::format("'{}' is not an input", name));
    control[*idx] = true;
  }

  std::vector<TemporalValue> row;
  row.reserve(n);
  if (plan.source == StimulusPlan::Source::Rows) {
    if (cycle >= plan.rows.size()) {
      throw Error(Errc::stimulus_underrun,
                  fmt::format("stimulus has {} rows, cycle {} requested", plan.rows.size(), cycle));
    }
    const auto& values = plan.rows[cycle];
    if (values.size() != n) {
      throw Error(Errc::incomplete_valuation,
                  fmt::format("stimulus row {} has {} of {} values", cycle, values.size(), n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const MValue v = values[i];
      if (control[i] || v.is_infinite()) {
        row.push_back(TemporalValue::infinite(v.negative(), epoch));
      } else if (v.magnitude() >= limit) {
        throw Error(Errc::invalid_argument,
                    fmt::format("truth part {} needs more than {} digits", v.magnitude(),
                                plan.truth_digits));
      } else {
        row.emplace_back(v.negative(), epoch, v.magnitude());
      }
    }
    return row;
  }

  std::mt19937_64 rng(derive_seed(plan.seed, cycle));
  const auto m = static_cast<std::size_t>(std::count(control.begin(), control.end(), false));
  if (static_cast<std::int64_t>(m) >= limit) {
    throw Error(Errc::invalid_argument,
                fmt::format("{} inputs need more than {} truth digits", m, plan.truth_digits));
  }
  SignedPermutation w;
  if (m > 0) w = random_signed_permutation(m, rng);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (control[i]) {
      row.push_back(TemporalValue::infinite(coin(rng), epoch));
    } else {
      row.emplace_back(w.negative[k], epoch, static_cast<std::int64_t>(w.sigma[k]));
      ++k;
    }
  }
  return row;
}

RunResult run(const Circuit& circuit, const StimulusPlan& plan, std::size_t cycles) {
  if (cycles == 0) throw Error(Errc::invalid_argument, "a run needs at least one cycle");
  RunResult r;
  r.truth_digits = plan.truth_digits;
  SeqState state;
  state.registers = plan.initial_registers
                        ? *plan.initial_registers
                        : pre_birth_values(circuit.registers().size(), derive_seed(plan.seed, ~0ull));
  require_registers(circuit, state.registers);
  r.states.push_back(state);
  for (std::size_t t = 0; t < cycles; ++t) {
    auto inputs = stimulus_row(circuit, plan, t);
    StepResult s = step(circuit, state, inputs);
    std::vector<TemporalValue> outs;
    for (const auto& [name, v] : s.trace.outputs) outs.push_back(v);
    r.inputs.push_back(std::move(inputs));
    r.outputs.push_back(std::move(outs));
    state = std::move(s.next);
    r.states.push_back(state);
  }
  return r;
}

InitializationReport detect_initialization(const RunResult& run) {
  InitializationReport rep;
  for (std::size_t l = 0; l < run.states.size(); ++l) {
    const auto& regs = run.states[l].registers;
    std::int64_t k = static_cast<std::int64_t>(l);
    bool pre = false;
    for (const TemporalValue& v : regs) {
      k = std::min(k, v.epoch());
      pre = pre || v.pre_birth();
    }
    rep.min_epoch.push_back(k);
    rep.shifted_length.push_back((static_cast<std::int64_t>(l) - k) + 2);
    if (!pre && !rep.length) rep.length = l;
  }
  return rep;
}

namespace {

template <class V, class Apply>
std::vector<V> eval_with_registers(const Circuit& c, std::span<const V> inputs,
                                   std::span<const V> regs, Apply apply) {
  if (inputs.size() != c.input_count()) {
    throw Error(Errc::incomplete_valuation, "stimulus row does not cover every input");
  }
  std::vector<V> values;
  values.reserve(c.node_count());
  std::vector<V> ops;
  for (const Node& n : c.nodes()) {
    switch (n.kind) {
      case NodeKind::Input: values.push_back(inputs[n.index]); break;
      case NodeKind::Register: values.push_back(regs[n.index]); break;
      case NodeKind::Gate:
        ops.clear();
        for (NodeId op : n.operands) ops.push_back(values[op]);
        values.push_back(apply(n.gate, std::span<const V>(ops)));
        break;
    }
  }
  return values;
}

}  // namespace

std::optional<std::size_t> ternary_init_oracle(
    const Circuit& circuit, const std::vector<std::vector<BinaryValue>>& stimulus) {
  std::vector<TernaryValue> regs(circuit.registers().size(), TernaryValue::X);
  const auto k3 = [](GateKind k, std::span<const TernaryValue> ops) { return k3_apply(k, ops); };
  for (std::size_t t = 0;; ++t) {
    if (std::all_of(regs.begin(), regs.end(), is_binary)) return t;
    if (t >= stimulus.size()) return std::nullopt;
    std::vector<TernaryValue> in;
    for (BinaryValue b : stimulus[t]) in.push_back(to_ternary(b));
    const auto values = eval_with_registers<TernaryValue>(circuit, in, regs, k3);
    for (std::size_t i = 0; i < regs.size(); ++i) regs[i] = values[circuit.registers()[i].next_state];
  }
}

std::vector<std::vector<BinaryValue>> binary_sequential_run(
    const Circuit& circuit, const std::vector<BinaryValue>& initial_registers,
    const std::vector<std::vector<BinaryValue>>& stimulus) {
  if (initial_registers.size() != circuit.registers().size()) {
    throw Error(Errc::incomplete_valuation, "initial state does not cover every register");
  }
  std::vector<BinaryValue> regs = initial_registers;
  const auto b2 = [](GateKind k, std::span<const BinaryValue> ops) { return binary_apply(k, ops); };
  std::vector<std::vector<BinaryValue>> outputs;
  for (const auto& row : stimulus) {
    const auto values = eval_with_registers<BinaryValue>(circuit, row, regs, b2);
    std::vector<BinaryValue> outs;
    for (const Output& o : circuit.outputs()) outs.push_back(values[o.node]);
    outputs.push_back(std::move(outs));
    for (std::size_t i = 0; i < regs.size(); ++i) regs[i] = values[circuit.registers()[i].next_state];
  }
  return outputs;
}

std::vector<std::vector<MValue>> parse_stimulus_csv(const Circuit& circuit, std::string_view text,
                                                    const ValueSyntax& syntax) {
  const auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  const auto split = [&](std::string_view line) {
    std::vector<std::string_view> cells;
    for (;;) {
      const auto comma = line.find(',');
      cells.push_back(trim(line.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    return cells;
  };

  std::vector<std::size_t> column_input;
  std::vector<std::vector<MValue>> rows;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (header) {
      std::vector<bool> seen(circuit.input_count(), false);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto idx = circuit.input_index(cells[c]);
        if (!idx) {
          throw Error(Errc::undeclared_identifier,
                      fmt::format("stimulus column '{}' is not an input", cells[c]),
                      SourceLocation{line_no, 1});
        }
        if (seen[*idx]) {
          throw Error(Errc::duplicate_definition, fmt::format("column '{}' repeated", cells[c]),
                      SourceLocation{line_no, 1});
        }
        seen[*idx] = true;
        column_input.push_back(*idx);
      }
      if (cells.size() != circuit.input_count()) {
        throw Error(Errc::incomplete_valuation, "stimulus header must list every input",
                    SourceLocation{line_no, 1});
      }
      header = false;
      continue;
    }
    if (cells.size() != column_input.size()) {
      throw Error(Errc::syntax,
                  fmt::format("row has {} cells, header has {}", cells.size(), column_input.size()),
                  SourceLocation{line_no, 1});
    }
    std::vector<MValue> row(circuit.input_count(), MValue(1));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        row[column_input[c]] = parse_value(cells[c], syntax);
      } catch (const Error& e) {
        throw Error(e.code(), e.what(), SourceLocation{line_no, c + 1});
      }
    }
    rows.push_back(std::move(row));
  }
  if (header) throw Error(Errc::syntax, "stimulus has no header");
  return rows;
}

std::string run_to_json(const RunResult& r, const Circuit& circuit,
                        const InitializationReport& init, int indent) {
  using nlohmann::ordered_json;
  const int k = r.truth_digits;
  const auto named = [&](const auto& names, const std::vector<TemporalValue>& values) {
    ordered_json o = ordered_json::object();
    for (std::size_t i = 0; i < values.size(); ++i) o[names(i)] = format_temporal(values[i], k);
    return o;
  };
  const auto input_name = [&](std::size_t i) { return circuit.inputs()[i]; };
  const auto reg_name = [&](std::size_t i) { return circuit.registers()[i].name; };
  const auto out_name = [&](std::size_t i) { return circuit.outputs()[i].name; };

  ordered_json j;
  j["schema_version"] = 1;
  j["truth_digits"] = k;
  j["initial_registers"] = named(reg_name, r.states.front().registers);
  j["rows"] = ordered_json::array();
  for (std::size_t t = 0; t < r.inputs.size(); ++t) {
    ordered_json row;
    row["cycle"] = t;
    row["inputs"] = named(input_name, r.inputs[t]);
    row["registers"] = named(reg_name, r.states[t].registers);
    row["outputs"] = named(out_name, r.outputs[t]);
    row["min_epoch"] = init.min_epoch[t];
    j["rows"].push_back(std::move(row));
  }
  j["final_registers"] = named(reg_name, r.states.back().registers);
  ordered_json in;
  in["length"] = init.length ? ordered_json(*init.length) : ordered_json(nullptr);
  in["min_epoch"] = init.min_epoch;
  in["shifted_length"] = init.shifted_length;
  j["initialization"] = std::move(in);
  return j.dump(indent);
}

}  // namespace mvl
