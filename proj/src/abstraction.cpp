#include "mvl/abstraction.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>
#include <json.hpp>

#include "mvl/random.hpp"
#include "mvl/simulator.hpp"

namespace mvl {

std::vector<MValue> SignedPermutation::values() const {
  std::vector<MValue> out;
  out.reserve(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    const MValue m(static_cast<std::int64_t>(sigma[k]));
    out.push_back(negative[k] ? -m : m);
  }
  return out;
}

std::vector<BinaryValue> SignedPermutation::binary() const {
  std::vector<BinaryValue> out;
  for (bool neg : negative) out.push_back(neg ? BinaryValue::F : BinaryValue::T);
  return out;
}

std::string SignedPermutation::to_string() const {
  std::string s = "(";
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (k) s += ',';
    s += fmt::format("{}{}", negative[k] ? "-" : "", sigma[k]);
  }
  return s + ")";
}

SignedPermutation SignedPermutation::from_values(std::span<const std::int64_t> values) {
  const std::size_t n = values.size();
  if (n == 0) throw Error(Errc::invalid_argument, "empty signed permutation");
  SignedPermutation w;
  std::vector<bool> seen(n + 1, false);
  for (std::int64_t x : values) {
    const std::uint64_t m = x < 0 ? static_cast<std::uint64_t>(-x) : static_cast<std::uint64_t>(x);
    if (m == 0 || m > n || seen[m]) {
      throw Error(Errc::invalid_argument,
                  fmt::format("{} values do not form a signed permutation of 1..{}", n, n));
    }
    seen[m] = true;
    w.negative.push_back(x < 0);
    w.sigma.push_back(static_cast<std::size_t>(m));
  }
  return w;
}

SignedPermutation SignedPermutation::parse(std::string_view text) {
  while (!text.empty() && (text.front() == '(' || text.front() == ' ')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ')' || text.back() == ' ')) text.remove_suffix(1);
  std::vector<std::int64_t> values;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    std::int64_t x = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || p != item.data() + item.size()) {
      throw Error(Errc::syntax, fmt::format("bad signed-permutation entry '{}'", item));
    }
    values.push_back(x);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return from_values(values);
}

SignedPermutation random_signed_permutation(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw Error(Errc::invalid_argument, "signed permutation of size 0");
  SignedPermutation w;
  for (std::size_t k = 0; k < n; ++k) w.negative.push_back(coin(rng));
  std::vector<BinaryValue> v;
  for (bool neg : w.negative) v.push_back(neg ? BinaryValue::F : BinaryValue::T);
  return random_sigma(v, rng);
}

SignedPermutation random_signed_permutation(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed));
  return random_signed_permutation(n, rng);
}

SignedPermutation random_sigma(std::span<const BinaryValue> v, std::mt19937_64& rng) {
  const std::size_t n = v.size();
  if (n == 0) throw Error(Errc::invalid_argument, "signed permutation of size 0");
  SignedPermutation w;
  for (BinaryValue b : v) w.negative.push_back(b == BinaryValue::F);
  w.sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) w.sigma[k] = k + 1;
  for (std::size_t k = n - 1; k > 0; --k) {
    std::swap(w.sigma[k], w.sigma[uniform_below(rng, k + 1)]);
  }
  return w;
}

std::vector<std::size_t> transpose(std::vector<std::size_t> sigma, std::size_t i, std::size_t j) {
  const std::size_t n = sigma.size();
  if (i < 1 || j < 1 || i > n || j > n) {
    throw Error(Errc::invalid_argument, fmt::format("transposition [{}<->{}] outside 1..{}", i, j, n));
  }
  for (std::size_t& s : sigma) {
    if (s == i) s = j;
    else if (s == j) s = i;
  }
  return sigma;
}

std::string format_ternary(std::span<const TernaryValue> values) {
  std::string s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) s += ',';
    s += to_char(values[k]);
  }
  return s;
}

AbstractValuation parse_ternary_vector(std::string_view text) {
  AbstractValuation out;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '(' || c == ')') continue;
    out.push_back(parse_ternary(c));
  }
  return out;
}

std::string_view to_string(AbstractionMode mode) noexcept {
  return mode == AbstractionMode::Faithful ? "faithful" : "strict";
}

std::string_view to_string(Maximality m) noexcept {
  switch (m) {
    case Maximality::Maximal: return "maximal";
    case Maximality::NotAbstractionConsistent: return "not-abstraction-consistent";
    case Maximality::NotMaximal: return "not-maximal";
  }
  return "?";
}

std::string resolve_output(const Circuit& circuit, std::string_view output) {
  if (output.empty()) {
    if (circuit.outputs().size() != 1) {
      throw Error(Errc::missing_output,
                  fmt::format("circuit has {} outputs; select one by name", circuit.outputs().size()));
    }
    return circuit.outputs()[0].name;
  }
  return circuit.output(output).name;
}

namespace {

AbstractValuation project_all(std::span<const MValue> w, std::size_t threshold) {
  AbstractValuation out;
  for (MValue a : w) out.push_back(project_ternary(a, static_cast<std::int64_t>(threshold)));
  return out;
}

}  // namespace

MaximalityVerdict check_maximal(const Circuit& circuit, std::string_view output,
                                std::span<const TernaryValue> av) {
  const std::string name = resolve_output(circuit, output);
  if (av.size() != circuit.input_count()) {
    throw Error(Errc::incomplete_valuation,
                fmt::format("ternary vector has {} entries, circuit has {} inputs", av.size(),
                            circuit.input_count()));
  }
  MaximalityVerdict verdict;
  verdict.output = evaluate_ternary(circuit, av, name);
  if (verdict.output == TernaryValue::X) {
    verdict.status = Maximality::NotAbstractionConsistent;
    return verdict;
  }
  AbstractValuation probe(av.begin(), av.end());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    if (probe[k] == TernaryValue::X) continue;
    const TernaryValue saved = probe[k];
    probe[k] = TernaryValue::X;
    const bool still_known = evaluate_ternary(circuit, probe, name) != TernaryValue::X;
    probe[k] = saved;
    if (still_known) {
      verdict.status = Maximality::NotMaximal;
      verdict.witness = k;
      return verdict;
    }
  }
  return verdict;
}

AbstractionResult maximal_abstract_valuation(const Circuit& circuit, std::string_view output,
                                             const SignedPermutation& w,
                                             const AbstractionOptions& options) {
  if (circuit.is_sequential()) {
    throw Error(Errc::sequential_circuit, "abstraction needs a combinational circuit");
  }
  const std::string name = resolve_output(circuit, output);
  const std::size_t out_index = circuit.output_index(name);
  const std::size_t n = circuit.input_count();
  if (w.size() != n) {
    throw Error(Errc::incomplete_valuation,
                fmt::format("stimulus has {} entries, circuit has {} inputs", w.size(), n));
  }
  const auto simulate = [&](const SignedPermutation& s) {
    return evaluate_outputs(circuit, Valuation(s.values()))[out_index];
  };

  AbstractionResult result;
  SignedPermutation cur = w;
  std::size_t i = 1;
  std::size_t j = n;
  while (i < j) {
    const MValue out = simulate(cur);
    i = static_cast<std::size_t>(out.magnitude());
    result.log.push_back({cur.values(), out, i, j});
    cur.sigma = transpose(std::move(cur.sigma), i, j);
    --j;
  }

  if (options.mode == AbstractionMode::Faithful) {
    result.threshold = i;
    result.valuation = project_all(cur.values(), i);
  } else {
    const MValue out = simulate(cur);
    i = static_cast<std::size_t>(out.magnitude());
    result.final_check = IterationRecord{cur.values(), out, i, j};
    result.threshold = i;
    result.valuation = project_all(cur.values(), i);
    for (;;) {
      const auto verdict = check_maximal(circuit, name, result.valuation);
      if (verdict.status != Maximality::NotMaximal) break;
      result.valuation[*verdict.witness] = TernaryValue::X;
      result.greedy_flips.push_back(*verdict.witness);
    }
  }
  result.final_w = cur;

  if (options.sign_flip_probe) {
    const auto it = std::find(cur.sigma.begin(), cur.sigma.end(), result.threshold);
    if (it != cur.sigma.end()) {
      SignFlipProbe probe;
      probe.input = static_cast<std::size_t>(it - cur.sigma.begin());
      SignedPermutation flipped = cur;
      flipped.negative[probe.input] = !flipped.negative[probe.input];
      probe.output = simulate(flipped);
      probe.valuation = maximal_abstract_valuation(circuit, name, flipped, {}).valuation;
      result.probe = std::move(probe);
    }
  }
  return result;
}

std::string abstraction_to_json(const AbstractionResult& r, const Circuit& circuit,
                                std::string_view output, AbstractionMode mode, int indent) {
  using nlohmann::ordered_json;
  const auto values = [](const std::vector<MValue>& w) {
    ordered_json a = ordered_json::array();
    for (MValue x : w) a.push_back(x.raw());
    return a;
  };
  const auto record = [&](const IterationRecord& rec) {
    ordered_json e;
    e["w"] = values(rec.w);
    e["output"] = format_value(rec.output);
    e["i"] = rec.i;
    e["j"] = rec.j;
    return e;
  };
  ordered_json j;
  j["schema_version"] = 1;
  j["output"] = resolve_output(circuit, output);
  j["mode"] = to_string(mode);
  j["inputs"] = ordered_json::array();
  for (const auto& in : circuit.inputs()) j["inputs"].push_back(in);
  j["iterations"] = ordered_json::array();
  for (const auto& rec : r.log) j["iterations"].push_back(record(rec));
  j["final_check"] = r.final_check ? record(*r.final_check) : ordered_json(nullptr);
  j["final_w"] = values(r.final_w.values());
  j["threshold"] = r.threshold;
  j["greedy_flips"] = r.greedy_flips;
  j["valuation"] = format_ternary(r.valuation);
  if (r.probe) {
    ordered_json p;
    p["input"] = circuit.inputs()[r.probe->input];
    p["output"] = format_value(r.probe->output);
    p["valuation"] = format_ternary(r.probe->valuation);
    j["sign_flip_probe"] = std::move(p);
  }
  return j.dump(indent);
}

}  // namespace mvl
