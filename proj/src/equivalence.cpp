#include "mvl/equivalence.hpp"

#include <algorithm>
#include <bit>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "mvl/random.hpp"
#include "mvl/simulator.hpp"

namespace mvl {

InterfaceMap InterfaceMap::match(const Circuit& a, const Circuit& b) {
  if (a.is_sequential() || b.is_sequential()) {
    throw Error(Errc::sequential_circuit, "equivalence checking needs combinational circuits");
  }
  InterfaceMap m;
  if (a.input_count() != b.input_count()) {
    throw Error(Errc::interface_mismatch,
                fmt::format("input counts differ ({} vs {})", a.input_count(), b.input_count()));
  }
  for (const std::string& name : a.inputs()) {
    const auto idx = b.input_index(name);
    if (!idx) throw Error(Errc::interface_mismatch, fmt::format("input '{}' missing in B", name));
    m.b_input.push_back(*idx);
  }
  if (a.outputs().size() != b.outputs().size()) {
    throw Error(Errc::interface_mismatch, "output sets differ");
  }
  for (std::size_t k = 0; k < a.outputs().size(); ++k) {
    const std::string& name = a.outputs()[k].name;
    std::size_t bk = 0;
    try {
      bk = b.output_index(name);
    } catch (const Error&) {
      throw Error(Errc::interface_mismatch, fmt::format("output '{}' missing in B", name));
    }
    m.outputs.emplace_back(k, bk);
    m.output_names.push_back(name);
  }
  return m;
}

OracleVerdict binary_equivalence_oracle(const Circuit& a, const Circuit& b,
                                        std::size_t max_inputs) {
  const InterfaceMap map = InterfaceMap::match(a, b);
  const std::size_t n = a.input_count();
  if (n > max_inputs) {
    throw Error(Errc::budget_exceeded,
                fmt::format("{} inputs exceed the exhaustive limit of {}", n, max_inputs));
  }
  static constexpr std::uint64_t kPattern[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  const std::uint64_t points = std::uint64_t{1} << n;
  const std::uint64_t words = (points + 63) / 64;
  const std::uint64_t valid = points < 64 ? (std::uint64_t{1} << points) - 1 : ~std::uint64_t{0};
  std::vector<std::uint64_t> in(n);
  OracleVerdict verdict;
  for (std::uint64_t w = 0; w < words; ++w) {
    for (std::size_t i = 0; i < n; ++i)
      in[i] = i < 6 ? kPattern[i] : (((w >> (i - 6)) & 1) ? ~std::uint64_t{0} : 0);
    const auto oa = simulate_words(a, in);
    const auto ob = simulate_words(b, map.to_b(in));
    std::uint64_t diff = 0;
    for (const auto& [ka, kb] : map.outputs) diff |= (oa[ka] ^ ob[kb]);
    diff &= valid;
    if (!diff) continue;
    const std::uint64_t bit = static_cast<std::uint64_t>(std::countr_zero(diff));
    const std::uint64_t point = w * 64 + bit;
    verdict.equivalent = false;
    for (std::size_t i = 0; i < n; ++i)
      verdict.counterexample.push_back(((point >> i) & 1) ? BinaryValue::T : BinaryValue::F);
    for (std::size_t k = 0; k < map.outputs.size(); ++k) {
      const auto [ka, kb] = map.outputs[k];
      if (((oa[ka] ^ ob[kb]) >> bit) & 1) verdict.differing_outputs.push_back(map.output_names[k]);
    }
    return verdict;
  }
  return verdict;
}

std::string_view to_string(SearchOutcome o) noexcept {
  switch (o) {
    case SearchOutcome::Counterexample: return "counterexample";
    case SearchOutcome::MDiscrepancy: return "m_discrepancy";
    case SearchOutcome::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

namespace {

std::vector<BinaryValue> draw_vector(std::mt19937_64& rng, std::size_t n) {
  std::vector<BinaryValue> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(coin(rng) ? BinaryValue::T : BinaryValue::F);
  return v;
}

struct TrialResult {
  std::vector<BinaryValue> counterexample;
  std::string found_by;
  std::vector<Discrepancy> discrepancies;
  std::size_t m_output_discrepancies = 0;
  std::size_t abstraction_discrepancies = 0;
  std::size_t expansions = 0;
  bool found() const { return !found_by.empty(); }
};

class Searcher {
 public:
  Searcher(const Circuit& a, const Circuit& b, const SearchOptions& o)
      : a_(a), b_(b), o_(o), map_(InterfaceMap::match(a, b)) {}

  const InterfaceMap& map() const { return map_; }

  bool disagree(const std::vector<BinaryValue>& v) const {
    const auto oa = evaluate_binary(a_, v);
    const auto ob = evaluate_binary(b_, map_.to_b(v));
    for (const auto& [ka, kb] : map_.outputs)
      if (oa[ka] != ob[kb]) return true;
    return false;
  }

  TrialResult run(std::size_t trial) const {
    TrialResult r;
    const std::size_t n = a_.input_count();
    std::mt19937_64 rng(derive_seed(o_.seed, trial));
    const auto v = draw_vector(rng, n);
    if (disagree(v)) {
      r.counterexample = v;
      r.found_by = "draw";
      return r;
    }
    const SignedPermutation w = random_sigma(v, rng);
    SignedPermutation wb;
    wb.negative = map_.to_b(w.negative);
    wb.sigma = map_.to_b(w.sigma);
    const auto ma = evaluate_outputs(a_, Valuation(w.values()));
    const auto mb = evaluate_outputs(b_, Valuation(wb.values()));

    for (std::size_t k = 0; k < map_.outputs.size(); ++k) {
      const auto [ka, kb] = map_.outputs[k];
      const std::string& name = map_.output_names[k];
      const bool m_diff = ma[ka] != mb[kb];
      r.m_output_discrepancies += m_diff;
      const auto av_a = maximal_abstract_valuation(a_, name, w).valuation;
      const auto av_b = map_.from_b(maximal_abstract_valuation(b_, name, wb).valuation);
      if (!m_diff && av_a == av_b) continue;
      if (av_a != av_b) ++r.abstraction_discrepancies;
      r.discrepancies.push_back({trial, name, w, ma[ka], mb[kb], av_a, av_b});
      if (av_a == av_b) continue;

      // Flip entries that one side abstracts away and the other needs; a
      // change on the needing side is a disagreement with the other.
      if (expand(v, av_a, av_b, /*flip_b=*/true, k, r)) return r;
      if (expand(v, av_b, av_a, /*flip_b=*/false, k, r)) return r;
    }
    return r;
  }

 private:
  bool expand(const std::vector<BinaryValue>& v, const AbstractValuation& x_side,
              const AbstractValuation& known_side, bool flip_b, std::size_t k,
              TrialResult& r) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (x_side[i] == TernaryValue::X && known_side[i] != TernaryValue::X) idx.push_back(i);
    if (idx.empty()) return false;
    const Circuit& c = flip_b ? b_ : a_;
    const std::size_t out = flip_b ? map_.outputs[k].second : map_.outputs[k].first;
    const auto eval = [&](const std::vector<BinaryValue>& u) {
      return evaluate_binary(c, flip_b ? map_.to_b(u) : u)[out];
    };
    const BinaryValue base = eval(v);
    const std::uint64_t combos =
        idx.size() >= 63 ? UINT64_MAX : (std::uint64_t{1} << idx.size()) - 1;
    const std::uint64_t limit = std::min<std::uint64_t>(combos, o_.expansion_cap);
    std::vector<BinaryValue> u = v;
    for (std::uint64_t g = 1; g <= limit; ++g) {
      const std::size_t pos = static_cast<std::size_t>(std::countr_zero(g));
      u[idx[pos]] = !u[idx[pos]];
      ++r.expansions;
      if (eval(u) != base && disagree(u)) {
        r.counterexample = u;
        r.found_by = flip_b ? "expand-b" : "expand-a";
        return true;
      }
    }
    return false;
  }

  const Circuit& a_;
  const Circuit& b_;
  const SearchOptions& o_;
  InterfaceMap map_;
};

unsigned worker_count(unsigned requested) {
  if (requested) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

EquivVerdict nonequivalence_search(const Circuit& a, const Circuit& b,
                                   const SearchOptions& options) {
  if (options.budget == 0) throw Error(Errc::invalid_argument, "trial budget must be positive");
  if (a.input_count() == 0) throw Error(Errc::invalid_argument, "circuits have no inputs");
  const Searcher searcher(a, b, options);
  EquivVerdict verdict;
  verdict.seed = options.seed;
  verdict.budget = options.budget;

  const unsigned workers = worker_count(options.workers);
  const std::size_t chunk = workers == 1 ? 1 : std::size_t{16} * workers;
  std::vector<TrialResult> results;
  for (std::size_t start = 0; start < options.budget; start += chunk) {
    const std::size_t count = std::min(chunk, options.budget - start);
    results.assign(count, {});
    if (workers == 1 || count == 1) {
      for (std::size_t t = 0; t < count; ++t) results[t] = searcher.run(start + t);
    } else {
      std::vector<std::jthread> pool;
      std::vector<std::exception_ptr> errors(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t t = w; t < count; t += workers) results[t] = searcher.run(start + t);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      pool.clear();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    // Reduce in trial order so the verdict does not depend on scheduling.
    for (std::size_t t = 0; t < count; ++t) {
      TrialResult& r = results[t];
      ++verdict.stats.trials;
      verdict.stats.m_output_discrepancies += r.m_output_discrepancies;
      verdict.stats.abstraction_discrepancies += r.abstraction_discrepancies;
      verdict.stats.expansions += r.expansions;
      if (!r.discrepancies.empty() && !verdict.first_discrepancy) {
        verdict.first_discrepancy = r.discrepancies.front();
      }
      if (!verdict.first_m_discrepancy) {
        for (const auto& d : r.discrepancies) {
          if (d.out_a != d.out_b) {
            verdict.first_m_discrepancy = d;
            break;
          }
        }
      }
      if (options.keep_log) {
        for (auto& d : r.discrepancies) verdict.log.push_back(std::move(d));
      }
      if (r.found()) {
        if (!searcher.disagree(r.counterexample)) {
          throw Error(Errc::trace_mismatch, "counterexample failed to replay");
        }
        verdict.outcome = SearchOutcome::Counterexample;
        verdict.counterexample = std::move(r.counterexample);
        verdict.found_at_trial = start + t;
        verdict.found_by = r.found_by;
        return verdict;
      }
      if (options.stop_on_m_discrepancy && verdict.first_m_discrepancy) {
        verdict.outcome = SearchOutcome::MDiscrepancy;
        verdict.found_at_trial = start + t;
        return verdict;
      }
    }
  }
  verdict.outcome = SearchOutcome::BudgetExhausted;
  return verdict;
}

BlindResult random_binary_search(const Circuit& a, const Circuit& b, std::size_t budget,
                                 std::uint64_t seed) {
  SearchOptions o;
  o.seed = seed;
  const Searcher searcher(a, b, o);
  BlindResult r;
  for (std::size_t t = 0; t < budget; ++t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    auto v = draw_vector(rng, a.input_count());
    if (searcher.disagree(v)) {
      r.found_at_trial = t;
      r.counterexample = std::move(v);
      return r;
    }
  }
  return r;
}

namespace {

nlohmann::ordered_json binary_json(const Circuit& a, const std::vector<BinaryValue>& v) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < v.size(); ++i) j[a.inputs()[i]] = std::string(1, to_char(v[i]));
  return j;
}

nlohmann::ordered_json discrepancy_json(const Discrepancy& d) {
  nlohmann::ordered_json j;
  j["trial"] = d.trial;
  j["output"] = d.output;
  j["w"] = d.w.to_string();
  j["m_a"] = format_value(d.out_a);
  j["m_b"] = format_value(d.out_b);
  j["av_a"] = format_ternary(d.av_a);
  j["av_b"] = format_ternary(d.av_b);
  return j;
}

}  // namespace

std::string verdict_to_json(const EquivVerdict& v, const Circuit& a, const SearchOptions& o,
                            int indent) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = 1;
  j["outcome"] = to_string(v.outcome);
  j["seed"] = v.seed;
  j["budget"] = v.budget;
  j["expansion_cap"] = o.expansion_cap;
  j["trials"] = v.stats.trials;
  j["found_at_trial"] = v.found_at_trial ? ordered_json(*v.found_at_trial) : ordered_json(nullptr);
  j["found_by"] = v.found_by.empty() ? ordered_json(nullptr) : ordered_json(v.found_by);
  j["counterexample"] =
      v.counterexample.empty() ? ordered_json(nullptr) : binary_json(a, v.counterexample);
  ordered_json stats;
  stats["m_output_discrepancies"] = v.stats.m_output_discrepancies;
  stats["abstraction_discrepancies"] = v.stats.abstraction_discrepancies;
  stats["expansions"] = v.stats.expansions;
  j["stats"] = std::move(stats);
  j["first_discrepancy"] =
      v.first_discrepancy ? discrepancy_json(*v.first_discrepancy) : ordered_json(nullptr);
  j["first_m_discrepancy"] =
      v.first_m_discrepancy ? discrepancy_json(*v.first_m_discrepancy) : ordered_json(nullptr);
  if (o.keep_log) {
    j["log"] = ordered_json::array();
    for (const auto& d : v.log) j["log"].push_back(discrepancy_json(d));
  }
  return j.dump(indent);
}

std::string oracle_to_json(const OracleVerdict& v, const Circuit& a, int indent) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["equivalent"] = v.equivalent;
  j["counterexample"] = v.equivalent ? nlohmann::ordered_json(nullptr) : binary_json(a, v.counterexample);
  j["differing_outputs"] = v.differing_outputs;
  return j.dump(indent);
}

// ---------------------------------------------------------------------------

std::string_view to_string(MutationKind kind) noexcept {
  switch (kind) {
    case MutationKind::RedundantContradiction: return "redundant_contradiction";
    case MutationKind::RedundantTautology: return "redundant_tautology";
    case MutationKind::ConjunctiveBug: return "conjunctive_bug";
  }
  return "?";
}

MutationKind parse_mutation_kind(std::string_view text) {
  for (MutationKind k : {MutationKind::RedundantContradiction, MutationKind::RedundantTautology,
                         MutationKind::ConjunctiveBug}) {
    if (text == to_string(k)) return k;
  }
  throw Error(Errc::invalid_argument, fmt::format("unknown mutation kind '{}'", text));
}

Term parse_term(const Circuit& circuit, std::string_view text) {
  std::uint64_t pos = 0, neg = 0;
  std::size_t i = 0;
  bool any = false;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '&' || c == '\t' || c == ',') {
      ++i;
      continue;
    }
    bool negated = false;
    while (i < text.size() && text[i] == '~') {
      negated = !negated;
      ++i;
    }
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '&' && text[i] != ',' &&
           text[i] != '\t' && text[i] != '~')
      ++i;
    const std::string_view name = text.substr(start, i - start);
    const auto idx = circuit.input_index(name);
    if (!idx) throw Error(Errc::undeclared_identifier, fmt::format("'{}' is not an input", name));
    (negated ? neg : pos) |= std::uint64_t{1} << *idx;
    any = true;
  }
  if (!any) throw Error(Errc::invalid_argument, "empty term");
  return Term(pos, neg);
}

Circuit inject_mutation(const Circuit& circuit, const MutationSpec& spec, std::uint64_t seed) {
  if (circuit.is_sequential()) {
    throw Error(Errc::sequential_circuit, "mutation needs a combinational circuit");
  }
  if (circuit.input_count() > kMaxDnfVariables) {
    throw Error(Errc::invalid_argument, "too many inputs");
  }
  CircuitBuilder b;
  std::vector<NodeId> map(circuit.node_count());
  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const Node& n = circuit.node(id);
    if (n.kind == NodeKind::Input) {
      map[id] = b.add_input(circuit.inputs()[n.index]);
    } else {
      std::vector<NodeId> ops;
      for (NodeId op : n.operands) ops.push_back(map[op]);
      map[id] = b.add_gate(n.gate, std::move(ops));
    }
  }
  std::vector<std::string> targets;
  if (!spec.output.empty()) {
    targets.push_back(circuit.output(spec.output).name);
  } else {
    for (const Output& o : circuit.outputs()) targets.push_back(o.name);
  }

  NodeId extra = 0;
  const bool disjoin = spec.kind != MutationKind::RedundantTautology;
  if (spec.kind == MutationKind::ConjunctiveBug) {
    const Term t = parse_term(circuit, spec.term);
    std::vector<NodeId> lits;
    for (const Literal& l : t.literals()) {
      const NodeId x = map[circuit.input_node(l.var)];
      lits.push_back(l.negated ? b.add_not(x) : x);
    }
    extra = lits.size() == 1 ? lits[0] : b.add_and(std::move(lits));
  } else {
    std::size_t var = 0;
    if (!spec.variable.empty()) {
      const auto idx = circuit.input_index(spec.variable);
      if (!idx) {
        throw Error(Errc::undeclared_identifier, fmt::format("'{}' is not an input", spec.variable));
      }
      var = *idx;
    } else {
      std::mt19937_64 rng(mix_seed(seed));
      var = static_cast<std::size_t>(uniform_below(rng, circuit.input_count()));
    }
    const NodeId x = map[circuit.input_node(var)];
    const NodeId nx = b.add_not(x);
    extra = disjoin ? b.add_and({x, nx}) : b.add_or({x, nx});
  }

  // Keep internal names that are not outputs being rerouted.
  for (const auto& [name, id] : circuit.names()) {
    if (circuit.node(id).kind == NodeKind::Input) continue;
    if (std::find(targets.begin(), targets.end(), name) != targets.end()) continue;
    bool is_output = false;
    for (const Output& o : circuit.outputs()) is_output = is_output || o.name == name;
    if (!is_output) b.name(map[id], name);
  }
  for (const Output& o : circuit.outputs()) {
    const bool target = std::find(targets.begin(), targets.end(), o.name) != targets.end();
    if (!target) {
      b.add_output(o.name, map[o.node]);
      continue;
    }
    const NodeId root = disjoin ? b.add_or({map[o.node], extra}) : b.add_and({map[o.node], extra});
    b.add_output(o.name, root);
  }
  return b.build();
}

}  // namespace mvl
