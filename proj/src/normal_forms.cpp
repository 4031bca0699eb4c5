#include "mvl/normal_forms.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "mvl/simulator.hpp"

namespace mvl {

Term Term::of(std::initializer_list<Literal> literals) {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  for (const Literal& l : literals) {
    if (l.var >= kMaxDnfVariables) throw Error(Errc::invalid_argument, "variable index too large");
    (l.negated ? neg : pos) |= std::uint64_t{1} << l.var;
  }
  return Term(pos, neg);
}

std::size_t Term::size() const noexcept {
  return static_cast<std::size_t>(std::popcount(pos_) + std::popcount(neg_));
}

std::vector<Literal> Term::literals() const {
  std::vector<Literal> out;
  std::uint64_t all = pos_ | neg_;
  while (all) {
    const auto v = static_cast<std::uint32_t>(std::countr_zero(all));
    all &= all - 1;
    const std::uint64_t bit = std::uint64_t{1} << v;
    if (pos_ & bit) out.push_back({v, false});
    if (neg_ & bit) out.push_back({v, true});
  }
  return out;
}

bool term_less(const Term& a, const Term& b) {
  if (a == b) return false;
  const auto la = a.literals();
  const auto lb = b.literals();
  return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
}

std::string_view to_string(DnfKind kind) noexcept {
  switch (kind) {
    case DnfKind::Raw: return "raw";
    case DnfKind::Dmcf: return "dmcf";
    case DnfKind::Bcf: return "bcf";
    case DnfKind::Fdnf: return "fdnf";
    case DnfKind::MinCover: return "mincover";
  }
  return "?";
}

std::vector<Term> Dnf::implicants() const {
  std::vector<Term> out;
  for (const Term& t : terms)
    if (!t.contradictory()) out.push_back(t);
  return out;
}

std::vector<Term> Dnf::contradictions() const {
  std::vector<Term> out;
  for (const Term& t : terms)
    if (t.contradictory()) out.push_back(t);
  return out;
}

void absorb(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    const auto sa = a.size();
    const auto sb = b.size();
    if (sa != sb) return sa < sb;
    if (a.positive() != b.positive()) return a.positive() < b.positive();
    return a.negative() < b.negative();
  });
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  std::vector<Term> kept;
  kept.reserve(terms.size());
  for (const Term& t : terms) {
    const bool absorbed = std::any_of(kept.begin(), kept.end(),
                                      [&](const Term& k) { return k.subterm_of(t); });
    if (!absorbed) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end(), term_less);
  terms = std::move(kept);
}

namespace {

void require_small(const Circuit& circuit) {
  if (circuit.is_sequential()) {
    throw Error(Errc::sequential_circuit, "normal forms need a combinational circuit");
  }
  if (circuit.input_count() > kMaxDnfVariables) {
    throw Error(Errc::budget_exceeded,
                fmt::format("{} inputs exceed the {}-variable limit of normal forms",
                            circuit.input_count(), kMaxDnfVariables))
        .with_partial_size(0);
  }
}

[[noreturn]] void overflow(std::string_view what, std::size_t reached, std::size_t limit) {
  throw Error(Errc::budget_exceeded,
              fmt::format("{} grew to {} terms (budget {})", what, reached, limit))
      .with_partial_size(reached);
}

class DmcfBuilder {
 public:
  DmcfBuilder(const Circuit& c, const NormalFormBudget& budget)
      : c_(c), budget_(budget), memo_(2 * c.node_count()) {}

  const std::vector<Term>& of(NodeId id, bool negated) {
    auto& slot = memo_[2 * id + (negated ? 1 : 0)];
    if (slot) return *slot;
    const Node& n = c_.node(id);
    std::vector<Term> result;
    if (n.kind == NodeKind::Input) {
      const std::uint64_t bit = std::uint64_t{1} << n.index;
      result.push_back(negated ? Term(0, bit) : Term(bit, 0));
    } else {
      const auto& ops = n.operands;
      switch (n.gate) {
        case GateKind::Not:
          result = of(ops[0], !negated);
          break;
        case GateKind::And:
        case GateKind::Or: {
          // AND under even polarity, or OR under odd polarity, is a product.
          const bool product = (n.gate == GateKind::And) != negated;
          result = of(ops[0], negated);
          for (std::size_t i = 1; i < ops.size(); ++i) {
            result = product ? multiply(result, of(ops[i], negated))
                             : unite(result, of(ops[i], negated));
          }
          break;
        }
        case GateKind::Xor:
          if (!negated) {
            // (a & ~b) | (~a & b)
            result = unite(multiply(of(ops[0], false), of(ops[1], true)),
                           multiply(of(ops[0], true), of(ops[1], false)));
          } else {
            // (~a | b) & (a | ~b)
            result = multiply(unite(of(ops[0], true), of(ops[1], false)),
                              unite(of(ops[0], false), of(ops[1], true)));
          }
          break;
      }
    }
    slot = std::move(result);
    return *slot;
  }

 private:
  std::vector<Term> unite(const std::vector<Term>& a, const std::vector<Term>& b) {
    std::vector<Term> out(a);
    out.insert(out.end(), b.begin(), b.end());
    absorb(out);
    if (out.size() > budget_.max_terms) overflow("DMCF", out.size(), budget_.max_terms);
    return out;
  }

  std::vector<Term> multiply(const std::vector<Term>& a, const std::vector<Term>& b) {
    const std::size_t raw = a.size() * b.size();
    if (raw > budget_.max_terms * 16) overflow("DMCF product", raw, budget_.max_terms);
    std::vector<Term> out;
    out.reserve(raw);
    for (const Term& x : a)
      for (const Term& y : b) out.push_back(x.conjoin(y));
    absorb(out);
    if (out.size() > budget_.max_terms) overflow("DMCF", out.size(), budget_.max_terms);
    return out;
  }

  const Circuit& c_;
  const NormalFormBudget& budget_;
  std::vector<std::optional<std::vector<Term>>> memo_;
};

Dnf make_dnf(const Circuit& c, std::vector<Term> terms, DnfKind kind) {
  Dnf d;
  d.variables.assign(c.inputs().begin(), c.inputs().end());
  std::sort(terms.begin(), terms.end(), term_less);
  d.terms = std::move(terms);
  d.kind = kind;
  return d;
}

bool bit_of(const std::vector<std::uint64_t>& table, std::uint64_t index) {
  return (table[index >> 6] >> (index & 63)) & 1;
}

Term cube_term(std::uint64_t care, std::uint64_t value) {
  return Term(care & value, care & ~value);
}

}  // namespace

Dnf to_dmcf(const Circuit& circuit, std::string_view output, bool negate,
            const NormalFormBudget& budget) {
  require_small(circuit);
  const NodeId root = circuit.output(output).node;
  DmcfBuilder builder(circuit, budget);
  return make_dnf(circuit, builder.of(root, negate), DnfKind::Dmcf);
}

std::vector<std::uint64_t> truth_table(const Circuit& circuit, std::string_view output,
                                       bool negate, const NormalFormBudget& budget) {
  require_small(circuit);
  const std::size_t n = circuit.input_count();
  if (n > budget.max_truth_table_vars) {
    throw Error(Errc::budget_exceeded,
                fmt::format("{} inputs exceed the truth-table budget of {}", n,
                            budget.max_truth_table_vars))
        .with_partial_size(0);
  }
  const std::size_t out_index = circuit.output_index(output);
  const std::uint64_t points = std::uint64_t{1} << n;
  const std::size_t words = static_cast<std::size_t>((points + 63) / 64);
  static constexpr std::uint64_t kPattern[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  std::vector<std::uint64_t> table(words);
  std::vector<std::uint64_t> in(n);
  for (std::size_t w = 0; w < words; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      in[i] = i < 6 ? kPattern[i] : (((w >> (i - 6)) & 1) ? ~std::uint64_t{0} : 0);
    }
    std::uint64_t word = simulate_words(circuit, in)[out_index];
    if (negate) word = ~word;
    if (points < 64) word &= (std::uint64_t{1} << points) - 1;
    table[w] = word;
  }
  return table;
}

Dnf fdnf(const Circuit& circuit, std::string_view output, bool negate,
         const NormalFormBudget& budget) {
  const auto table = truth_table(circuit, output, negate, budget);
  const std::size_t n = circuit.input_count();
  const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  std::vector<Term> terms;
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << n); ++p)
    if (bit_of(table, p)) terms.push_back(cube_term(full, p));
  return make_dnf(circuit, std::move(terms), DnfKind::Fdnf);
}

Dnf blake_bcf(const Circuit& circuit, std::string_view output, bool negate,
              const NormalFormBudget& budget) {
  const auto table = truth_table(circuit, output, negate, budget);
  const std::size_t n = circuit.input_count();
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  // Quine-McCluskey: repeatedly merge cubes that differ in one cared-for
  // variable (the consensus x t + ~x t = t followed by absorption). Cubes that
  // never merge are exactly the prime implicants.
  struct CubeHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& c) const noexcept {
      return std::hash<std::uint64_t>()(c.first * 0x9E3779B97F4A7C15ull ^ c.second);
    }
  };
  using Cube = std::pair<std::uint64_t, std::uint64_t>;  // (care, value)
  std::vector<Cube> level;
  for (std::uint64_t p = 0; p <= full; ++p)
    if (bit_of(table, p)) level.emplace_back(full, p);

  std::vector<Term> primes;
  std::size_t generated = level.size();
  while (!level.empty()) {
    std::unordered_set<Cube, CubeHash> present(level.begin(), level.end());
    std::unordered_set<Cube, CubeHash> merged;
    std::unordered_set<Cube, CubeHash> next;
    for (const Cube& c : level) {
      std::uint64_t care = c.first;
      while (care) {
        const std::uint64_t bit = care & (~care + 1);
        care &= care - 1;
        if (c.second & bit) continue;
        const Cube partner{c.first, c.second | bit};
        if (!present.count(partner)) continue;
        merged.insert(c);
        merged.insert(partner);
        next.emplace(c.first & ~bit, c.second);
      }
    }
    for (const Cube& c : level)
      if (!merged.count(c)) primes.push_back(cube_term(c.first, c.second));
    generated += next.size();
    if (generated > budget.max_cubes) overflow("prime-implicant search", generated, budget.max_cubes);
    level.assign(next.begin(), next.end());
  }
  return make_dnf(circuit, std::move(primes), DnfKind::Bcf);
}

// ---------------------------------------------------------------------------

namespace {

class CoverSolver {
 public:
  CoverSolver(std::vector<std::vector<std::uint32_t>> covers, std::size_t universe,
              std::size_t node_limit)
      : covers_(std::move(covers)), by_point_(universe), count_(universe, 0),
        uncovered_(universe), node_limit_(node_limit) {
    for (std::uint32_t t = 0; t < covers_.size(); ++t)
      for (std::uint32_t p : covers_[t]) by_point_[p].push_back(t);
  }

  std::vector<std::uint32_t> greedy() {
    std::vector<int> count(count_.size(), 0);
    std::size_t left = count_.size();
    std::vector<std::uint32_t> pick;
    while (left > 0) {
      std::uint32_t best = 0;
      std::size_t best_gain = 0;
      for (std::uint32_t t = 0; t < covers_.size(); ++t) {
        std::size_t gain = 0;
        for (std::uint32_t p : covers_[t]) gain += count[p] == 0;
        if (gain > best_gain) {
          best_gain = gain;
          best = t;
        }
      }
      pick.push_back(best);
      for (std::uint32_t p : covers_[best]) left -= count[p]++ == 0;
    }
    // Drop terms made redundant by later picks.
    for (std::size_t i = pick.size(); i-- > 0;) {
      const bool needed = std::any_of(covers_[pick[i]].begin(), covers_[pick[i]].end(),
                                      [&](std::uint32_t p) { return count[p] == 1; });
      if (!needed) {
        for (std::uint32_t p : covers_[pick[i]]) --count[p];
        pick.erase(pick.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    return pick;
  }

  /// Returns (selection, proven optimal).
  std::pair<std::vector<std::uint32_t>, bool> exact() {
    best_ = greedy();
    // Essential terms: the only cover of some point.
    for (std::uint32_t p = 0; p < by_point_.size(); ++p) {
      if (by_point_[p].size() == 1 && count_[p] == 0) choose(by_point_[p][0]);
    }
    search();
    std::sort(best_.begin(), best_.end());
    return {best_, !aborted_};
  }

  std::size_t lower_bound() const {
    std::size_t max_gain = 0;
    for (std::uint32_t t = 0; t < covers_.size(); ++t) {
      std::size_t gain = 0;
      for (std::uint32_t p : covers_[t]) gain += count_[p] == 0;
      max_gain = std::max(max_gain, gain);
    }
    if (uncovered_ == 0) return 0;
    if (max_gain == 0) return count_.size() + 1;
    return (uncovered_ + max_gain - 1) / max_gain;
  }

 private:
  void choose(std::uint32_t t) {
    chosen_.push_back(t);
    for (std::uint32_t p : covers_[t]) uncovered_ -= count_[p]++ == 0;
  }
  void unchoose() {
    const std::uint32_t t = chosen_.back();
    chosen_.pop_back();
    for (std::uint32_t p : covers_[t]) uncovered_ += --count_[p] == 0;
  }

  void search() {
    if (aborted_) return;
    if (uncovered_ == 0) {
      if (chosen_.size() < best_.size()) best_ = chosen_;
      return;
    }
    if (++nodes_ > node_limit_) {
      aborted_ = true;
      return;
    }
    if (chosen_.size() + lower_bound() >= best_.size()) return;
    // Branch on the uncovered point with the fewest candidate terms.
    std::uint32_t pivot = 0;
    std::size_t fewest = SIZE_MAX;
    for (std::uint32_t p = 0; p < by_point_.size(); ++p) {
      if (count_[p] == 0 && by_point_[p].size() < fewest) {
        fewest = by_point_[p].size();
        pivot = p;
      }
    }
    std::vector<std::pair<std::size_t, std::uint32_t>> options;
    for (std::uint32_t t : by_point_[pivot]) {
      std::size_t gain = 0;
      for (std::uint32_t p : covers_[t]) gain += count_[p] == 0;
      options.emplace_back(gain, t);
    }
    std::sort(options.begin(), options.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (const auto& [gain, t] : options) {
      choose(t);
      search();
      unchoose();
      if (aborted_) return;
    }
  }

  std::vector<std::vector<std::uint32_t>> covers_;
  std::vector<std::vector<std::uint32_t>> by_point_;
  std::vector<int> count_;
  std::size_t uncovered_;
  std::vector<std::uint32_t> chosen_;
  std::vector<std::uint32_t> best_;
  std::size_t nodes_ = 0;
  std::size_t node_limit_;
  bool aborted_ = false;
};

constexpr std::size_t kMaxCoverVariables = 20;

}  // namespace

CoverResult minimal_cover(const Dnf& dnf, const NormalFormBudget& budget) {
  CoverResult result;
  result.contradictions = dnf.contradictions();
  result.cover.variables = dnf.variables;
  result.cover.kind = DnfKind::MinCover;

  std::vector<Term> candidates = dnf.implicants();
  std::sort(candidates.begin(), candidates.end(), term_less);
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) return result;

  const std::size_t n = dnf.variables.size();
  if (n > kMaxCoverVariables) {
    throw Error(Errc::budget_exceeded,
                fmt::format("{} variables exceed the cover limit of {}", n, kMaxCoverVariables))
        .with_partial_size(0);
  }
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  // Index the onset points actually covered by some term.
  std::vector<std::uint32_t> point_index(std::size_t{1} << n, UINT32_MAX);
  std::size_t universe = 0;
  std::vector<std::vector<std::uint32_t>> covers(candidates.size());
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    const Term& term = candidates[t];
    const std::uint64_t care = term.support();
    const std::uint64_t free = full & ~care;
    std::uint64_t sub = 0;
    do {
      const std::uint64_t point = term.positive() | sub;
      auto& idx = point_index[point];
      if (idx == UINT32_MAX) idx = static_cast<std::uint32_t>(universe++);
      covers[t].push_back(idx);
      sub = (sub - free) & free;
    } while (sub != 0);
  }

  CoverSolver solver(std::move(covers), universe, budget.max_cover_nodes);
  std::vector<std::uint32_t> pick;
  if (n <= budget.max_truth_table_vars) {
    auto [sel, optimal] = solver.exact();
    pick = std::move(sel);
    result.optimal = optimal;
  } else {
    pick = solver.greedy();
    result.optimal = pick.size() <= solver.lower_bound();
  }
  for (std::uint32_t t : pick) result.cover.terms.push_back(candidates[t]);
  std::sort(result.cover.terms.begin(), result.cover.terms.end(), term_less);
  return result;
}

ComplexityReport complexity_report(const Circuit& circuit, std::string_view output,
                                   const NormalFormBudget& budget) {
  ComplexityReport r;
  r.m_min = minimal_cover(to_dmcf(circuit, output, false, budget), budget);
  r.m_min_neg = minimal_cover(to_dmcf(circuit, output, true, budget), budget);
  r.b_min = minimal_cover(blake_bcf(circuit, output, false, budget), budget);
  r.b_min_neg = minimal_cover(blake_bcf(circuit, output, true, budget), budget);
  r.c_s = r.m_min.cover.terms.size() + r.m_min_neg.cover.terms.size();
  r.c_f = r.b_min.cover.terms.size() + r.b_min_neg.cover.terms.size();
  r.c_v_upper = r.c_s;
  r.exact = r.m_min.optimal && r.m_min_neg.optimal && r.b_min.optimal && r.b_min_neg.optimal;
  return r;
}

std::vector<TestVector> generate_test_vectors(const Circuit& circuit, std::string_view output,
                                              const TestVectorOptions& options,
                                              const NormalFormBudget& budget) {
  const std::size_t n = circuit.input_count();
  std::uint64_t controls = 0;
  for (const std::string& name : options.control_inputs) {
    const auto idx = circuit.input_index(name);
    if (!idx) throw Error(Errc::undeclared_identifier, fmt::format("'{}' is not an input", name));
    controls |= std::uint64_t{1} << *idx;
  }
  const std::uint64_t all = (n == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;

  std::vector<TestVector> out;
  const auto emit = [&](const CoverResult& cover, BinaryValue expected) {
    for (const Term& term : cover.cover.terms) {
      TestVector tv;
      tv.term = term;
      tv.expected = expected;
      tv.ternary.assign(n, TernaryValue::X);
      tv.m_form.assign(n, MValue(1));
      // A term over every variable leaves nothing to separate, so 1 suffices.
      const std::int64_t mag = (term.support() & ~controls) == (all & ~controls) &&
                                       (term.support() == all)
                                   ? 1
                                   : 2;
      for (const Literal& l : term.literals()) {
        tv.ternary[l.var] = l.negated ? TernaryValue::F : TernaryValue::T;
        const bool control = (controls >> l.var) & 1;
        const MValue v = control ? MValue::top() : MValue(mag);
        tv.m_form[l.var] = l.negated ? -v : v;
      }
      out.push_back(std::move(tv));
    }
  };
  emit(minimal_cover(to_dmcf(circuit, output, false, budget), budget), BinaryValue::T);
  emit(minimal_cover(to_dmcf(circuit, output, true, budget), budget), BinaryValue::F);
  return out;
}

// ---------------------------------------------------------------------------

MValue evaluate_term(const Term& term, std::span<const MValue> values) {
  MValue acc = MValue::top();
  for (const Literal& l : term.literals()) {
    const MValue v = l.negated ? -values[l.var] : values[l.var];
    acc = std::min(acc, v);
  }
  return acc;
}

MValue evaluate_dnf(const Dnf& dnf, std::span<const MValue> values) {
  MValue acc = MValue::bottom();
  for (const Term& t : dnf.terms) acc = std::max(acc, evaluate_term(t, values));
  return acc;
}

std::string format_term(const Term& term, std::span<const std::string> variables) {
  if (term.empty()) return "1";
  std::string s;
  for (const Literal& l : term.literals()) {
    if (l.negated) s += '~';
    s += l.var < variables.size() ? variables[l.var] : fmt::format("x{}", l.var);
  }
  return s;
}

std::string format_terms(std::span<const Term> terms, std::span<const std::string> variables) {
  if (terms.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) s += " + ";
    s += format_term(terms[i], variables);
  }
  return s;
}

std::string format_dnf(const Dnf& dnf) { return format_terms(dnf.terms, dnf.variables); }

Circuit dnf_to_circuit(const Dnf& dnf, const std::string& output) {
  if (dnf.terms.empty()) throw Error(Errc::invalid_argument, "empty DNF has no constant-free circuit");
  CircuitBuilder b;
  std::vector<NodeId> pos, neg(dnf.variables.size(), UINT32_MAX);
  for (const std::string& v : dnf.variables) pos.push_back(b.add_input(v));
  const auto literal = [&](const Literal& l) {
    if (!l.negated) return pos[l.var];
    if (neg[l.var] == UINT32_MAX) neg[l.var] = b.add_not(pos[l.var]);
    return neg[l.var];
  };
  std::vector<NodeId> products;
  for (const Term& t : dnf.terms) {
    if (t.empty()) throw Error(Errc::invalid_argument, "empty term has no constant-free circuit");
    std::vector<NodeId> ops;
    for (const Literal& l : t.literals()) ops.push_back(literal(l));
    products.push_back(ops.size() == 1 ? ops[0] : b.add_and(std::move(ops)));
  }
  const NodeId root = products.size() == 1 ? products[0] : b.add_or(std::move(products));
  b.add_output(output, root);
  return b.build();
}

std::string complexity_to_json(const ComplexityReport& r, int indent) {
  using nlohmann::ordered_json;
  const auto& vars = r.m_min.cover.variables;
  const auto list = [&](const std::vector<Term>& terms) {
    ordered_json a = ordered_json::array();
    for (const Term& t : terms) a.push_back(format_term(t, vars));
    return a;
  };
  ordered_json j;
  j["schema_version"] = 1;
  j["c_f"] = r.c_f;
  j["c_s"] = r.c_s;
  j["c_v_upper"] = r.c_v_upper;
  j["exact"] = r.exact;
  j["m_min"] = list(r.m_min.cover.terms);
  j["m_min_neg"] = list(r.m_min_neg.cover.terms);
  j["b_min"] = list(r.b_min.cover.terms);
  j["b_min_neg"] = list(r.b_min_neg.cover.terms);
  j["contradictions"] = list(r.m_min.contradictions);
  j["contradictions_neg"] = list(r.m_min_neg.contradictions);
  return j.dump(indent);
}

}  // namespace mvl
