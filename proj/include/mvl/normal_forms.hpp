#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvl/netlist.hpp"
#include "mvl/value.hpp"

namespace mvl {

/// Normal forms handle at most this many variables (literal sets are bitmasks).
inline constexpr std::size_t kMaxDnfVariables = 64;

struct Literal {
  std::uint32_t var = 0;
  bool negated = false;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Conjunction of literals over variables 0..63. A term may hold both x and ~x,
/// in which case it is contradictory.
class Term {
 public:
  constexpr Term() = default;
  constexpr Term(std::uint64_t positive, std::uint64_t negative)
      : pos_(positive), neg_(negative) {}
  static Term of(std::initializer_list<Literal> literals);

  constexpr std::uint64_t positive() const noexcept { return pos_; }
  constexpr std::uint64_t negative() const noexcept { return neg_; }

  constexpr bool contradictory() const noexcept { return (pos_ & neg_) != 0; }
  constexpr bool empty() const noexcept { return (pos_ | neg_) == 0; }
  std::size_t size() const noexcept;
  /// Variables mentioned by the term.
  constexpr std::uint64_t support() const noexcept { return pos_ | neg_; }

  /// True when every literal of *this also occurs in `other`.
  constexpr bool subterm_of(const Term& other) const noexcept {
    return (pos_ & ~other.pos_) == 0 && (neg_ & ~other.neg_) == 0;
  }
  constexpr Term conjoin(const Term& other) const noexcept {
    return Term(pos_ | other.pos_, neg_ | other.neg_);
  }

  /// Literals ordered by variable index, positive before negated.
  std::vector<Literal> literals() const;

  friend constexpr bool operator==(const Term&, const Term&) = default;

 private:
  std::uint64_t pos_ = 0;
  std::uint64_t neg_ = 0;
};

/// Canonical order: lexicographic over the literal sequences.
bool term_less(const Term& a, const Term& b);

enum class DnfKind : std::uint8_t { Raw, Dmcf, Bcf, Fdnf, MinCover };
std::string_view to_string(DnfKind kind) noexcept;

struct Dnf {
  std::vector<std::string> variables;
  std::vector<Term> terms;  // canonical order
  DnfKind kind = DnfKind::Raw;

  std::vector<Term> implicants() const;
  std::vector<Term> contradictions() const;
};

struct NormalFormBudget {
  std::size_t max_terms = std::size_t{1} << 16;  // DMCF intermediate/final terms
  std::size_t max_truth_table_vars = 16;          // BCF, FDNF, exact covers
  std::size_t max_cubes = std::size_t{1} << 22;   // prime-implicant generation
  std::size_t max_cover_nodes = 2'000'000;        // branch-and-bound search nodes
};

/// Sorts terms canonically and removes every term that has a (non-strict)
/// subterm earlier in the list, i.e. applies idempotence and absorption.
void absorb(std::vector<Term>& terms);

/// De Morgan canonical form of one output (or of its negation): negations are
/// pushed to the literals, products distributed, and absorbed. Contradictory
/// terms survive.
Dnf to_dmcf(const Circuit& circuit, std::string_view output, bool negate = false,
            const NormalFormBudget& budget = {});

/// All prime implicants, from the truth table.
Dnf blake_bcf(const Circuit& circuit, std::string_view output, bool negate = false,
              const NormalFormBudget& budget = {});

/// All satisfying minterms.
Dnf fdnf(const Circuit& circuit, std::string_view output, bool negate = false,
         const NormalFormBudget& budget = {});

struct CoverResult {
  Dnf cover;                        // implicant terms only
  std::vector<Term> contradictions; // carried through unchanged
  bool optimal = true;
};

/// Smallest set of implicant terms whose binary onsets jointly cover the onset
/// of all implicant terms. Exact up to `max_truth_table_vars` variables and
/// greedy beyond (then `optimal` reports whether the greedy size was proven
/// minimal).
CoverResult minimal_cover(const Dnf& dnf, const NormalFormBudget& budget = {});

struct ComplexityReport {
  std::size_t c_f = 0;
  std::size_t c_s = 0;
  std::size_t c_v_upper = 0;
  CoverResult m_min;      // M_min(phi)
  CoverResult m_min_neg;  // M_min(~phi)
  CoverResult b_min;      // B_min(phi)
  CoverResult b_min_neg;  // B_min(~phi)
  bool exact = true;      // every cover proven minimal
};

ComplexityReport complexity_report(const Circuit& circuit, std::string_view output,
                                   const NormalFormBudget& budget = {});

struct TestVector {
  std::vector<TernaryValue> ternary;  // term literals set, everything else X
  BinaryValue expected = BinaryValue::T;
  Term term;
  std::vector<MValue> m_form;
};

struct TestVectorOptions {
  /// Inputs driven at +/-infinity instead of +/-2 when a term mentions them.
  std::vector<std::string> control_inputs;
};

/// One ternary vector per term of M_min(phi) (expected T) followed by one per
/// term of M_min(~phi) (expected F).
std::vector<TestVector> generate_test_vectors(const Circuit& circuit, std::string_view output,
                                              const TestVectorOptions& options = {},
                                              const NormalFormBudget& budget = {});

// ---------------------------------------------------------------------------

/// Truth table of one output: bit k of the result is the value at the input
/// vector whose bit i is input i.
std::vector<std::uint64_t> truth_table(const Circuit& circuit, std::string_view output,
                                       bool negate = false, const NormalFormBudget& budget = {});

/// Max over terms of min over literals (empty DNF is -inf, empty term +inf).
MValue evaluate_dnf(const Dnf& dnf, std::span<const MValue> values);
MValue evaluate_term(const Term& term, std::span<const MValue> values);

/// "x + y~y"; the empty DNF prints as "0" and the empty term as "1".
std::string format_term(const Term& term, std::span<const std::string> variables);
std::string format_dnf(const Dnf& dnf);
std::string format_terms(std::span<const Term> terms, std::span<const std::string> variables);

/// Two-level OR-of-ANDs circuit over the DNF's variables with one output.
Circuit dnf_to_circuit(const Dnf& dnf, const std::string& output = "f");

std::string complexity_to_json(const ComplexityReport& report, int indent = 2);

}  // namespace mvl
