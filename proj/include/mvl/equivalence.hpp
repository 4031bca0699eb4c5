#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvl/abstraction.hpp"
#include "mvl/netlist.hpp"
#include "mvl/normal_forms.hpp"

namespace mvl {

/// Pairs the inputs and outputs of two circuits by name.
struct InterfaceMap {
  std::vector<std::size_t> b_input;  // B's input position for each input of A
  std::vector<std::pair<std::size_t, std::size_t>> outputs;  // (A index, B index)
  std::vector<std::string> output_names;

  static InterfaceMap match(const Circuit& a, const Circuit& b);
  template <class T>
  std::vector<T> to_b(const std::vector<T>& in_a_order) const {
    std::vector<T> out(in_a_order.size());
    for (std::size_t i = 0; i < b_input.size(); ++i) out[b_input[i]] = in_a_order[i];
    return out;
  }
  template <class T>
  std::vector<T> from_b(const std::vector<T>& in_b_order) const {
    std::vector<T> out(in_b_order.size());
    for (std::size_t i = 0; i < b_input.size(); ++i) out[i] = in_b_order[b_input[i]];
    return out;
  }
};

struct OracleVerdict {
  bool equivalent = true;
  std::vector<BinaryValue> counterexample;  // in A's input order; empty when equivalent
  std::vector<std::string> differing_outputs;
};

/// Exhaustive comparison over all 2^n binary vectors.
OracleVerdict binary_equivalence_oracle(const Circuit& a, const Circuit& b,
                                        std::size_t max_inputs = 20);

// ---------------------------------------------------------------------------

enum class SearchOutcome : std::uint8_t { Counterexample, MDiscrepancy, BudgetExhausted };
std::string_view to_string(SearchOutcome o) noexcept;

struct SearchOptions {
  std::size_t budget = 10000;         // trials
  std::uint64_t seed = 0;
  std::size_t expansion_cap = 4096;   // flips tried per side and output
  unsigned workers = 1;               // 0: all cores
  bool stop_on_m_discrepancy = false;  // stop once the M outputs differ
  bool keep_log = false;              // record every discrepancy
};

struct Discrepancy {
  std::size_t trial = 0;
  std::string output;
  SignedPermutation w;  // in A's input order
  MValue out_a;
  MValue out_b;
  AbstractValuation av_a;  // A's input order
  AbstractValuation av_b;
};

struct SearchStats {
  std::size_t trials = 0;
  std::size_t m_output_discrepancies = 0;   // (trial, output) pairs with differing M outputs
  std::size_t abstraction_discrepancies = 0;
  std::size_t expansions = 0;               // flipped vectors simulated
};

struct EquivVerdict {
  SearchOutcome outcome = SearchOutcome::BudgetExhausted;
  std::vector<BinaryValue> counterexample;  // A's input order
  std::optional<std::size_t> found_at_trial;
  std::string found_by;                     // "draw", "expand-a" or "expand-b"
  std::optional<Discrepancy> first_discrepancy;    // M outputs or abstractions differ
  std::optional<Discrepancy> first_m_discrepancy;  // M outputs differ
  std::vector<Discrepancy> log;
  SearchStats stats;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
};

/// Randomized search for a binary counterexample guided by M simulation.
EquivVerdict nonequivalence_search(const Circuit& a, const Circuit& b,
                                   const SearchOptions& options = {});

struct BlindResult {
  std::optional<std::size_t> found_at_trial;
  std::vector<BinaryValue> counterexample;
};

/// Uniform binary sampling only; draws the same vectors as the first step of
/// every nonequivalence_search trial with the same seed.
BlindResult random_binary_search(const Circuit& a, const Circuit& b, std::size_t budget,
                                 std::uint64_t seed);

std::string verdict_to_json(const EquivVerdict& verdict, const Circuit& a,
                            const SearchOptions& options, int indent = 2);
std::string oracle_to_json(const OracleVerdict& verdict, const Circuit& a, int indent = 2);

// ---------------------------------------------------------------------------

enum class MutationKind : std::uint8_t { RedundantContradiction, RedundantTautology, ConjunctiveBug };
std::string_view to_string(MutationKind kind) noexcept;
MutationKind parse_mutation_kind(std::string_view text);

struct MutationSpec {
  MutationKind kind = MutationKind::RedundantContradiction;
  /// Variable for the redundant kinds; drawn from the seed when empty.
  std::string variable;
  /// Literals of the conjunctive bug, e.g. "x1 x2 ~x3" or "x1 & ~x3".
  std::string term;
  /// Output to mutate; every output when empty.
  std::string output;
};

/// f | (x & ~x), f & (x | ~x), or f | term on the selected outputs.
Circuit inject_mutation(const Circuit& circuit, const MutationSpec& spec, std::uint64_t seed = 0);

/// Parses a conjunction of literals over the circuit inputs.
Term parse_term(const Circuit& circuit, std::string_view text);

}  // namespace mvl
