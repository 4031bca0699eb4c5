#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvl/netlist.hpp"
#include "mvl/value.hpp"

namespace mvl {

/// w = (v, sigma): input k receives signs[k] * sigma[k], where sigma is a
/// permutation of 1..n.
struct SignedPermutation {
  std::vector<bool> negative;
  std::vector<std::size_t> sigma;

  std::size_t size() const noexcept { return sigma.size(); }
  std::vector<MValue> values() const;
  std::vector<BinaryValue> binary() const;
  std::string to_string() const;  // "(3,-1,-2,5,-4)"

  /// From the signed values; rejects anything that is not a signed permutation.
  static SignedPermutation from_values(std::span<const std::int64_t> values);
  /// Parses "3,-1,-2,5,-4" (parentheses optional).
  static SignedPermutation parse(std::string_view text);

  friend bool operator==(const SignedPermutation&, const SignedPermutation&) = default;
};

SignedPermutation random_signed_permutation(std::size_t n, std::uint64_t seed);
SignedPermutation random_signed_permutation(std::size_t n, std::mt19937_64& rng);

/// Signed permutation with the given signs and a uniformly random sigma.
SignedPermutation random_sigma(std::span<const BinaryValue> v, std::mt19937_64& rng);

/// Exchanges the values i and j (1-based) wherever they sit in sigma.
std::vector<std::size_t> transpose(std::vector<std::size_t> sigma, std::size_t i, std::size_t j);

using AbstractValuation = std::vector<TernaryValue>;

std::string format_ternary(std::span<const TernaryValue> values);  // "T,X,F"
AbstractValuation parse_ternary_vector(std::string_view text);

enum class AbstractionMode : std::uint8_t { Faithful, Strict };
std::string_view to_string(AbstractionMode mode) noexcept;

struct AbstractionOptions {
  AbstractionMode mode = AbstractionMode::Strict;
  /// After the main result, flip the sign of the input that carries the
  /// output magnitude and run again; the outcome is reported separately.
  bool sign_flip_probe = false;
};

struct IterationRecord {
  std::vector<MValue> w;
  MValue output;
  std::size_t i = 0;  // threshold after this simulation
  std::size_t j = 0;  // largest swap target before decrementing
};

struct SignFlipProbe {
  std::size_t input = 0;
  MValue output;  // output under the flipped stimulus
  AbstractValuation valuation;
};

struct AbstractionResult {
  AbstractValuation valuation;
  std::vector<IterationRecord> log;     // one entry per loop simulation
  std::optional<IterationRecord> final_check;  // strict mode re-evaluation
  SignedPermutation final_w;
  std::size_t threshold = 0;             // i used for the projection
  std::vector<std::size_t> greedy_flips; // entries set to X after projection
  std::optional<SignFlipProbe> probe;
};

/// Computes a maximal abstract valuation of `output` (may be empty when the
/// circuit has a single output) for the stimulus `w`.
AbstractionResult maximal_abstract_valuation(const Circuit& circuit, std::string_view output,
                                             const SignedPermutation& w,
                                             const AbstractionOptions& options = {});

enum class Maximality : std::uint8_t { Maximal, NotAbstractionConsistent, NotMaximal };
std::string_view to_string(Maximality m) noexcept;

struct MaximalityVerdict {
  Maximality status = Maximality::Maximal;
  std::optional<std::size_t> witness;  // first entry that can be dropped to X
  TernaryValue output = TernaryValue::X;
};

MaximalityVerdict check_maximal(const Circuit& circuit, std::string_view output,
                                std::span<const TernaryValue> av);

/// Name of the only output, or `output` itself after checking it exists.
std::string resolve_output(const Circuit& circuit, std::string_view output);

std::string abstraction_to_json(const AbstractionResult& result, const Circuit& circuit,
                                std::string_view output, AbstractionMode mode, int indent = 2);

}  // namespace mvl
