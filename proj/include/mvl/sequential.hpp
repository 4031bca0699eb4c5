#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvl/netlist.hpp"
#include "mvl/simulator.hpp"
#include "mvl/value.hpp"

namespace mvl {

/// M value carrying its date of birth. Magnitudes are ordered by
/// (infinite truth, epoch, truth); the sign is applied on top.
class TemporalValue {
 public:
  static constexpr std::int64_t kPreBirth = -1;

  constexpr TemporalValue() = default;
  TemporalValue(bool negative, std::int64_t epoch, std::int64_t truth);
  static TemporalValue infinite(bool negative, std::int64_t epoch);

  constexpr bool negative() const noexcept { return negative_; }
  constexpr std::int64_t epoch() const noexcept { return epoch_; }
  /// Truth part; meaningless when infinite().
  constexpr std::int64_t truth() const noexcept { return truth_; }
  constexpr bool infinite_truth() const noexcept { return inf_; }
  constexpr bool pre_birth() const noexcept { return epoch_ == kPreBirth; }

  constexpr TemporalValue operator-() const noexcept {
    TemporalValue t = *this;
    t.negative_ = !negative_;
    return t;
  }

  /// The underlying M value with the truth part only.
  MValue truth_value() const;

  friend std::strong_ordering operator<=>(const TemporalValue& a, const TemporalValue& b) noexcept;
  friend bool operator==(const TemporalValue&, const TemporalValue&) noexcept = default;

 private:
  bool negative_ = false;
  bool inf_ = false;
  std::int64_t epoch_ = 0;
  std::int64_t truth_ = 1;
};

/// "-01 004"-style rendering with `digits` truth digits; pre-birth epochs
/// print as "pb" and infinite truth as "inf".
std::string format_temporal(const TemporalValue& v, int digits = 3);

struct SeqState {
  std::size_t cycle = 0;
  std::vector<TemporalValue> registers;  // by register position
};

struct StepResult {
  SeqState next;
  BasicTrace<TemporalValue> trace;
};

/// One clock cycle: evaluates all nodes, then latches the next-state values.
/// Every input must carry epoch == state.cycle.
StepResult step(const Circuit& circuit, const SeqState& state,
                std::span<const TemporalValue> inputs);

struct StimulusPlan {
  enum class Source : std::uint8_t { Rows, SignedPermutations };
  Source source = Source::SignedPermutations;
  /// Truth parts per cycle, in input order (Rows source).
  std::vector<std::vector<MValue>> rows;
  std::uint64_t seed = 0;
  int truth_digits = 3;
  /// Inputs driven with infinite truth (sign still drawn per cycle).
  std::vector<std::string> control_inputs;
  /// Initial register contents; defaults to seeded pre-birth values.
  std::optional<std::vector<TemporalValue>> initial_registers;
};

/// Pre-birth values: epoch -1, distinct truths 1..R in seeded order and
/// seeded signs.
std::vector<TemporalValue> pre_birth_values(std::size_t registers, std::uint64_t seed);

/// The input values of one cycle under a plan.
std::vector<TemporalValue> stimulus_row(const Circuit& circuit, const StimulusPlan& plan,
                                        std::size_t cycle);

struct RunResult {
  std::vector<SeqState> states;  // states[0] is the initial state
  std::vector<std::vector<TemporalValue>> inputs;   // per cycle
  std::vector<std::vector<TemporalValue>> outputs;  // per cycle, circuit output order
  int truth_digits = 3;
};

RunResult run(const Circuit& circuit, const StimulusPlan& plan, std::size_t cycles);

struct InitializationReport {
  std::optional<std::size_t> length;  // L; empty when never initialized in the horizon
  std::vector<std::int64_t> min_epoch;      // per state l, lowest register epoch (cycle l when no registers)
  std::vector<std::int64_t> shifted_length;   // (l - k) + 2 per state
};

InitializationReport detect_initialization(const RunResult& run);

/// Strong-Kleene simulation from the all-X state; returns the first cycle at
/// which every register is binary, or empty when the stimulus runs out first.
std::optional<std::size_t> ternary_init_oracle(const Circuit& circuit,
                                               const std::vector<std::vector<BinaryValue>>& stimulus);

/// Binary sequential simulation; returns the per-cycle outputs.
std::vector<std::vector<BinaryValue>> binary_sequential_run(
    const Circuit& circuit, const std::vector<BinaryValue>& initial_registers,
    const std::vector<std::vector<BinaryValue>>& stimulus);

/// CSV with a header of input names (any order) and one row per cycle.
std::vector<std::vector<MValue>> parse_stimulus_csv(const Circuit& circuit, std::string_view text,
                                                    const ValueSyntax& syntax = {});

std::string run_to_json(const RunResult& run, const Circuit& circuit,
                        const InitializationReport& init, int indent = 2);

}  // namespace mvl
