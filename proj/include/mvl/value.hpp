#pragma once

// Value domains: the multiple-valued domain M over Z \ {0} extended with
// +/-infinity, binary B2 and strong-Kleene ternary K3, plus the gate
// semantics and projections between them.

#include <compare>
#include <concepts>
#include <initializer_list>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "mvl/error.hpp"

namespace mvl {

enum class GateKind : std::uint8_t { Not, And, Or, Xor };

std::string_view to_string(GateKind kind) noexcept;

/// Throws Errc::arity unless `count` operands are legal for `kind`.
void check_arity(GateKind kind, std::size_t count);

/// An element of M. Ordered -inf < ... < -1 < 1 < ... < +inf; zero does not exist.
class MValue {
 public:
  /// Reserved magnitude standing for infinity; no finite value reaches it.
  static constexpr std::int64_t kInfMagnitude = std::numeric_limits<std::int64_t>::max();

  constexpr MValue() noexcept : raw_(1) {}
  explicit constexpr MValue(std::int64_t value) : raw_(value) {
    if (value == 0) throw Error(Errc::invalid_argument, "0 is not a value of M");
    if (value == kInfMagnitude || value == -kInfMagnitude ||
        value == std::numeric_limits<std::int64_t>::min()) {
      throw Error(Errc::invalid_argument, "finite magnitude out of range");
    }
  }

  static constexpr MValue top() noexcept { return MValue(Raw{kInfMagnitude}); }
  static constexpr MValue bottom() noexcept { return MValue(Raw{-kInfMagnitude}); }

  constexpr bool is_infinite() const noexcept {
    return raw_ == kInfMagnitude || raw_ == -kInfMagnitude;
  }
  constexpr bool negative() const noexcept { return raw_ < 0; }
  constexpr std::int64_t magnitude() const noexcept { return raw_ < 0 ? -raw_ : raw_; }
  /// Signed integer view; +/-kInfMagnitude for the infinities.
  constexpr std::int64_t raw() const noexcept { return raw_; }

  constexpr MValue operator-() const noexcept { return MValue(Raw{-raw_}); }
  constexpr MValue abs() const noexcept { return negative() ? -*this : *this; }

  friend constexpr auto operator<=>(MValue, MValue) noexcept = default;
  friend constexpr bool operator==(MValue, MValue) noexcept = default;

 private:
  struct Raw {
    std::int64_t v;
  };
  explicit constexpr MValue(Raw r) noexcept : raw_(r.v) {}

  std::int64_t raw_;
};

enum class BinaryValue : std::uint8_t { F, T };

/// Declaration order gives the truth order F < X < T used by min/max.
enum class TernaryValue : std::uint8_t { F, X, T };

constexpr BinaryValue operator!(BinaryValue b) noexcept {
  return b == BinaryValue::T ? BinaryValue::F : BinaryValue::T;
}
constexpr TernaryValue to_ternary(BinaryValue b) noexcept {
  return b == BinaryValue::T ? TernaryValue::T : TernaryValue::F;
}
constexpr bool is_binary(TernaryValue t) noexcept { return t != TernaryValue::X; }

char to_char(BinaryValue b) noexcept;
char to_char(TernaryValue t) noexcept;
/// Accepts T/F/X (case-insensitive).
TernaryValue parse_ternary(char c);

// ---------------------------------------------------------------------------
// Generic gate semantics. A value type V must be totally ordered, closed under
// unary minus (negation), and expose `negative()`. M and the temporal values of
// sequential simulation both qualify.

template <class V>
concept SignedLattice = requires(const V a, const V b) {
  { -a } -> std::same_as<V>;
  { a < b } -> std::convertible_to<bool>;
  { a == b } -> std::convertible_to<bool>;
  { a.negative() } -> std::convertible_to<bool>;
};

template <SignedLattice V>
constexpr V abs_value(const V& a) {
  return a.negative() ? -a : a;
}

/// Result of one gate plus the operand it was taken from (up to sign).
template <class V>
struct GateOutcome {
  V value;
  std::size_t source;  // index into the operand list
};

/// Evaluates one gate. AND picks the minimum and OR the maximum, ties going to
/// the lowest-numbered operand; XOR is (a & ~b) | (~a & b) and is attributed to
/// the operand of smaller magnitude.
template <SignedLattice V>
GateOutcome<V> evaluate_gate(GateKind kind, std::span<const V> operands) {
  check_arity(kind, operands.size());
  switch (kind) {
    case GateKind::Not:
      return {-operands[0], 0};
    case GateKind::And: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < operands.size(); ++i)
        if (operands[i] < operands[best]) best = i;
      return {operands[best], best};
    }
    case GateKind::Or: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < operands.size(); ++i)
        if (operands[best] < operands[i]) best = i;
      return {operands[best], best};
    }
    case GateKind::Xor: {
      const V& a = operands[0];
      const V& b = operands[1];
      const V left = (-b < a) ? -b : a;   // a & ~b
      const V right = (b < -a) ? b : -a;  // ~a & b
      const V value = (left < right) ? right : left;
      const std::size_t source = (abs_value(b) < abs_value(a)) ? 1 : 0;
      return {value, source};
    }
  }
  throw Error(Errc::invalid_argument, "unknown gate kind");
}

MValue apply_gate(GateKind kind, std::span<const MValue> operands);
MValue apply_gate(GateKind kind, std::initializer_list<MValue> operands);

BinaryValue binary_apply(GateKind kind, std::span<const BinaryValue> operands);
TernaryValue k3_apply(GateKind kind, std::span<const TernaryValue> operands);
TernaryValue k3_apply(GateKind kind, std::initializer_list<TernaryValue> operands);

/// Sign projection M -> B2.
constexpr BinaryValue project_binary(MValue a) noexcept {
  return a.negative() ? BinaryValue::F : BinaryValue::T;
}

/// Threshold projection M -> K3: F at or below -n, T at or above n, X between.
TernaryValue project_ternary(MValue a, std::int64_t n);

/// Threshold projection for any signed lattice, with the threshold given as a
/// (positive) value of the same type.
template <SignedLattice V>
TernaryValue project_ternary_at(const V& a, const V& threshold) {
  if (abs_value(a) < threshold) return TernaryValue::X;
  return a.negative() ? TernaryValue::F : TernaryValue::T;
}

struct ValueSyntax {
  /// When set, any literal whose magnitude reaches this ceiling becomes +/-inf.
  std::optional<std::int64_t> inf_ceiling;
};

/// Textual syntax: optional '-', then a decimal magnitude or "inf".
MValue parse_value(std::string_view text, const ValueSyntax& syntax = {});
std::string format_value(MValue a);

}  // namespace mvl
