#include "mvl/value.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include <fmt/format.h>

namespace mvl {

std::string_view to_string(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::Not: return "NOT";
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Xor: return "XOR";
  }
  return "?";
}

void check_arity(GateKind kind, std::size_t count) {
  const bool ok = (kind == GateKind::Not && count == 1) ||
                  (kind == GateKind::Xor && count == 2) ||
                  ((kind == GateKind::And || kind == GateKind::Or) && count >= 2);
  if (!ok) {
    throw Error(Errc::arity,
                fmt::format("{} gate cannot take {} operand(s)", to_string(kind), count));
  }
}

MValue apply_gate(GateKind kind, std::span<const MValue> operands) {
  return evaluate_gate<MValue>(kind, operands).value;
}

MValue apply_gate(GateKind kind, std::initializer_list<MValue> operands) {
  return apply_gate(kind, std::span<const MValue>(operands.begin(), operands.size()));
}

BinaryValue binary_apply(GateKind kind, std::span<const BinaryValue> operands) {
  check_arity(kind, operands.size());
  switch (kind) {
    case GateKind::Not:
      return !operands[0];
    case GateKind::And:
      for (BinaryValue b : operands)
        if (b == BinaryValue::F) return BinaryValue::F;
      return BinaryValue::T;
    case GateKind::Or:
      for (BinaryValue b : operands)
        if (b == BinaryValue::T) return BinaryValue::T;
      return BinaryValue::F;
    case GateKind::Xor:
      return operands[0] != operands[1] ? BinaryValue::T : BinaryValue::F;
  }
  throw Error(Errc::invalid_argument, "unknown gate kind");
}

TernaryValue k3_apply(GateKind kind, std::span<const TernaryValue> operands) {
  check_arity(kind, operands.size());
  switch (kind) {
    case GateKind::Not:
      switch (operands[0]) {
        case TernaryValue::T: return TernaryValue::F;
        case TernaryValue::F: return TernaryValue::T;
        case TernaryValue::X: return TernaryValue::X;
      }
      break;
    case GateKind::And: {
      TernaryValue r = TernaryValue::T;
      for (TernaryValue t : operands) r = std::min(r, t);
      return r;
    }
    case GateKind::Or: {
      TernaryValue r = TernaryValue::F;
      for (TernaryValue t : operands) r = std::max(r, t);
      return r;
    }
    case GateKind::Xor:
      if (operands[0] == TernaryValue::X || operands[1] == TernaryValue::X) return TernaryValue::X;
      return operands[0] != operands[1] ? TernaryValue::T : TernaryValue::F;
  }
  throw Error(Errc::invalid_argument, "unknown gate kind");
}

TernaryValue k3_apply(GateKind kind, std::initializer_list<TernaryValue> operands) {
  return k3_apply(kind, std::span<const TernaryValue>(operands.begin(), operands.size()));
}

char to_char(BinaryValue b) noexcept { return b == BinaryValue::T ? 'T' : 'F'; }

char to_char(TernaryValue t) noexcept {
  switch (t) {
    case TernaryValue::T: return 'T';
    case TernaryValue::F: return 'F';
    case TernaryValue::X: return 'X';
  }
  return '?';
}

TernaryValue parse_ternary(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'T': return TernaryValue::T;
    case 'F': return TernaryValue::F;
    case 'X': return TernaryValue::X;
    default:
      throw Error(Errc::syntax, fmt::format("'{}' is not a ternary value (T/F/X)", c));
  }
}

TernaryValue project_ternary(MValue a, std::int64_t n) {
  if (n < 1) throw Error(Errc::invalid_argument, fmt::format("threshold {} must be >= 1", n));
  if (a.magnitude() < n) return TernaryValue::X;
  return a.negative() ? TernaryValue::F : TernaryValue::T;
}

MValue parse_value(std::string_view text, const ValueSyntax& syntax) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  if (body == "inf") return negative ? MValue::bottom() : MValue::top();

  std::int64_t magnitude = 0;
  auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), magnitude);
  if (body.empty() || ec != std::errc() || end != body.data() + body.size() || magnitude < 0) {
    throw Error(Errc::syntax, fmt::format("'{}' is not a value (expected [-]N or [-]inf)", text));
  }
  if (magnitude == 0) throw Error(Errc::syntax, "0 is not a value of M");
  if (syntax.inf_ceiling && magnitude >= *syntax.inf_ceiling) {
    return negative ? MValue::bottom() : MValue::top();
  }
  if (magnitude == MValue::kInfMagnitude) {
    throw Error(Errc::syntax, fmt::format("magnitude of '{}' is out of range", text));
  }
  return MValue(negative ? -magnitude : magnitude);
}

std::string format_value(MValue a) {
  if (a.is_infinite()) return a.negative() ? "-inf" : "inf";
  return std::to_string(a.raw());
}

}  // namespace mvl
