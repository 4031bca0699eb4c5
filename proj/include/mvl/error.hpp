#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mvl {

enum class Errc {
  invalid_argument,
  syntax,
  undeclared_identifier,
  duplicate_definition,
  combinational_cycle,
  arity,
  missing_output,
  incomplete_valuation,
  sequential_circuit,
  budget_exceeded,
  interface_mismatch,
  trace_mismatch,
  epoch_mismatch,
  stimulus_underrun,
  io,
};

std::string_view to_string(Errc code) noexcept;

struct SourceLocation {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
};

/// Every failure raised by the library carries a machine-readable code and,
/// for input-format problems, the offending location.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<SourceLocation> where = std::nullopt);

  Errc code() const noexcept { return code_; }
  const std::optional<SourceLocation>& location() const noexcept { return where_; }

  /// Size reached before a budget stopped the computation (budget_exceeded only).
  std::size_t partial_size() const noexcept { return partial_size_; }
  Error& with_partial_size(std::size_t n) noexcept {
    partial_size_ = n;
    return *this;
  }

 private:
  Errc code_;
  std::optional<SourceLocation> where_;
  std::size_t partial_size_ = 0;
};

}  // namespace mvl
