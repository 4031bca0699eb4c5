#include "mvl/error.hpp"

#include <fmt/format.h>

namespace mvl {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::syntax: return "syntax";
    case Errc::undeclared_identifier: return "undeclared_identifier";
    case Errc::duplicate_definition: return "duplicate_definition";
    case Errc::combinational_cycle: return "combinational_cycle";
    case Errc::arity: return "arity";
    case Errc::missing_output: return "missing_output";
    case Errc::incomplete_valuation: return "incomplete_valuation";
    case Errc::sequential_circuit: return "sequential_circuit";
    case Errc::budget_exceeded: return "budget_exceeded";
    case Errc::interface_mismatch: return "interface_mismatch";
    case Errc::trace_mismatch: return "trace_mismatch";
    case Errc::epoch_mismatch: return "epoch_mismatch";
    case Errc::stimulus_underrun: return "stimulus_underrun";
    case Errc::io: return "io";
  }
  return "unknown";
}

namespace {

std::string decorate(const std::string& message, const std::optional<SourceLocation>& where) {
  if (!where) return message;
  return fmt::format("{}:{}: {}", where->line, where->column, message);
}

}  // namespace

Error::Error(Errc code, const std::string& message, std::optional<SourceLocation> where)
    : std::runtime_error(decorate(message, where)), code_(code), where_(where) {}

}  // namespace mvl
