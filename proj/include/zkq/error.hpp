#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zkq {

enum class ErrorCode {
  DimensionMismatch,
  NotSquare,
  NotHermitian,
  NotPSD,
  InvalidState,
  NotUnitVector,
  NotSubNormalized,
  AllBranchesNull,
  InvalidInstrument,
  InvalidMessage,
  ParseError,
  Degenerate,
  NotClassical,
  EmptyComplement,
  GenerationFailed,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code next to the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zkq
