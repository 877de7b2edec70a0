#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blochwp {

enum class ErrorCode {
  InvalidArgument,
  ZoneBoundaryExcluded,
  TruncationTooSmall,
  NumericalFailure,
  DegenerateBands,
  BandOverlap,
  SupportViolation,
  FoldingSeam,
  WrongOperation,
  WindowDeficit,
  NyquistViolation,
  ConfigError,
  InvariantViolation,
};

/// Stable kebab-case name, used in diagnostics and CLI output.
constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::ZoneBoundaryExcluded: return "zone-boundary-excluded";
    case ErrorCode::TruncationTooSmall: return "truncation-too-small";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::DegenerateBands: return "degenerate-bands";
    case ErrorCode::BandOverlap: return "band-overlap";
    case ErrorCode::SupportViolation: return "support-violation";
    case ErrorCode::FoldingSeam: return "folding-seam";
    case ErrorCode::WrongOperation: return "wrong-operation";
    case ErrorCode::WindowDeficit: return "window-deficit";
    case ErrorCode::NyquistViolation: return "nyquist-violation";
    case ErrorCode::ConfigError: return "config-error";
    case ErrorCode::InvariantViolation: return "invariant-violation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace blochwp
