#pragma once

#include <cstdio>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <string_view>

namespace srgeo {

enum class ErrorCode {
  // Input validation.
  PreconditionViolated,
  OutOfRange,
  NotAreaPreserving,
  // Numerical failures.
  NotInSubgroup,
  ParabolicGenerator,
  Divergence,
  StepSizeUnderflow,
  InvariantDrift,
  QuadratureMismatch,
  NoPeriodicOrbit,
  UnwrapAmbiguity,
  UnresolvedRoot,
  ClosureFailure,
  UndersampledPath,
  NotClosed,
  NewtonDivergence,
  InvalidModel,
  IllConditionedFit,
  NoSignChange,
  DegenerateNormalDirection,
  SingularDifferential,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotAreaPreserving: return "NotAreaPreserving";
    case ErrorCode::NotInSubgroup: return "NotInSubgroup";
    case ErrorCode::ParabolicGenerator: return "ParabolicGenerator";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::InvariantDrift: return "InvariantDrift";
    case ErrorCode::QuadratureMismatch: return "QuadratureMismatch";
    case ErrorCode::NoPeriodicOrbit: return "NoPeriodicOrbit";
    case ErrorCode::UnwrapAmbiguity: return "UnwrapAmbiguity";
    case ErrorCode::UnresolvedRoot: return "UnresolvedRoot";
    case ErrorCode::ClosureFailure: return "ClosureFailure";
    case ErrorCode::UndersampledPath: return "UndersampledPath";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::DegenerateNormalDirection: return "DegenerateNormalDirection";
    case ErrorCode::SingularDifferential: return "SingularDifferential";
  }
  return "Unknown";
}

/// Validation errors are caller mistakes; everything else is a numerical
/// failure of an otherwise well-posed request.
constexpr bool is_validation(ErrorCode code) {
  return code == ErrorCode::PreconditionViolated ||
         code == ErrorCode::OutOfRange ||
         code == ErrorCode::NotAreaPreserving;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

/// Number formatting for error messages: integers exactly, reals with six
/// significant digits.
template <typename T>
std::string num_str(T v) {
  if constexpr (std::is_integral_v<T>) {
    return std::to_string(v);
  } else {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", static_cast<double>(v));
    return buf;
  }
}

}  // namespace srgeo
