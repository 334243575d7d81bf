#pragma once

#include <stdexcept>
#include <string>

namespace sbpsat {

struct UnsupportedOrder : std::runtime_error {
  explicit UnsupportedOrder(int order)
      : std::runtime_error("unsupported operator order " + std::to_string(order)) {}
};

struct GridTooSmall : std::runtime_error {
  GridTooSmall(int n, int need)
      : std::runtime_error("grid has " + std::to_string(n) + " points, need at least " +
                           std::to_string(need)) {}
};

struct CoefficientValidationFailed : std::runtime_error {
  CoefficientValidationFailed(const std::string& which, double residual)
      : std::runtime_error("coefficient data violates invariant '" + which +
                           "' (residual " + std::to_string(residual) + ")") {}
};

struct LengthMismatch : std::runtime_error {
  LengthMismatch(long got, long want)
      : std::runtime_error("length mismatch: got " + std::to_string(got) + ", expected " +
                           std::to_string(want)) {}
};

struct SizeMismatch : std::runtime_error {
  explicit SizeMismatch(const std::string& what) : std::runtime_error("size mismatch: " + what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error("parse error: " + what) {}
};

struct CompatibilityViolation : std::runtime_error {
  explicit CompatibilityViolation(double residual)
      : std::runtime_error("norm-compatibility residual " + std::to_string(residual) +
                           " above tolerance; operator pair rejected") {}
};

struct ConstraintSystemInfeasible : std::runtime_error {
  explicit ConstraintSystemInfeasible(const std::string& what)
      : std::runtime_error("constraint system infeasible: " + what) {}
};

struct SymmetryViolation : std::runtime_error {
  explicit SymmetryViolation(double residual)
      : std::runtime_error("matrix expected symmetric, residual " + std::to_string(residual)) {}
};

struct EndpointMismatch : std::runtime_error {
  EndpointMismatch()
      : std::runtime_error("trace grids do not share endpoints") {}
};

struct NonpositiveInput : std::runtime_error {
  explicit NonpositiveInput(const std::string& name)
      : std::runtime_error("argument '" + name + "' must be positive") {}
};

struct PenaltyBelowBound : std::runtime_error {
  PenaltyBelowBound(double tau, double bound)
      : std::runtime_error("penalty tau=" + std::to_string(tau) +
                           " below stability bound " + std::to_string(bound)) {}
};

struct CoverageGap : std::runtime_error {
  explicit CoverageGap(const std::string& what)
      : std::runtime_error("interface segment without operators: " + what) {}
};

struct SystemTooLarge : std::runtime_error {
  SystemTooLarge(long n, long limit)
      : std::runtime_error("system size " + std::to_string(n) +
                           " exceeds dense-eigensolve guard " + std::to_string(limit)) {}
};

struct InsufficientLevels : std::runtime_error {
  InsufficientLevels() : std::runtime_error("need at least two refinement levels") {}
};

struct BlowupDetected : std::runtime_error {
  explicit BlowupDetected(double t)
      : std::runtime_error("solution magnitude guard exceeded at t=" + std::to_string(t)) {}
};

struct ParameterOutOfRange : std::runtime_error {
  explicit ParameterOutOfRange(const std::string& name)
      : std::runtime_error("parameter '" + name + "' out of range") {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}
};

}  // namespace sbpsat
