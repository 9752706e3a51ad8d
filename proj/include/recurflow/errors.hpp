#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace recurflow {

// Base class for all library errors so callers can catch one type at the CLI
// boundary and map it to a process exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Kernel has no gamma-dependent terms, so there is no characteristic equation.
class DegenerateKernel : public Error {
 public:
  explicit DegenerateKernel(const std::string& what) : Error(what) {}
};

// Root iteration failed to converge within the iteration cap, or a computed
// root does not satisfy the characteristic equation to the requested residual.
class RootFindingFailure : public Error {
 public:
  explicit RootFindingFailure(const std::string& what) : Error(what) {}
};

// Some c_p <= 0, so the positive normalizer a_p = c_p^(-1/p) is undefined.
class SignDegeneracy : public Error {
 public:
  SignDegeneracy(const std::string& what, std::int64_t offending_p)
      : Error(what), p(offending_p) {}
  std::int64_t p;
};

// Trace horizon too short for the requested analysis.
class InsufficientHorizon : public Error {
 public:
  explicit InsufficientHorizon(const std::string& what) : Error(what) {}
};

// x = 0 passed where a nonzero evaluation point is required.
class ZeroInput : public Error {
 public:
  explicit ZeroInput(const std::string& what) : Error(what) {}
};

class DivideByZero : public Error {
 public:
  explicit DivideByZero(const std::string& what) : Error(what) {}
};

// A matrix entry or norm input is NaN/Inf.
class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& what) : Error(what) {}
};

// A running matrix-product norm exceeded the configured cap, signalling that
// the kernel violates the boundedness hypotheses.
class NormBlowup : public Error {
 public:
  NormBlowup(const std::string& what, std::int64_t at_p, double norm)
      : Error(what), p(at_p), norm_value(norm) {}
  std::int64_t p;
  double norm_value;
};

// Too few usable points for a decay fit.
class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what) : Error(what) {}
};

// A hypothesis of a quantitative bound does not hold on the given trace.
class HypothesisViolated : public Error {
 public:
  explicit HypothesisViolated(const std::string& what) : Error(what) {}
};

// Malformed CLI/config input.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace recurflow
