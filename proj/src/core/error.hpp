#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ellab {

/// Stable error taxonomy shared by the C++ core and the C API layer.
enum class ErrorCode {
  InvalidArgument = 1,
  EllipticityViolation = 2,
  ConvergenceFailure = 3,
  TooCoarse = 4,
  DomainMargin = 5,
  NoExterior = 6,
  StoppingFailure = 7,
  IoError = 8,
  Internal = 9,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Ellipticity failure carries the offending node and the worst margin so a
/// caller can report where a coefficient field leaves the admissible class.
class EllipticityError : public Error {
 public:
  EllipticityError(std::string message, long node, double margin)
      : Error(ErrorCode::EllipticityViolation, std::move(message)),
        node_(node),
        margin_(margin) {}

  long node() const noexcept { return node_; }
  double margin() const noexcept { return margin_; }

 private:
  long node_;
  double margin_;
};

/// Krylov failure keeps the relative residuals of each attempted solve.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string message, std::vector<double> residuals)
      : Error(ErrorCode::ConvergenceFailure, std::move(message)),
        residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Stopping-time failure carries the probed (threshold, measure) curve.
class StoppingError : public Error {
 public:
  StoppingError(std::string message,
                std::vector<std::pair<double, double>> curve)
      : Error(ErrorCode::StoppingFailure, std::move(message)),
        curve_(std::move(curve)) {}

  const std::vector<std::pair<double, double>>& curve() const noexcept {
    return curve_;
  }

 private:
  std::vector<std::pair<double, double>> curve_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) fail(code, message);
}

}  // namespace ellab
