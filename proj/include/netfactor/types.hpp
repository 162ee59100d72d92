#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace netfactor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

enum class ErrorCode {
  SingularSylvester,
  NotSymmetric,
  DimensionTooLarge,
  EigensolverFailure,
  SingularTransformation,
  PoleHit,
  NonSquare,
  ImproperFraction,
  NotCoprime,
  ShapeViolation,
  DimensionMismatch,
  AssumptionViolation,
  NonMinimalV,
  NotControllable,
  NotRelativeDegreeZero,
  NoPositiveDefiniteR,
  NoneMinimumPhase,
  MultipleMinimumPhase,
  EmptyDomain,
  GenerationExhausted,
  Unstable,
  NonFiniteEntries,
  ParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Every numeric knob in one place so callers can inject alternatives.
struct Tolerances {
  // Generic residual bound, scaled by problem size where noted.
  double residual = 1e-8;
  // Relative rank threshold factor: sigma > rank * sigma_max * max(rows, cols).
  double rank = 1e-9;
  // Positive definiteness: smallest eigenvalue must exceed this.
  double pd = 1e-9;
  // Solution deduplication: ||X - X'||_F <= dedup * (1 + ||X||_F).
  double dedup = 1e-6;
  // Invariant-subspace basis acceptance: sigma_min > subspace * sigma_max.
  double subspace = 1e-8;
  // Generalized eigenvalues with magnitude above this count as infinite.
  double infinite_eigenvalue = 1e8;
  // Margin used when rejecting non-Hurwitz matrices.
  double stability = 0.0;
};

// Process-wide defaults; the residual field honours NETFACTOR_TOL when set.
Tolerances default_tolerances();

// Frequency grid for spectral comparisons: log-spaced core plus a few
// seeded random points to guard against adversarial pole placement.
struct FrequencyGrid {
  int log_points = 50;
  double log_min = 1e-2;
  double log_max = 1e2;
  int random_points = 10;
  double random_min = 1e-3;
  double random_max = 1e3;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;

  std::vector<double> frequencies() const;
};

enum class Execution { Serial, Parallel };

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

// Guard against NaN/Inf leaking into value types.
void check_finite(const Matrix& m, const std::string& what);

}  // namespace netfactor
