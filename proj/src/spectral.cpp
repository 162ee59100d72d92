#include "netfactor/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <exception>
#include <vector>

#include "netfactor/numerics.hpp"

namespace netfactor {

ComplexMatrix SpectralDensity::at(double omega) const {
  ComplexMatrix g = frequency_response(generator, Complex(0.0, omega));
  return g * g.adjoint();
}

ComplexMatrix PositiveRealSystem::at(double omega) const {
  return frequency_response(sys, Complex(0.0, omega));
}

SpectralDensity spectral_density_of(const StateSpace& sys) {
  check_dimensions(sys);
  require(sys.order() > 0, ErrorCode::Unstable,
          "gain-only generator has no stable state; model the gain with a fast pole");
  const Tolerances tol = default_tolerances();
  Eigen::EigenSolver<Matrix> eig(sys.a);
  require(eig.info() == Eigen::Success, ErrorCode::EigensolverFailure,
          "eigenvalue computation failed on the generator state matrix");
  for (Eigen::Index i = 0; i < sys.a.rows(); ++i)
    require(eig.eigenvalues()(i).real() < -tol.stability, ErrorCode::Unstable,
            "spectral density generator must be Hurwitz");
  SpectralDensity phi;
  phi.generator = sys;
  phi.p_count = static_cast<int>(sys.outputs());
  return phi;
}

PositiveRealSystem positive_real_realization(const StateSpace& sys) {
  check_dimensions(sys);
  // a r + r a^T + b b^T = 0 gives the controllability gramian.
  Matrix r_c = solve_lyapunov(sys.a, sys.b * sys.b.transpose());
  PositiveRealSystem z;
  z.sys.a = sys.a;
  z.sys.b = r_c * sys.c.transpose();
  z.sys.c = sys.c;
  z.sys.d = Matrix::Zero(sys.outputs(), sys.outputs());
  return z;
}

bool phi_equal(const StateSpace& s1, const StateSpace& s2, const FrequencyGrid& grid,
               double tol, Execution mode) {
  check_dimensions(s1);
  check_dimensions(s2);
  require(s1.outputs() == s2.outputs(), ErrorCode::DimensionMismatch,
          "spectral densities have different output counts");

  const std::vector<double> omegas = grid.frequencies();
  const int count = static_cast<int>(omegas.size());
  std::vector<char> ok(count, 1);
  std::vector<std::exception_ptr> errors(count);

  auto evaluate = [&](int k) {
    try {
      Complex s(0.0, omegas[k]);
      ComplexMatrix g1 = frequency_response(s1, s);
      ComplexMatrix g2 = frequency_response(s2, s);
      ComplexMatrix phi1 = g1 * g1.adjoint();
      ComplexMatrix phi2 = g2 * g2.adjoint();
      ok[k] = (phi1 - phi2).norm() <= tol * (1.0 + phi1.norm()) ? 1 : 0;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  if (mode == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) evaluate(k);
  } else {
    for (int k = 0; k < count; ++k) evaluate(k);
  }

  for (int k = 0; k < count; ++k)
    if (errors[k]) std::rethrow_exception(errors[k]);
  return std::all_of(ok.begin(), ok.end(), [](char flag) { return flag != 0; });
}

double ResidualReport::worst() const {
  double w = 0.0;
  for (const auto& entry : entries) w = std::max(w, entry.second);
  return w;
}

double ResidualReport::value(const std::string& name) const {
  for (const auto& entry : entries)
    if (entry.first == name) return entry.second;
  throw Error(ErrorCode::DimensionMismatch, "no residual named " + name);
}

ResidualReport verify_glover_willems(const StateSpace& sys, const StateSpace& sys2,
                                     const Matrix& s, const Matrix& t, double tol) {
  check_dimensions(sys);
  check_dimensions(sys2);
  const Eigen::Index n = sys.order();
  require(sys2.order() == n && sys.outputs() == sys2.outputs(),
          ErrorCode::DimensionMismatch, "systems must share state and output dimensions");
  require(s.rows() == n && s.cols() == n, ErrorCode::DimensionMismatch,
          "s must be n x n");
  require(t.rows() == n && t.cols() == n, ErrorCode::DimensionMismatch,
          "t must be n x n");
  check_finite(s, "s");
  check_finite(t, "t");

  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  require(n == 0 || sv(n - 1) > default_tolerances().rank * sv(0) * static_cast<double>(n),
          ErrorCode::SingularTransformation, "basis change matrix is singular");
  Matrix tinv = svd.solve(Matrix::Identity(n, n));

  ResidualReport report;
  report.tol = tol;
  report.entries.emplace_back("state", (sys2.a - tinv * sys.a * t).norm());
  report.entries.emplace_back("output", (sys2.c - sys.c * t).norm());
  report.entries.emplace_back(
      "covariance", (s * sys.a.transpose() + sys.a * s + sys.b * sys.b.transpose() -
                     t * sys2.b * sys2.b.transpose() * t.transpose())
                        .norm());
  report.entries.emplace_back(
      "cross", (s * sys.c.transpose() + sys.b * sys.d.transpose() -
                t * sys2.b * sys2.d.transpose())
                   .norm());
  report.entries.emplace_back(
      "feedthrough", (sys.d * sys.d.transpose() - sys2.d * sys2.d.transpose()).norm());
  report.pass = report.worst() <= tol;
  return report;
}

}  // namespace netfactor
