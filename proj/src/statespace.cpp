#include "netfactor/statespace.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "netfactor/dsf.hpp"
#include "netfactor/numerics.hpp"
#include "netfactor/rational.hpp"

namespace netfactor {

void check_dimensions(const StateSpace& sys) {
  const Eigen::Index n = sys.a.rows();
  require(sys.a.cols() == n, ErrorCode::DimensionMismatch, "state matrix not square");
  require(sys.b.rows() == n, ErrorCode::DimensionMismatch, "input matrix row count mismatch");
  require(sys.c.cols() == n, ErrorCode::DimensionMismatch, "output matrix column count mismatch");
  require(sys.d.rows() == sys.c.rows() && sys.d.cols() == sys.b.cols(), ErrorCode::DimensionMismatch,
          "feedthrough shape mismatch");
  check_finite(sys.a, "a");
  check_finite(sys.b, "b");
  check_finite(sys.c, "c");
  check_finite(sys.d, "d");
}

StateSpace PartitionedSystem::assemble() const {
  const Eigen::Index p = manifest(), l = latent(), m = inputs();
  StateSpace sys;
  sys.a.resize(p + l, p + l);
  sys.a << a11, a12, a21, a22;
  sys.b.resize(p + l, m);
  sys.b << b1, b2;
  sys.c = Matrix::Zero(p, p + l);
  sys.c.leftCols(p) = Matrix::Identity(p, p);
  sys.d = Matrix::Zero(p, m);
  return sys;
}

namespace {

bool output_shape_holds(const StateSpace& sys, double shape_tol) {
  const Eigen::Index p = sys.c.rows(), n = sys.a.rows();
  if (p > n) return false;
  Matrix expected = Matrix::Zero(p, n);
  expected.leftCols(p) = Matrix::Identity(p, p);
  double c_dev = (sys.c - expected).cwiseAbs().maxCoeff();
  double d_dev = sys.d.size() > 0 ? sys.d.cwiseAbs().maxCoeff() : 0.0;
  return c_dev <= shape_tol && d_dev <= shape_tol;
}

}  // namespace

PartitionedSystem partition(const StateSpace& sys, double shape_tol) {
  check_dimensions(sys);
  require(output_shape_holds(sys, shape_tol), ErrorCode::ShapeViolation,
          "output must read the leading states directly (c = [I 0], d = 0)");
  const Eigen::Index p = sys.c.rows();
  const Eigen::Index l = sys.a.rows() - p;
  const Eigen::Index m = sys.b.cols();
  PartitionedSystem part;
  part.a11 = sys.a.topLeftCorner(p, p);
  part.a12 = sys.a.topRightCorner(p, l);
  part.a21 = sys.a.bottomLeftCorner(l, p);
  part.a22 = sys.a.bottomRightCorner(l, l);
  part.b1 = sys.b.topRows(p);
  part.b2 = sys.b.bottomRows(l);
  (void)m;
  return part;
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows(), m = b.cols();
  Matrix ctrb(n, n * m);
  Matrix block = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * m, m) = block;
    if (k + 1 < n) block = a * block;
  }
  return ctrb;
}

Matrix observability_matrix(const Matrix& a, const Matrix& c) {
  const Eigen::Index n = a.rows(), p = c.rows();
  Matrix obsv(n * p, n);
  Matrix block = c;
  for (Eigen::Index k = 0; k < n; ++k) {
    obsv.middleRows(k * p, p) = block;
    if (k + 1 < n) block = block * a;
  }
  return obsv;
}

AssumptionReport validate_assumptions(const StateSpace& sys, const Tolerances& tol) {
  check_dimensions(sys);
  AssumptionReport report;
  const Eigen::Index n = sys.a.rows();

  if (n > 0) {
    Eigen::EigenSolver<Matrix> eig(sys.a);
    require(eig.info() == Eigen::Success, ErrorCode::EigensolverFailure, "state matrix eigensolver failed");
    report.hurwitz = true;
    for (Eigen::Index i = 0; i < n; ++i)
      if (eig.eigenvalues()(i).real() >= -tol.stability) report.hurwitz = false;
  } else {
    report.hurwitz = true;
  }

  report.minimal = matrix_rank(controllability_matrix(sys.a, sys.b), tol.rank) == n &&
                   matrix_rank(observability_matrix(sys.a, sys.c), tol.rank) == n;

  report.c_is_identity_zero = output_shape_holds({sys.a, sys.b, sys.c, Matrix::Zero(sys.c.rows(), sys.b.cols())},
                                                 tol.residual);
  report.d_is_zero = sys.d.size() == 0 || sys.d.cwiseAbs().maxCoeff() <= tol.residual;

  if (report.c_is_identity_zero && report.d_is_zero) {
    report.p_diagonal = is_v_diagonal(partition(sys, tol.residual), 1e-7);
  }
  return report;
}

StateSpace apply_transformation(const StateSpace& sys, const Matrix& t, const Tolerances& tol) {
  check_dimensions(sys);
  const Eigen::Index n = sys.a.rows();
  require(t.rows() == n && t.cols() == n, ErrorCode::DimensionMismatch, "transformation shape mismatch");
  if (n == 0) return sys;
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  require(sv(n - 1) > tol.rank * sv(0) * static_cast<double>(n), ErrorCode::SingularTransformation,
          "transformation is numerically singular");
  Matrix tinv = svd.solve(Matrix::Identity(n, n));
  StateSpace out;
  out.a = t * sys.a * tinv;
  out.b = t * sys.b;
  out.c = sys.c * tinv;
  out.d = sys.d;
  return out;
}

ComplexMatrix frequency_response(const StateSpace& sys, Complex s, const Tolerances& tol) {
  const Eigen::Index n = sys.a.rows();
  ComplexMatrix shifted = s * ComplexMatrix::Identity(n, n) - sys.a.cast<Complex>();
  Eigen::FullPivLU<ComplexMatrix> lu(shifted);
  if (n > 0) {
    double pivot_scale = std::abs(lu.matrixLU()(0, 0));
    double pivot_min = std::abs(lu.matrixLU()(n - 1, n - 1));
    require(pivot_min > 1e-13 * (pivot_scale + std::abs(s) + 1.0), ErrorCode::PoleHit,
            "evaluation point coincides with a pole");
  }
  (void)tol;
  return sys.c.cast<Complex>() * lu.solve(sys.b.cast<Complex>()) + sys.d.cast<Complex>();
}

std::vector<Complex> transmission_zeros(const StateSpace& sys, const Tolerances& tol) {
  check_dimensions(sys);
  const Eigen::Index n = sys.a.rows(), p = sys.c.rows(), m = sys.b.cols();
  require(p == m, ErrorCode::NonSquare, "transmission zeros need a square transfer matrix");
  Matrix pencil_m(n + p, n + m);
  pencil_m << sys.a, sys.b, sys.c, sys.d;
  Matrix pencil_n = Matrix::Zero(n + p, n + m);
  pencil_n.topLeftCorner(n, n) = Matrix::Identity(n, n);

  Eigen::GeneralizedEigenSolver<Matrix> ges(pencil_m, pencil_n, true);
  require(ges.info() == Eigen::Success, ErrorCode::EigensolverFailure, "pencil eigensolver failed");
  std::vector<Complex> zeros;
  for (Eigen::Index i = 0; i < ges.alphas().size(); ++i) {
    Complex alpha = ges.alphas()(i);
    double beta = ges.betas()(i);
    if (std::abs(beta) * tol.infinite_eigenvalue <= std::abs(alpha)) continue;
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) continue;
    zeros.push_back(alpha / beta);
  }
  return zeros;
}

bool is_minimum_phase(const StateSpace& sys, double tol, const Tolerances& num_tol) {
  for (const Complex& z : transmission_zeros(sys, num_tol))
    if (z.real() >= tol) return false;
  return true;
}

SisoRealization realize_siso_controllable(const Vector& num_in, const Vector& den_in, double coprime_tol) {
  Vector num = poly_trim(num_in);
  Vector den = poly_trim(den_in);
  require(den.cwiseAbs().maxCoeff() > 0, ErrorCode::ImproperFraction, "zero denominator");
  const Eigen::Index r = den.size() - 1;
  require(num.size() <= r, ErrorCode::ImproperFraction,
          "numerator degree must be below denominator degree");
  require(normalized_resultant(num, den) > coprime_tol, ErrorCode::NotCoprime,
          "numerator and denominator share a root");
  const double lead = den(0);
  den /= lead;
  num /= lead;

  SisoRealization out;
  out.r = static_cast<int>(r);
  out.alpha = Matrix::Zero(r, r);
  for (Eigen::Index i = 0; i + 1 < r; ++i) out.alpha(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < r; ++j) out.alpha(r - 1, j) = -den(r - j);
  out.beta = Vector::Zero(r);
  if (r > 0) out.beta(r - 1) = 1.0;
  out.gamma = RowVector::Zero(r);
  for (Eigen::Index i = 0; i < num.size(); ++i) out.gamma(num.size() - 1 - i) = num(i);
  return out;
}

}  // namespace netfactor
