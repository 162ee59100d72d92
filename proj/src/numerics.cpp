#include "netfactor/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>

namespace netfactor {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularSylvester: return "SingularSylvester";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::SingularTransformation: return "SingularTransformation";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::ImproperFraction: return "ImproperFraction";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::ShapeViolation: return "ShapeViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AssumptionViolation: return "AssumptionViolation";
    case ErrorCode::NonMinimalV: return "NonMinimalV";
    case ErrorCode::NotControllable: return "NotControllable";
    case ErrorCode::NotRelativeDegreeZero: return "NotRelativeDegreeZero";
    case ErrorCode::NoPositiveDefiniteR: return "NoPositiveDefiniteR";
    case ErrorCode::NoneMinimumPhase: return "NoneMinimumPhase";
    case ErrorCode::MultipleMinimumPhase: return "MultipleMinimumPhase";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::NonFiniteEntries: return "NonFiniteEntries";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

Tolerances default_tolerances() {
  Tolerances t;
  if (const char* env = std::getenv("NETFACTOR_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0) t.residual = v;
  }
  return t;
}

std::vector<double> FrequencyGrid::frequencies() const {
  std::vector<double> w;
  w.reserve(log_points + random_points);
  for (int i = 0; i < log_points; ++i) {
    double f = log_points > 1 ? static_cast<double>(i) / (log_points - 1) : 0.0;
    w.push_back(log_min * std::pow(log_max / log_min, f));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(std::log(random_min), std::log(random_max));
  for (int i = 0; i < random_points; ++i) w.push_back(std::exp(uni(rng)));
  return w;
}

void check_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteEntries, what + " contains NaN or Inf");
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "lyapunov coefficient must be square");
  require(q.rows() == q.cols() && q.rows() == a.rows(), ErrorCode::DimensionMismatch,
          "lyapunov forcing must match coefficient dimension");
  const auto n = a.rows();
  if (n == 0) return Matrix(0, 0);

  // Reduce a to upper-triangular complex Schur form a = U T U*.
  Eigen::ComplexSchur<Matrix> schur(a);
  require(schur.info() == Eigen::Success, ErrorCode::EigensolverFailure, "Schur reduction failed");
  const ComplexMatrix t = schur.matrixT();
  const ComplexMatrix u = schur.matrixU();

  // a X + X a^T + q = 0 becomes T Y + Y T^T + Q = 0 with Y = U* X conj(U),
  // Y complex symmetric. Row k of T only involves Y columns >= k, so solve
  // back to front:
  //   (T + T(k,k) I) Y(:,k) = -Q(:,k) - sum_{j>k} T(k,j) Y(:,j).
  ComplexMatrix qt = u.adjoint() * q.cast<Complex>() * u.conjugate();
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  const double scale = t.diagonal().cwiseAbs().maxCoeff() + 1.0;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    ComplexVector rhs = -qt.col(k);
    for (Eigen::Index j = k + 1; j < n; ++j) rhs -= t(k, j) * y.col(j);
    ComplexMatrix shifted = t;
    shifted.diagonal().array() += t(k, k);
    for (Eigen::Index i = 0; i < n; ++i)
      require(std::abs(shifted(i, i)) > 1e-12 * scale, ErrorCode::SingularSylvester,
              "eigenvalue pair sums to zero");
    y.col(k) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }

  Matrix x = (u * y * u.transpose()).real();
  return 0.5 * (x + x.transpose());
}

bool is_positive_definite(const Matrix& m, double tol) {
  require(m.rows() == m.cols(), ErrorCode::NonSquare, "positive definiteness needs a square matrix");
  if (m.rows() == 0) return true;
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  require(asym <= tol * (1.0 + m.cwiseAbs().maxCoeff()) * 1e3, ErrorCode::NotSymmetric,
          "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  require(eig.info() == Eigen::Success, ErrorCode::EigensolverFailure, "eigenvalue computation failed");
  return eig.eigenvalues().minCoeff() > tol;
}

double are_residual(const AreProblem& p, const Matrix& x) {
  Matrix r = x * p.a + p.a.transpose() * x + static_cast<double>(p.quadratic_sign) * x * p.g * x + p.q;
  return r.norm();
}

namespace {

// One eigenvalue cluster of the Hamiltonian with its Jordan chain prefix
// vectors. Complex pairs are kept once (positive imaginary part) and their
// basis contribution is realified as [Re v, Im v] column pairs.
struct Cluster {
  Complex lambda;
  int multiplicity = 0;
  bool complex_pair = false;
  Matrix real_chain;          // 2n x multiplicity when a real eigenvalue
  ComplexMatrix complex_chain;  // 2n x multiplicity when a complex pair
};

Matrix chain_columns(const Cluster& c, int take) {
  if (!c.complex_pair) return c.real_chain.leftCols(take);
  Matrix out(c.complex_chain.rows(), 2 * take);
  for (int j = 0; j < take; ++j) {
    out.col(2 * j) = c.complex_chain.col(j).real();
    out.col(2 * j + 1) = c.complex_chain.col(j).imag();
  }
  return out;
}

// Null vector then least-squares chain: (H - lambda I) v_{j+1} = v_j.
// Chain prefixes span the invariant subspace regardless of the particular
// least-squares representative, because the null direction only shifts
// v_{j+1} inside the prefix span.
Matrix real_jordan_chain(const Matrix& shifted, int length) {
  Eigen::BDCSVD<Matrix> svd(shifted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix chain(shifted.rows(), length);
  chain.col(0) = svd.matrixV().col(shifted.cols() - 1);
  if (length > 1) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(shifted);
    for (int j = 1; j < length; ++j) {
      chain.col(j) = cod.solve(chain.col(j - 1));
      double norm = chain.col(j).norm();
      if (norm > 1.0) chain.rightCols(length - j) /= norm;  // keep the chain well scaled
    }
  }
  return chain;
}

ComplexMatrix complex_jordan_chain(const ComplexMatrix& shifted, int length) {
  Eigen::BDCSVD<ComplexMatrix> svd(shifted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ComplexMatrix chain(shifted.rows(), length);
  chain.col(0) = svd.matrixV().col(shifted.cols() - 1);
  if (length > 1) {
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(shifted);
    for (int j = 1; j < length; ++j) {
      chain.col(j) = cod.solve(chain.col(j - 1));
      double norm = chain.col(j).norm();
      if (norm > 1.0) chain.rightCols(length - j) /= norm;
    }
  }
  return chain;
}

}  // namespace

int matrix_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  double cutoff = rel_tol * sv(0) * std::max(m.rows(), m.cols());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

AreSolutionSet enumerate_are_solutions(const AreProblem& p, double tol, int max_dim, Execution mode) {
  const int n = p.dim();
  require(n <= max_dim, ErrorCode::DimensionTooLarge,
          "ARE dimension " + std::to_string(n) + " exceeds limit " + std::to_string(max_dim));
  require(p.g.rows() == n && p.g.cols() == n && p.q.rows() == n && p.q.cols() == n,
          ErrorCode::DimensionMismatch, "ARE coefficient dimensions disagree");

  AreSolutionSet out;
  if (n == 0) {
    out.solutions.push_back(Matrix(0, 0));  // the empty problem has the empty solution
    return out;
  }

  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = p.a;
  h.topRightCorner(n, n) = static_cast<double>(p.quadratic_sign) * p.g;
  h.bottomLeftCorner(n, n) = -p.q;
  h.bottomRightCorner(n, n) = -p.a.transpose();

  Eigen::EigenSolver<Matrix> eig(h);
  require(eig.info() == Eigen::Success, ErrorCode::EigensolverFailure, "Hamiltonian eigensolver failed");
  ComplexVector lambdas = eig.eigenvalues();
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) out.hamiltonian_eigenvalues.push_back(lambdas(i));

  const double scale = lambdas.cwiseAbs().maxCoeff() + 1.0;
  const double cluster_tol = 1e-7 * scale;
  const double imag_tol = 1e-9 * scale;

  // Group numerically coincident eigenvalues; a complex pair is stored once.
  std::vector<Complex> centers;
  std::vector<int> mults;
  std::vector<bool> used(2 * n, false);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (used[i]) continue;
    Complex li = lambdas(i);
    if (li.imag() < -imag_tol) continue;  // handled through its conjugate
    int count = 1;
    used[i] = true;
    Complex sum = li;
    for (Eigen::Index j = i + 1; j < lambdas.size(); ++j) {
      if (used[j] || lambdas(j).imag() < -imag_tol) continue;
      if (std::abs(lambdas(j) - li) <= cluster_tol) {
        used[j] = true;
        sum += lambdas(j);
        ++count;
      }
    }
    centers.push_back(sum / static_cast<double>(count));
    mults.push_back(count);
  }

  std::vector<Cluster> clusters;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    Cluster cl;
    cl.lambda = centers[c];
    cl.multiplicity = mults[c];
    cl.complex_pair = centers[c].imag() > imag_tol;
    if (!cl.complex_pair) cl.lambda = Complex(centers[c].real(), 0.0);

    // Geometric multiplicity from the rank deficiency of H - lambda I.
    int gm;
    if (cl.complex_pair) {
      ComplexMatrix shifted = h.cast<Complex>();
      shifted.diagonal().array() -= cl.lambda;
      Eigen::BDCSVD<ComplexMatrix> svd(shifted);
      const auto& sv = svd.singularValues();
      double cutoff = std::max(1e-7 * scale, 1e-10 * sv(0) * 2 * n);
      gm = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff) ++gm;
      gm = std::max(gm, 1);
      cl.complex_chain = complex_jordan_chain(shifted, cl.multiplicity);
    } else {
      Matrix shifted = h;
      shifted.diagonal().array() -= cl.lambda.real();
      Eigen::BDCSVD<Matrix> svd(shifted);
      const auto& sv = svd.singularValues();
      double cutoff = std::max(1e-7 * scale, 1e-10 * sv(0) * 2 * n);
      gm = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff) ++gm;
      gm = std::max(gm, 1);
      cl.real_chain = real_jordan_chain(shifted, cl.multiplicity);
    }

    if (cl.multiplicity > 1 && gm > 1) {
      out.kind = SetKind::Continuum;
      return out;
    }
    clusters.push_back(std::move(cl));
  }

  // Depth-first enumeration of how many chain-prefix vectors each cluster
  // contributes; complex pairs contribute in steps of two real columns.
  std::vector<std::vector<int>> selections;
  std::vector<int> pick(clusters.size(), 0);
  const auto step = [&](const Cluster& c) { return c.complex_pair ? 2 : 1; };
  std::function<void(std::size_t, int)> dfs = [&](std::size_t idx, int remaining) {
    if (remaining == 0) {
      selections.emplace_back(pick.begin(), pick.begin() + idx);
      selections.back().resize(clusters.size(), 0);
      return;
    }
    if (idx == clusters.size()) return;
    const Cluster& c = clusters[idx];
    int max_take = std::min(c.multiplicity, remaining / step(c));
    for (int k = 0; k <= max_take; ++k) {
      pick[idx] = k;
      dfs(idx + 1, remaining - k * step(c));
    }
    pick[idx] = 0;
  };
  dfs(0, n);

  const double sv_ratio = 1e-8;  // V1 acceptance threshold
  std::vector<Matrix> found(selections.size());
  std::vector<char> ok(selections.size(), 0);

  const auto evaluate = [&](std::size_t s) {
    Matrix basis(2 * n, n);
    int col = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      int k = selections[s][c];
      if (k == 0) continue;
      Matrix cols = chain_columns(clusters[c], k);
      basis.middleCols(col, cols.cols()) = cols;
      col += static_cast<int>(cols.cols());
    }
    Matrix v1 = basis.topRows(n);
    Eigen::JacobiSVD<Matrix> svd(v1, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0 || sv(n - 1) <= sv_ratio * sv(0)) return;  // solution at infinity
    Matrix v2 = basis.bottomRows(n);
    // X = V2 V1^{-1} through the already computed SVD.
    Matrix x = v2 * (svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose());
    if (!x.allFinite()) return;
    double sym = (x - x.transpose()).norm();
    if (sym > 1e-6 * (1.0 + x.norm())) return;
    x = 0.5 * (x + x.transpose());
    if (are_residual(p, x) > tol * (1.0 + x.norm()) * (1.0 + x.norm())) return;
    found[s] = std::move(x);
    ok[s] = 1;
  };

  if (mode == Execution::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::size_t s = 0; s < selections.size(); ++s) evaluate(s);
  } else {
    for (std::size_t s = 0; s < selections.size(); ++s) evaluate(s);
  }

  for (std::size_t s = 0; s < selections.size(); ++s) {
    if (!ok[s]) continue;
    bool duplicate = false;
    for (const Matrix& x : out.solutions) {
      if ((x - found[s]).norm() <= 1e-6 * (1.0 + x.norm())) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.solutions.push_back(found[s]);
  }
  return out;
}

}  // namespace netfactor
