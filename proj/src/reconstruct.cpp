#include "netfactor/reconstruct.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace netfactor {

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

// Deterministic ordering of symmetric candidates: trace first, then
// lexicographic on entries.
bool matrix_order(const Matrix& a, const Matrix& b) {
  double ta = a.trace();
  double tb = b.trace();
  double eps = 1e-10 * (1.0 + std::abs(ta) + std::abs(tb));
  if (std::abs(ta - tb) > eps) return ta < tb;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      double d = a(i, j) - b(i, j);
      if (std::abs(d) > 1e-10 * (1.0 + std::abs(a(i, j)) + std::abs(b(i, j)))) return d < 0.0;
    }
  }
  return false;
}

Matrix diagonal_inverse(const Matrix& d, int power) {
  Matrix out = Matrix::Zero(d.rows(), d.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i) out(i, i) = 1.0 / std::pow(d(i, i), power);
  return out;
}

// Least-squares residual for the diagonalizing search over the remaining
// basis freedom: an orthogonal mix t1 of the driven latent columns
// (Cayley-parameterized within one sign component) and the unconstrained
// columns z of the latent shear. The residuals are the off-diagonal
// Markov parameters of the candidate noise filter plus a small
// regularization that keeps the parameterization away from the Cayley
// singularity.
struct NoiseFilterResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Vector;
  using ValueType = Vector;
  using JacobianType = Matrix;

  const Matrix* a12 = nullptr;       // p x l
  const Matrix* a22 = nullptr;       // l x l
  const Matrix* w0 = nullptr;        // l x q driven columns before mixing
  const Matrix* t1_pinned = nullptr; // l x p with the forced columns filled
  Vector component;                  // q diagonal signs selecting the O(q) sheet
  int p = 0;
  int l = 0;
  int q = 0;
  double mu = 1e-10;

  int rotation_params() const { return q * (q - 1) / 2; }
  int inputs() const { return rotation_params() + l * q; }
  int values() const { return l * (p - 1) * q + inputs(); }

  Matrix rotation(const Vector& x) const {
    Matrix y = Matrix::Zero(q, q);
    int idx = 0;
    for (int i = 0; i < q; ++i) {
      for (int j = i + 1; j < q; ++j) {
        y(i, j) = x(idx);
        y(j, i) = -x(idx);
        ++idx;
      }
    }
    Matrix eye = Matrix::Identity(q, q);
    Matrix rot = (eye - y) * (eye + y).inverse();
    return rot * component.asDiagonal();
  }

  Matrix shear_columns(const Vector& x) const {
    Matrix z(l, q);
    int base = rotation_params();
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < l; ++i) z(i, j) = x(base + j * l + i);
    return z;
  }

  int operator()(const Vector& x, Vector& fvec) const {
    Matrix t1 = *t1_pinned;
    t1.leftCols(q) = shear_columns(x);
    Matrix atil = *a22 - t1 * (*a12);
    Matrix cur = (*w0) * rotation(x);
    int out = 0;
    for (int k = 0; k < l; ++k) {
      Matrix mk = (*a12) * cur;
      for (int j = 0; j < q; ++j)
        for (int i = 0; i < p; ++i)
          if (i != j) fvec(out++) = mk(i, j);
      cur = atil * cur;
    }
    for (int i = 0; i < x.size(); ++i) fvec(out++) = mu * x(i);
    return 0;
  }

  double off_diagonal(const Vector& x) const {
    Vector fvec(values());
    (*this)(x, fvec);
    int rows = l * (p - 1) * q;
    double worst = 0.0;
    for (int i = 0; i < rows; ++i) worst = std::max(worst, std::abs(fvec(i)));
    return worst;
  }
};

struct DiagonalSearchResult {
  Matrix t1rot;   // q x q orthogonal mix
  Matrix t1free;  // l x q shear columns
  double off_diagonal = 0.0;
};

// Runs the restarted Levenberg-Marquardt search; returns the best basis
// freedom found together with its worst off-diagonal Markov parameter.
DiagonalSearchResult run_diagonal_search(const Matrix& a12, const Matrix& a22, const Matrix& w0,
                                         const Matrix& t1_pinned, int p, int l, int q,
                                         int restarts) {
  NoiseFilterResidual functor;
  functor.a12 = &a12;
  functor.a22 = &a22;
  functor.w0 = &w0;
  functor.t1_pinned = &t1_pinned;
  functor.component = Vector::Ones(q);
  functor.p = p;
  functor.l = l;
  functor.q = q;

  double scale = 1.0 + a12.cwiseAbs().maxCoeff() + a22.cwiseAbs().maxCoeff() +
                 w0.cwiseAbs().maxCoeff();

  DiagonalSearchResult best;
  best.off_diagonal = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 0.5);
  std::uniform_int_distribution<int> coin(0, 1);

  for (int restart = 0; restart < restarts; ++restart) {
    Vector component = Vector::Ones(q);
    Vector x0 = Vector::Zero(functor.inputs());
    if (restart > 0) {
      for (int i = 0; i < q; ++i) component(i) = coin(rng) == 0 ? 1.0 : -1.0;
      for (int i = 0; i < x0.size(); ++i) x0(i) = gauss(rng);
    }
    functor.component = component;

    Vector x = x0;
    Eigen::NumericalDiff<NoiseFilterResidual> ndiff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<NoiseFilterResidual>, double> lm(ndiff);
    lm.parameters.maxfev = 200 * (functor.inputs() + 1);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.minimize(x);

    double off = functor.off_diagonal(x);
    if (off < best.off_diagonal) {
      best.off_diagonal = off;
      best.t1rot = functor.rotation(x);
      best.t1free = functor.shear_columns(x);
    }
    if (best.off_diagonal <= 1e-10 * scale) break;
  }
  return best;
}

// Per-channel sign of the first significant Markov parameter of V(i,i):
// B1(i,i), then A12 A22^k B2 column i.
Matrix leading_sign_flips(const PartitionedSystem& pa, double rel_tol) {
  int p = static_cast<int>(pa.manifest());
  int l = static_cast<int>(pa.latent());
  std::vector<double> leading(static_cast<std::size_t>(p), 0.0);
  std::vector<Matrix> markov;
  markov.reserve(static_cast<std::size_t>(l) + 1);
  markov.push_back(pa.b1);
  Matrix left = pa.a12;
  for (int k = 0; k < l; ++k) {
    markov.push_back(left * pa.b2);
    left = left * pa.a22;
  }
  double scale = 0.0;
  for (const Matrix& m : markov)
    if (m.size() > 0) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  double cut = rel_tol * (1.0 + scale);
  Matrix j = Matrix::Identity(p, p);
  for (int i = 0; i < p; ++i) {
    for (const Matrix& m : markov) {
      if (std::abs(m(i, i)) > cut) {
        if (m(i, i) < 0.0) j(i, i) = -1.0;
        break;
      }
    }
  }
  return j;
}

// Absolute verification tolerance for a certificate: the relations mix
// one power of the dynamics with squared noise gains.
double certificate_scale(const StateSpace& ref, const Matrix& s, double residual_tol) {
  return residual_tol *
         (1.0 + ref.a.norm() * (1.0 + s.norm()) + ref.b.norm() * ref.b.norm());
}

void require_full_noise_shape(const StateSpace& sys, const Tolerances& tol,
                              const char* which) {
  std::string label(which);
  require(sys.inputs() == sys.order(), ErrorCode::AssumptionViolation,
          label + ": every state must carry its own noise channel (square b)");
  int n = static_cast<int>(sys.order());
  int p = static_cast<int>(sys.outputs());
  int l = n - p;
  double scale = 1.0 + sys.b.cwiseAbs().maxCoeff();
  double cut = tol.residual * scale;
  require(sys.b.topRightCorner(p, l).norm() <= cut &&
              sys.b.bottomLeftCorner(l, p).norm() <= cut,
          ErrorCode::AssumptionViolation,
          label + ": noise gain must be block diagonal across manifest/latent states");
  Matrix b11 = sys.b.topLeftCorner(p, p);
  Matrix b22 = sys.b.bottomRightCorner(l, l);
  Matrix off1 = b11 - Matrix(b11.diagonal().asDiagonal());
  Matrix off2 = b22 - Matrix(b22.diagonal().asDiagonal());
  require(off1.norm() <= cut && off2.norm() <= cut, ErrorCode::AssumptionViolation,
          label + ": noise gain blocks must be diagonal");
  for (int i = 0; i < p; ++i)
    require(std::abs(b11(i, i)) > tol.rank * scale * n, ErrorCode::AssumptionViolation,
            label + ": manifest noise gains must be nonzero");
  for (int i = 0; i < l; ++i)
    require(std::abs(b22(i, i)) > tol.rank * scale * n, ErrorCode::AssumptionViolation,
            label + ": latent noise gains must be nonzero");
}

void snap_output_shape(StateSpace& sys) {
  int n = static_cast<int>(sys.order());
  int p = static_cast<int>(sys.outputs());
  sys.c = Matrix::Zero(p, n);
  sys.c.leftCols(p) = Matrix::Identity(p, p);
  sys.d = Matrix::Zero(p, sys.inputs());
}

}  // namespace

AreProblem equivalence_riccati(const PDiagForm2& f2) {
  int l2 = f2.l2;
  AreProblem prob;
  prob.quadratic_sign = -1;
  prob.a = f2.alpha44().transpose();
  Matrix bbar = Matrix::Zero(l2, f2.p3 + f2.p1 + f2.p2 + f2.p1);
  if (l2 > 0) {
    int col = 0;
    if (f2.p3 > 0)
      bbar.block(0, col, l2, f2.p3) =
          f2.gamma34().transpose() * diagonal_inverse(f2.b22(), 1);
    col += f2.p3;
    if (f2.p1 > 0) bbar.block(0, col, l2, f2.p1) = f2.alpha14().transpose();
    col += f2.p1;
    if (f2.p2 > 0) bbar.block(0, col, l2, f2.p2) = f2.alpha24().transpose();
    col += f2.p2;
    if (f2.p1 > 0) bbar.block(0, col, l2, f2.p1) = f2.alpha34().transpose();
  }
  prob.g = bbar * bbar.transpose();
  prob.q = Matrix::Zero(l2, l2);
  if (l2 > 0) {
    Tolerances tol = default_tolerances();
    require(matrix_rank(controllability_matrix(prob.a, bbar), tol.rank) == l2,
            ErrorCode::NotControllable,
            "quadratic data is uncontrollable; the underlying realization is not minimal");
  }
  return prob;
}

NetworkSolutionSet enumerate_equivalent_networks(const StateSpace& sys, const Tolerances& tol) {
  AssumptionReport report = validate_assumptions(sys, tol);
  require(report.all(), ErrorCode::AssumptionViolation,
          "system must be stable, minimal, with c = [I 0], d = 0 and diagonal noise filter");

  PDiagForm2 f2 = to_pdiag_form2(sys, tol);
  const PartitionedSystem& pa = f2.sys;
  int p = static_cast<int>(pa.manifest());
  int l = static_cast<int>(pa.latent());
  int n = p + l;
  int p1 = f2.p1;
  int p2 = f2.p2;
  int p3 = f2.p3;
  int l2 = f2.l2;
  int q = p1 + p2;

  NetworkSolutionSet set;
  set.reference = pa.assemble();
  set.order = f2.order;

  const StateSpace& ref = set.reference;
  FrequencyGrid grid;

  // Emits the candidate built from one quadratic-equation solution s22 and
  // the basis freedom (t1rot, t1free); returns false when it duplicates an
  // already emitted structure function.
  auto emit = [&](const Matrix& s22, const Matrix& t1rot, const Matrix& t1free,
                  double off_diag) {
    Matrix t1 = Matrix::Zero(l, p);
    if (q > 0) t1.leftCols(q) = t1free;
    if (l2 > 0 && p3 > 0)
      t1.block(2 * p1 + p2, q, l2, p3) =
          s22 * f2.gamma34().transpose() * diagonal_inverse(f2.b22(), 2);

    Matrix t2 = Matrix::Identity(l, l);
    if (q > 0) {
      Matrix w0 = Matrix::Zero(l, q);
      w0.topRows(q) = Matrix::Identity(q, q);
      if (l2 > 0) {
        if (p1 > 0) w0.block(q + p1, 0, l2, p1) = s22 * f2.alpha14().transpose();
        if (p2 > 0) w0.block(q + p1, p1, l2, p2) = s22 * f2.alpha24().transpose();
      }
      t2.leftCols(q) = w0 * t1rot;
    }

    Matrix t = Matrix::Identity(n, n);
    t.block(p, 0, l, p) = t1;
    t.block(p, p, l, l) = t2;

    Eigen::PartialPivLU<Matrix> lu(t);
    StateSpace cand;
    cand.a = lu.solve(ref.a * t);
    cand.b = ref.b;
    cand.c = ref.c;
    cand.d = ref.d;

    PartitionedSystem cand_part = partition(cand, tol.residual);
    if (!is_v_diagonal(cand_part, 1e-7)) {
      std::ostringstream msg;
      msg << "candidate rejected: best off-diagonal residual " << format_double(off_diag);
      set.notes.push_back(msg.str());
      return false;
    }
    ++set.diagonal_count;

    Matrix j = leading_sign_flips(cand_part, 1e-7);
    cand.b = cand.b * j;

    Matrix s = Matrix::Zero(n, n);
    if (l2 > 0) s.bottomRightCorner(l2, l2) = s22;

    NetworkSolution sol;
    sol.sys = cand;
    sol.dsf = compute_dsf(cand);
    sol.p_offdiagonal = off_diag;
    sol.certificate.s = s;
    sol.certificate.t = t;
    sol.certificate.j = j;
    sol.certificate.residuals =
        verify_glover_willems(ref, cand, s, t, certificate_scale(ref, s, tol.residual));
    require(sol.certificate.residuals.pass, ErrorCode::AssumptionViolation,
            "internal: emitted network failed its own equivalence certificate");
    require(phi_equal(ref, cand, grid, tol.residual), ErrorCode::AssumptionViolation,
            "internal: emitted network failed the spectral identity audit");

    for (const NetworkSolution& existing : set.solutions)
      if (dsf_equal(sol.dsf, existing.dsf, grid, tol.dedup)) return false;
    set.solutions.push_back(std::move(sol));
    return true;
  };

  if (l2 == 0) {
    set.are_count = 1;
    set.admissible_count = 1;
    Matrix empty(0, 0);
    if (q > 0) {
      DiagonalSearchResult found;
      found.t1rot = Matrix::Identity(q, q);
      found.t1free = Matrix::Zero(l, q);
      found.off_diagonal = 0.0;
      emit(empty, found.t1rot, found.t1free, 0.0);
    } else {
      emit(empty, Matrix(0, 0), Matrix(l, 0), 0.0);
    }
    return set;
  }

  AreProblem prob = equivalence_riccati(f2);
  AreSolutionSet are = enumerate_are_solutions(prob, tol.residual);
  if (are.kind == SetKind::Continuum) {
    set.kind = SetKind::Continuum;
    set.notes.push_back(
        "the quadratic equation admits a solution continuum; no finite list exists");
    return set;
  }
  set.are_count = static_cast<int>(are.solutions.size());
  std::sort(are.solutions.begin(), are.solutions.end(), matrix_order);

  Matrix alpha34 = f2.alpha34();
  for (const Matrix& s22 : are.solutions) {
    if (p1 > 0) {
      double bound = tol.residual * (1.0 + alpha34.norm() * s22.norm());
      if ((alpha34 * s22).norm() > bound) continue;
    }
    ++set.admissible_count;

    if (q == 0) {
      emit(s22, Matrix(0, 0), Matrix(l, 0), 0.0);
      continue;
    }

    Matrix w0 = Matrix::Zero(l, q);
    w0.topRows(q) = Matrix::Identity(q, q);
    if (l2 > 0) {
      if (p1 > 0) w0.block(q + p1, 0, l2, p1) = s22 * f2.alpha14().transpose();
      if (p2 > 0) w0.block(q + p1, p1, l2, p2) = s22 * f2.alpha24().transpose();
    }
    Matrix t1_pinned = Matrix::Zero(l, p);
    if (p3 > 0)
      t1_pinned.block(2 * p1 + p2, q, l2, p3) =
          s22 * f2.gamma34().transpose() * diagonal_inverse(f2.b22(), 2);

    if (p == 1) {
      // A single manifest channel has nothing off-diagonal to clear.
      emit(s22, Matrix::Identity(q, q), Matrix::Zero(l, q), 0.0);
      continue;
    }

    DiagonalSearchResult found =
        run_diagonal_search(pa.a12, pa.a22, w0, t1_pinned, p, l, q, 20);
    emit(s22, found.t1rot, found.t1free, found.off_diagonal);
  }

  return set;
}

NetworkSolutionSet reconstruct_from_phi(const PositiveRealSystem& z, const Tolerances& tol) {
  StateSpace sys = z.sys;
  check_dimensions(sys);
  int n = static_cast<int>(sys.order());
  int p = static_cast<int>(sys.outputs());
  require(n > 0 && p > 0 && p <= n, ErrorCode::DimensionMismatch,
          "positive-real summand must have at least one state and output");
  require(sys.inputs() == p, ErrorCode::DimensionMismatch,
          "positive-real summand must be square");
  require(sys.d.norm() <= tol.residual * (1.0 + sys.c.norm() * sys.b.norm()),
          ErrorCode::AssumptionViolation, "positive-real summand must be strictly proper");

  Matrix shape = Matrix::Zero(p, n);
  shape.leftCols(p) = Matrix::Identity(p, p);
  if ((sys.c - shape).norm() > tol.residual * (1.0 + sys.c.norm())) {
    require(matrix_rank(sys.c, tol.rank) == p, ErrorCode::ShapeViolation,
            "output map must have full row rank to expose the manifest states");
    Eigen::JacobiSVD<Matrix> svd(sys.c, Eigen::ComputeFullV);
    Matrix m(n, n);
    m.topRows(p) = sys.c;
    m.bottomRows(n - p) = svd.matrixV().rightCols(n - p).transpose();
    sys = apply_transformation(sys, m, tol);
    require((sys.c - shape).norm() <= tol.residual * (1.0 + sys.c.norm()) * n,
            ErrorCode::ShapeViolation, "re-realized output map is not [I 0]");
  }
  snap_output_shape(sys);

  require(matrix_rank(controllability_matrix(sys.a, sys.b), tol.rank) == n &&
              matrix_rank(observability_matrix(sys.a, sys.c), tol.rank) == n,
          ErrorCode::AssumptionViolation, "positive-real realization must be minimal");

  PartitionedSystem pa = partition(sys, tol.residual);
  int l = n - p;
  Matrix b1 = pa.b1;
  require((b1 - b1.transpose()).norm() <= tol.residual * (1.0 + b1.norm()),
          ErrorCode::AssumptionViolation, "manifest covariance block must be symmetric");
  b1 = 0.5 * (b1 + b1.transpose());
  Matrix b2 = pa.b2;

  // Diagonal manifest gain equation: b1p b1p^T from the covariance data.
  Matrix m1 = -b1 * pa.a11.transpose() - b2.transpose() * pa.a12.transpose() -
              pa.a11 * b1 - pa.a12 * b2;
  m1 = 0.5 * (m1 + m1.transpose());
  double m1_scale = 1.0 + m1.cwiseAbs().maxCoeff();
  Matrix m1_off = m1 - Matrix(m1.diagonal().asDiagonal());
  require(m1_off.norm() <= tol.residual * m1_scale * n, ErrorCode::NotRelativeDegreeZero,
          "manifest gain equation is not diagonal; some channel has no direct noise feed");
  Matrix b1p = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    require(m1(i, i) > tol.pd * m1_scale, ErrorCode::NotRelativeDegreeZero,
            "manifest gain equation has a non-positive diagonal entry");
    b1p(i, i) = std::sqrt(m1(i, i));
  }
  Matrix b1p_inv = diagonal_inverse(b1p, 1);

  NetworkSolutionSet set;
  std::vector<Matrix> candidates;
  Matrix f;
  if (l == 0) {
    set.are_count = 1;
    candidates.push_back(Matrix(0, 0));
  } else {
    f = b2 * pa.a11.transpose() + pa.a21 * b1 + pa.a22 * b2;
    AreProblem prob;
    prob.a = (pa.a22 + f * b1p_inv * b1p_inv * pa.a12).transpose();
    Matrix bbar = (b1p_inv * pa.a12).transpose();
    prob.g = bbar * bbar.transpose();
    prob.q = b2 * pa.a21.transpose() + pa.a21 * b2.transpose() +
             f * b1p_inv * b1p_inv * f.transpose();
    prob.q = 0.5 * (prob.q + prob.q.transpose());
    prob.quadratic_sign = 1;
    AreSolutionSet are = enumerate_are_solutions(prob, tol.residual);
    if (are.kind == SetKind::Continuum) {
      set.kind = SetKind::Continuum;
      set.notes.push_back(
          "the covariance completion admits a solution continuum; no finite list exists");
      return set;
    }
    set.are_count = static_cast<int>(are.solutions.size());
    std::sort(are.solutions.begin(), are.solutions.end(), matrix_order);
    candidates = std::move(are.solutions);
  }

  struct Emitted {
    StateSpace sys;
    Matrix r2;
    Matrix shear;  // -b2p b1p^{-1}
  };
  std::vector<Emitted> emitted;

  int index = 0;
  for (const Matrix& r2 : candidates) {
    ++index;
    Matrix r(n, n);
    r.topLeftCorner(p, p) = b1;
    r.topRightCorner(p, l) = b2.transpose();
    r.bottomLeftCorner(l, p) = b2;
    r.bottomRightCorner(l, l) = 0.5 * (r2 + r2.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r);
    require(eig.info() == Eigen::Success, ErrorCode::EigensolverFailure,
            "eigenvalue computation failed on a covariance candidate");
    double min_eig = eig.eigenvalues().minCoeff();
    double r_scale = 1.0 + r.cwiseAbs().maxCoeff();
    if (min_eig <= tol.pd * r_scale) {
      if (min_eig > 0.0) {
        std::ostringstream msg;
        msg << "covariance candidate " << index << " is borderline positive definite"
            << " (smallest eigenvalue " << format_double(min_eig) << "); dropped";
        set.notes.push_back(msg.str());
      }
      continue;
    }
    ++set.admissible_count;

    Matrix b2p =
        l > 0 ? Matrix(-(r2 * pa.a12.transpose() + f) * b1p_inv) : Matrix::Zero(0, p);
    StateSpace cand;
    cand.a = sys.a;
    cand.b = Matrix(n, p);
    cand.b.topRows(p) = b1p;
    cand.b.bottomRows(l) = b2p;
    cand.c = sys.c;
    cand.d = Matrix::Zero(p, p);

    // Latent shear that zeroes the latent noise feed, making the noise
    // filter the constant b1p and the gain map diagonal outright.
    Matrix shear = l > 0 ? Matrix(-b2p * b1p_inv) : Matrix::Zero(0, p);
    Matrix tk = Matrix::Identity(n, n);
    tk.block(p, 0, l, p) = shear;
    StateSpace moved = apply_transformation(cand, tk, tol);
    require(moved.b.bottomRows(l).norm() <=
                tol.residual * (1.0 + cand.b.norm()) * n,
            ErrorCode::AssumptionViolation,
            "internal: latent noise feed did not cancel under the shear");
    moved.b.bottomRows(l).setZero();
    moved.b.topRows(p) = b1p;
    snap_output_shape(moved);
    ++set.diagonal_count;
    emitted.push_back({std::move(moved), r2, shear});
  }

  require(!emitted.empty(), ErrorCode::NoPositiveDefiniteR,
          "no positive-definite covariance completes the factorization");

  set.reference = emitted.front().sys;
  set.order.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) set.order[static_cast<std::size_t>(i)] = i;

  FrequencyGrid grid;
  std::vector<double> omegas = grid.frequencies();
  for (const Emitted& e : emitted) {
    NetworkSolution sol;
    sol.sys = e.sys;
    sol.dsf = compute_dsf(e.sys);
    sol.p_offdiagonal = 0.0;
    sol.r2 = e.r2;

    Matrix s = Matrix::Zero(n, n);
    if (l > 0)
      s.bottomRightCorner(l, l) = emitted.front().r2 - e.r2;
    Matrix t = Matrix::Identity(n, n);
    t.block(p, 0, l, p) = emitted.front().shear - e.shear;
    sol.certificate.s = s;
    sol.certificate.t = t;
    sol.certificate.j = Matrix::Identity(p, p);
    sol.certificate.residuals = verify_glover_willems(
        set.reference, e.sys, s, t, certificate_scale(set.reference, s, tol.residual));
    require(sol.certificate.residuals.pass, ErrorCode::AssumptionViolation,
            "internal: reconstructed network failed its equivalence certificate");

    for (double omega : omegas) {
      ComplexMatrix phi_z = z.at(omega);
      phi_z = phi_z + phi_z.adjoint().eval();
      ComplexMatrix g = frequency_response(e.sys, Complex(0.0, omega), tol);
      ComplexMatrix phi_g = g * g.adjoint();
      require((phi_g - phi_z).norm() <= 1e-6 * (1.0 + phi_z.norm()),
              ErrorCode::AssumptionViolation,
              "reconstructed density does not match the positive-real input");
    }
    set.solutions.push_back(std::move(sol));
  }
  return set;
}

int classify_minimum_phase_solution(const NetworkSolutionSet& set) {
  require(set.kind == SetKind::Finite && !set.solutions.empty(),
          ErrorCode::DimensionMismatch,
          "classification needs a finite, non-empty solution list");
  int found = -1;
  int count = 0;
  for (std::size_t i = 0; i < set.solutions.size(); ++i) {
    if (is_minimum_phase(set.solutions[i].sys)) {
      ++count;
      if (found < 0) found = static_cast<int>(i);
    }
  }
  require(count != 0, ErrorCode::NoneMinimumPhase,
          "no emitted network has a stably invertible noise path");
  require(count == 1, ErrorCode::MultipleMinimumPhase,
          "several emitted networks have stably invertible noise paths");
  return found;
}

ResidualReport full_noise_verify(const StateSpace& sys_a, const StateSpace& sys_b,
                                 const Matrix& s2, const Matrix& t, double tol) {
  check_dimensions(sys_a);
  check_dimensions(sys_b);
  require(sys_a.order() == sys_b.order() && sys_a.outputs() == sys_b.outputs() &&
              sys_a.inputs() == sys_b.inputs(),
          ErrorCode::DimensionMismatch, "systems must share dimensions");
  Tolerances num = default_tolerances();
  require_full_noise_shape(sys_a, num, "first system");
  require_full_noise_shape(sys_b, num, "second system");

  int n = static_cast<int>(sys_a.order());
  int p = static_cast<int>(sys_a.outputs());
  int l = n - p;
  require(s2.rows() == l && s2.cols() == l, ErrorCode::DimensionMismatch,
          "s2 must be square of latent dimension");
  require(t.rows() == n && t.cols() == n, ErrorCode::DimensionMismatch,
          "t must be square of full dimension");
  check_finite(s2, "s2");
  check_finite(t, "t");

  Matrix a12 = sys_a.a.topRightCorner(p, l);
  Matrix a22 = sys_a.a.bottomRightCorner(l, l);
  Matrix b11_a = sys_a.b.topLeftCorner(p, p);
  Matrix b22_a = sys_a.b.bottomRightCorner(l, l);
  Matrix b11_b = sys_b.b.topLeftCorner(p, p);
  Matrix b22_b = sys_b.b.bottomRightCorner(l, l);
  Matrix t1 = t.bottomLeftCorner(l, p);
  Matrix t2 = t.bottomRightCorner(l, l);

  ResidualReport report;
  report.tol = tol;

  Matrix shape_block(p, n);
  shape_block.leftCols(p) = t.topLeftCorner(p, p) - Matrix::Identity(p, p);
  shape_block.rightCols(l) = t.topRightCorner(p, l);
  report.entries.emplace_back("shape", shape_block.norm());

  Eigen::FullPivLU<Matrix> lu(t);
  require(lu.isInvertible(), ErrorCode::SingularTransformation,
          "state transformation is numerically singular");
  report.entries.emplace_back("state", (sys_b.a - lu.solve(sys_a.a * t)).norm());
  report.entries.emplace_back(
      "gain", (b11_b * b11_b.transpose() - b11_a * b11_a.transpose()).norm());
  report.entries.emplace_back(
      "coupling",
      (t1 - s2 * a12.transpose() * diagonal_inverse(b11_a, 2)).norm());

  Matrix abar = a22.transpose();
  Matrix bbar = (diagonal_inverse(b11_a, 1) * a12).transpose();
  Matrix qbar = b22_a * b22_a.transpose() - t2 * b22_b * b22_b.transpose() * t2.transpose();
  report.entries.emplace_back(
      "riccati", (s2 * abar + abar.transpose() * s2 -
                  s2 * bbar * bbar.transpose() * s2 + qbar)
                     .norm());
  report.pass = report.worst() <= tol;
  return report;
}

FullNoiseFamily full_noise_scalar_family(const StateSpace& sys,
                                         const std::vector<double>& theta_samples) {
  check_dimensions(sys);
  Tolerances tol = default_tolerances();
  require_full_noise_shape(sys, tol, "system");

  AssumptionReport shape = validate_assumptions(sys, tol);
  require(shape.hurwitz && shape.minimal && shape.c_is_identity_zero && shape.d_is_zero,
          ErrorCode::AssumptionViolation,
          "system must be stable and minimal with c = [I 0], d = 0");

  int n = static_cast<int>(sys.order());
  int p = static_cast<int>(sys.outputs());
  int l = n - p;
  require(l == 1, ErrorCode::DimensionMismatch,
          "the closed-form family needs exactly one latent state");

  Matrix a12 = sys.a.topRightCorner(p, 1);
  double a22 = sys.a(n - 1, n - 1);
  Matrix b11 = sys.b.topLeftCorner(p, p);
  double b22 = sys.b(n - 1, n - 1);

  // g = ||b11^{-1} a12||^2 drives the quadratic bound on the squared
  // latent gain: t2^2(theta) = 1 + (2 a22 theta - g theta^2) / b22^2.
  double g = (diagonal_inverse(b11, 1) * a12).squaredNorm();
  require(g > 0.0, ErrorCode::AssumptionViolation,
          "latent state must influence some manifest channel");

  FullNoiseFamily family;
  double disc = std::sqrt(a22 * a22 + g * b22 * b22);
  family.theta_min = (a22 - disc) / g;
  family.theta_max = (a22 + disc) / g;
  {
    std::ostringstream msg;
    msg << "theta restricted to [" << format_double(family.theta_min) << ", "
        << format_double(family.theta_max)
        << "]: outside it the squared latent gain goes negative";
    family.notes.push_back(msg.str());
    family.notes.push_back(
        "interval endpoints are excluded: there the basis change becomes singular");
  }

  FrequencyGrid grid;
  for (double theta : theta_samples) {
    double t2_sq = 1.0 + (2.0 * a22 * theta - g * theta * theta) / (b22 * b22);
    if (t2_sq <= 1e-12) continue;

    Matrix t = Matrix::Identity(n, n);
    t.block(n - 1, 0, 1, p) =
        theta * (a12.transpose() * diagonal_inverse(b11, 2));
    t(n - 1, n - 1) = std::sqrt(t2_sq);

    Eigen::PartialPivLU<Matrix> lu(t);
    StateSpace cand;
    cand.a = lu.solve(sys.a * t);
    cand.b = sys.b;
    cand.c = sys.c;
    cand.d = sys.d;

    Matrix s2(1, 1);
    s2(0, 0) = theta;
    Matrix s = Matrix::Zero(n, n);
    s(n - 1, n - 1) = theta;

    FullNoiseSample sample;
    sample.theta = theta;
    sample.sys = cand;
    sample.dsf = compute_dsf(cand);
    sample.certificate.s = s;
    sample.certificate.t = t;
    sample.certificate.j = Matrix::Identity(n, n);
    sample.certificate.residuals =
        full_noise_verify(sys, cand, s2, t, certificate_scale(sys, s, tol.residual));
    require(sample.certificate.residuals.pass, ErrorCode::AssumptionViolation,
            "internal: family member failed its equivalence relations");
    ResidualReport classical =
        verify_glover_willems(sys, cand, s, t, certificate_scale(sys, s, tol.residual));
    require(classical.pass, ErrorCode::AssumptionViolation,
            "internal: family member failed the classical equivalence relations");
    require(phi_equal(sys, cand, grid, tol.residual), ErrorCode::AssumptionViolation,
            "internal: family member failed the spectral identity audit");
    family.samples.push_back(std::move(sample));
  }

  require(!family.samples.empty(), ErrorCode::EmptyDomain,
          "no requested theta keeps the latent gain real and the basis change regular");
  return family;
}

}  // namespace netfactor
