#include "netfactor/dsf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "netfactor/numerics.hpp"

namespace netfactor {

namespace {

StateSpace similarity(const StateSpace& sys, const Matrix& t, const Matrix& tinv) {
  return {t * sys.a * tinv, t * sys.b, sys.c * tinv, sys.d};
}

// y = h(g(u)) with states stacked as (x_h, x_g).
StateSpace series(const StateSpace& h, const StateSpace& g) {
  const Eigen::Index nh = h.a.rows(), ng = g.a.rows();
  StateSpace out;
  out.a = Matrix::Zero(nh + ng, nh + ng);
  out.a.topLeftCorner(nh, nh) = h.a;
  out.a.topRightCorner(nh, ng) = h.b * g.c;
  out.a.bottomRightCorner(ng, ng) = g.a;
  out.b = Matrix::Zero(nh + ng, g.b.cols());
  out.b.topRows(nh) = h.b * g.d;
  out.b.bottomRows(ng) = g.b;
  out.c = Matrix::Zero(h.c.rows(), nh + ng);
  out.c.leftCols(nh) = h.c;
  out.c.rightCols(ng) = h.d * g.c;
  out.d = h.d * g.d;
  return out;
}

// Realization of (sI - W_D(s))^{-1} given one of W_D(s).
StateSpace resolvent_against(const StateSpace& wd) {
  const Eigen::Index p = wd.c.rows(), nd = wd.a.rows();
  StateSpace h;
  h.a = Matrix::Zero(p + nd, p + nd);
  h.a.topLeftCorner(p, p) = wd.d;
  h.a.topRightCorner(p, nd) = wd.c;
  h.a.bottomLeftCorner(nd, p) = wd.b;
  h.a.bottomRightCorner(nd, nd) = wd.a;
  h.b = Matrix::Zero(p + nd, p);
  h.b.topRows(p) = Matrix::Identity(p, p);
  h.c = Matrix::Zero(p, p + nd);
  h.c.leftCols(p) = Matrix::Identity(p, p);
  h.d = Matrix::Zero(p, p);
  return h;
}

// W_D = diag(W(1,1), ..., W(p,p)) realized as p masked copies of the W
// realization.
StateSpace diagonal_of_w(const PartitionedSystem& part) {
  const Eigen::Index p = part.manifest(), l = part.latent();
  StateSpace wd;
  wd.a = Matrix::Zero(p * l, p * l);
  wd.b = Matrix::Zero(p * l, p);
  wd.c = Matrix::Zero(p, p * l);
  wd.d = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    wd.a.block(i * l, i * l, l, l) = part.a22;
    wd.b.block(i * l, i, l, 1) = part.a21.col(i);
    wd.c.block(i, i * l, 1, l) = part.a12.row(i);
    wd.d(i, i) = part.a11(i, i);
  }
  return wd;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct Snapper {
  double worst = 0.0;

  void zero(Eigen::Ref<Matrix> block) {
    if (block.size() == 0) return;
    worst = std::max(worst, block.cwiseAbs().maxCoeff());
    block.setZero();
  }
  void set(Eigen::Ref<Matrix> block, const Matrix& expected) {
    if (block.size() == 0) return;
    worst = std::max(worst, (block - expected).cwiseAbs().maxCoeff());
    block = expected;
  }
};

}  // namespace

std::pair<StateSpace, StateSpace> compute_wv(const PartitionedSystem& part) {
  StateSpace w{part.a22, part.a21, part.a12, part.a11};
  StateSpace v{part.a22, part.b2, part.a12, part.b1};
  return {w, v};
}

Dsf compute_dsf(const StateSpace& sys) {
  PartitionedSystem part = partition(sys);
  auto [w, v] = compute_wv(part);
  StateSpace wd = diagonal_of_w(part);
  StateSpace h = resolvent_against(wd);

  // W - W_D as a parallel difference.
  const Eigen::Index l = part.latent(), nd = wd.a.rows(), p = part.manifest();
  StateSpace diff;
  diff.a = Matrix::Zero(l + nd, l + nd);
  diff.a.topLeftCorner(l, l) = w.a;
  diff.a.bottomRightCorner(nd, nd) = wd.a;
  diff.b = Matrix::Zero(l + nd, p);
  diff.b.topRows(l) = w.b;
  diff.b.bottomRows(nd) = wd.b;
  diff.c = Matrix::Zero(p, l + nd);
  diff.c.leftCols(l) = w.c;
  diff.c.rightCols(nd) = -wd.c;
  diff.d = w.d - wd.d;

  Dsf out;
  out.p_count = p;
  out.q_realization = series(h, diff);
  out.p_realization = series(h, v);
  out.meta = "computed from state space";
  return out;
}

bool is_v_diagonal(const PartitionedSystem& part, double tol) {
  auto offdiag_ok = [tol](const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (i != j && std::abs(m(i, j)) > tol) return false;
    return true;
  };
  if (!offdiag_ok(part.b1)) return false;
  Matrix left = part.a12;
  for (Eigen::Index k = 0; k < part.latent(); ++k) {
    if (!offdiag_ok(left * part.b2)) return false;
    left = left * part.a22;
  }
  return true;
}

bool dsf_equal(const Dsf& d1, const Dsf& d2, const FrequencyGrid& grid, double tol) {
  require(d1.p_count == d2.p_count && d1.p_realization.inputs() == d2.p_realization.inputs(),
          ErrorCode::DimensionMismatch, "structure functions have different dimensions");
  for (double omega : grid.frequencies()) {
    Complex s(0.0, omega);
    ComplexMatrix q1 = frequency_response(d1.q_realization, s);
    ComplexMatrix q2 = frequency_response(d2.q_realization, s);
    ComplexMatrix p1 = frequency_response(d1.p_realization, s);
    ComplexMatrix p2 = frequency_response(d2.p_realization, s);
    double qscale = 1.0 + std::max(q1.norm(), q2.norm());
    double pscale = 1.0 + std::max(p1.norm(), p2.norm());
    if ((q1 - q2).norm() > tol * qscale) return false;
    if ((p1 - p2).norm() > tol * pscale) return false;
  }
  return true;
}

StateSpace permute_manifest(const StateSpace& sys, const std::vector<int>& order) {
  PartitionedSystem part = partition(sys);
  const Eigen::Index p = part.manifest();
  require(static_cast<Eigen::Index>(order.size()) == p, ErrorCode::DimensionMismatch,
          "permutation size mismatch");
  std::vector<bool> seen(order.size(), false);
  for (int idx : order) {
    require(idx >= 0 && idx < p && !seen[idx], ErrorCode::DimensionMismatch, "not a permutation");
    seen[idx] = true;
  }
  Matrix pi = Matrix::Zero(p, p);
  for (Eigen::Index k = 0; k < p; ++k) pi(k, order[k]) = 1.0;
  const Eigen::Index n = sys.a.rows();
  Matrix t = Matrix::Identity(n, n);
  t.topLeftCorner(p, p) = pi;
  StateSpace out;
  out.a = t * sys.a * t.transpose();
  out.b = t * sys.b * pi.transpose();
  out.c = sys.c;
  out.d = sys.d;
  return out;
}

Rational transfer_entry(const StateSpace& sys, Eigen::Index row, Eigen::Index col, double cancel_tol) {
  require(row >= 0 && row < sys.c.rows() && col >= 0 && col < sys.b.cols(),
          ErrorCode::DimensionMismatch, "transfer entry out of range");
  Rational raw = transfer_function_siso(sys.a, sys.b.col(col), sys.c.row(row), sys.d(row, col));
  return cancel_common_factors(raw, cancel_tol);
}

std::vector<int> v_relative_degrees(const PartitionedSystem& part, double rel_tol) {
  const Eigen::Index p = part.manifest(), l = part.latent();
  std::vector<int> degrees(p, 0);
  for (Eigen::Index i = 0; i < p; ++i) {
    std::vector<double> markov;
    markov.push_back(std::abs(part.b1(i, i)));
    RowVector cur = part.a12.row(i);
    for (Eigen::Index k = 0; k < l; ++k) {
      markov.push_back(std::abs(cur.dot(part.b2.col(i))));
      cur = cur * part.a22;
    }
    double scale = *std::max_element(markov.begin(), markov.end());
    require(scale > 0.0, ErrorCode::NonMinimalV, "noise channel " + std::to_string(i) + " is identically zero");
    int deg = 0;
    while (markov[deg] <= rel_tol * scale) ++deg;
    degrees[i] = deg;
  }
  return degrees;
}

Form1Result to_pdiag_form1(const StateSpace& sys, const Tolerances& tol) {
  AssumptionReport report = validate_assumptions(sys, tol);
  require(report.all(), ErrorCode::AssumptionViolation,
          "system must be stable, minimal, in output-normal shape, with diagonal noise map");

  std::vector<int> degrees = v_relative_degrees(partition(sys));
  const int p = static_cast<int>(degrees.size());

  // Stable sort channels: relative degree > 1 first, then 1, then 0.
  Form1Result result;
  result.order.resize(p);
  std::iota(result.order.begin(), result.order.end(), 0);
  auto group = [&degrees](int ch) { return degrees[ch] >= 2 ? 0 : (degrees[ch] == 1 ? 1 : 2); };
  std::stable_sort(result.order.begin(), result.order.end(),
                   [&](int a, int b) { return group(a) < group(b); });
  StateSpace relabeled = permute_manifest(sys, result.order);
  for (int k = 0; k < p; ++k) result.rel_degrees.push_back(degrees[result.order[k]]);
  result.p11 = static_cast<int>(std::count_if(result.rel_degrees.begin(), result.rel_degrees.end(),
                                              [](int d) { return d >= 1; }));
  result.p22 = p - result.p11;
  const int p11 = result.p11;

  PartitionedSystem part = partition(relabeled);
  const Eigen::Index l = part.latent(), n = relabeled.order();

  // Shear x2 -> x2 + B2 diag(lambda) x1 with lambda = -1/B1(j,j) on the
  // static channels: their inputs then bypass the latent states entirely
  // and V(j,j) collapses to the constant B1(j,j). Diagonality is kept
  // because the shear's frequency-domain correction A12 (sI-A22)^{-1} B2 L
  // is itself diagonal.
  Vector lambda = Vector::Zero(p);
  for (int j = p11; j < p; ++j) lambda(j) = -1.0 / part.b1(j, j);
  Matrix t_a = Matrix::Identity(n, n);
  Matrix t_a_inv = Matrix::Identity(n, n);
  t_a.bottomLeftCorner(l, p) = part.b2 * lambda.asDiagonal();
  t_a_inv.bottomLeftCorner(l, p) = -part.b2 * lambda.asDiagonal();
  StateSpace staticized = similarity(relabeled, t_a, t_a_inv);
  PartitionedSystem pa = partition(staticized);

  // Controllable-canonical chains for the strictly proper channels. The
  // chain subspace of channel i is the reachable space of (A22, B2 e_i);
  // mapping its Krylov basis through the companion controllability matrix
  // aligns it with the canonical realization.
  std::vector<SisoRealization> chains;
  Eigen::Index r_total = 0;
  for (int i = 0; i < p11; ++i) {
    Rational vi = transfer_function_siso(pa.a22, pa.b2.col(i), pa.a12.row(i), 0.0);
    Rational minimal = cancel_common_factors(vi, 1e-6);
    SisoRealization ccf = realize_siso_controllable(minimal.num, minimal.den);
    r_total += ccf.r;
    chains.push_back(std::move(ccf));
  }
  require(r_total <= l, ErrorCode::AssumptionViolation, "latent dimension too small for noise dynamics");

  Matrix x_chain(l, r_total);
  Eigen::Index col = 0;
  for (int i = 0; i < p11; ++i) {
    const int r = chains[i].r;
    Matrix krylov(l, r);
    Vector cur = pa.b2.col(i);
    for (int k = 0; k < r; ++k) {
      krylov.col(k) = cur;
      cur = pa.a22 * cur;
    }
    Matrix m = controllability_matrix(chains[i].alpha, chains[i].beta);
    x_chain.middleCols(col, r) = m.transpose().partialPivLu().solve(krylov.transpose()).transpose();
    col += r;
  }
  require(r_total == 0 || matrix_rank(x_chain, tol.rank) == static_cast<int>(r_total),
          ErrorCode::AssumptionViolation, "noise channels share latent dynamics");

  // Complete with directions invisible to the strictly proper outputs.
  Matrix x(l, l);
  if (r_total > 0) x.leftCols(r_total) = x_chain;
  const Eigen::Index rest = l - r_total;
  if (rest > 0) {
    Matrix kernel;
    if (p11 > 0) {
      Eigen::BDCSVD<Matrix> svd(pa.a12.topRows(p11), Eigen::ComputeFullV);
      Eigen::Index rank = 0;
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol.rank * svd.singularValues()(0) * static_cast<double>(l)) ++rank;
      kernel = svd.matrixV().rightCols(l - rank);
    } else {
      kernel = Matrix::Identity(l, l);
    }
    Matrix candidates = kernel;
    if (r_total > 0) {
      Eigen::HouseholderQR<Matrix> qr(x_chain);
      Matrix q = qr.householderQ() * Matrix::Identity(l, r_total);
      candidates -= q * (q.transpose() * kernel);
    }
    Eigen::ColPivHouseholderQR<Matrix> pick(candidates);
    require(pick.rank() >= rest, ErrorCode::AssumptionViolation,
            "cannot complete latent basis outside the noise chains");
    for (Eigen::Index k = 0; k < rest; ++k)
      x.col(r_total + k) = kernel.col(pick.colsPermutation().indices()(k));
  }
  require(l == 0 || matrix_rank(x, tol.rank) == static_cast<int>(l), ErrorCode::AssumptionViolation,
          "latent basis change is singular");

  Matrix t_b = Matrix::Identity(n, n);
  Matrix t_b_inv = Matrix::Identity(n, n);
  if (l > 0) {
    t_b.bottomRightCorner(l, l) = x.fullPivLu().inverse();
    t_b_inv.bottomRightCorner(l, l) = x;
  }
  StateSpace shaped = similarity(staticized, t_b, t_b_inv);
  PartitionedSystem pb = partition(shaped);

  // Enforce the template exactly and audit how much was moved.
  Snapper snap;
  snap.zero(pb.b1.topRows(p11));
  snap.zero(pb.b1.bottomRows(p - p11).leftCols(p11));
  Matrix b22 = pb.b1.bottomRightCorner(p - p11, p - p11);
  Matrix b22_diag = b22.diagonal().asDiagonal();
  snap.set(pb.b1.bottomRightCorner(p - p11, p - p11), b22_diag);
  snap.zero(pb.b2.rightCols(p - p11));
  snap.zero(pb.b2.bottomRows(l - r_total));
  snap.zero(pb.a12.bottomLeftCorner(p - p11, r_total));
  snap.zero(pb.a12.topRightCorner(p11, l - r_total));
  snap.zero(pb.a22.bottomLeftCorner(l - r_total, r_total));
  Eigen::Index off = 0;
  for (int i = 0; i < p11; ++i) {
    const int r = chains[i].r;
    snap.set(pb.a22.block(off, off, r, r), chains[i].alpha);
    for (int i2 = 0; i2 < p11; ++i2) {
      if (i2 == i) continue;
      Eigen::Index off2 = 0;
      for (int k = 0; k < i2; ++k) off2 += chains[k].r;
      snap.zero(pb.a22.block(off, off2, r, chains[i2].r));
    }
    Matrix beta_block = Matrix::Zero(r, p11);
    beta_block.col(i) = chains[i].beta;
    snap.set(pb.b2.block(off, 0, r, p11), beta_block);
    Matrix gamma_block = Matrix::Zero(p11, r);
    gamma_block.row(i) = chains[i].gamma;
    snap.set(pb.a12.block(0, off, p11, r), gamma_block);
    off += r;
  }
  double scale = 1.0 + std::max({max_abs(pa.a22), max_abs(pa.a12), max_abs(pa.b1), max_abs(pa.b2)});
  require(snap.worst <= tol.residual * scale * 10.0, ErrorCode::AssumptionViolation,
          "canonical form residual too large: " + std::to_string(snap.worst));

  result.sys = pb.assemble();
  result.t = t_b * t_a;
  for (const auto& ch : chains) result.r_list.push_back(ch.r);
  return result;
}

PDiagForm2 to_pdiag_form2(const StateSpace& sys, const Tolerances& tol) {
  Form1Result f1 = to_pdiag_form1(sys, tol);
  PartitionedSystem part = partition(f1.sys);
  const Eigen::Index l = part.latent(), n = f1.sys.order();
  const int p = static_cast<int>(part.manifest());

  PDiagForm2 out;
  out.order = f1.order;
  for (int d : f1.rel_degrees) {
    if (d >= 2) ++out.p1;
    else if (d == 1) ++out.p2;
    else ++out.p3;
  }
  const int p1 = out.p1, p2 = out.p2;
  out.l2 = static_cast<int>(l) - 2 * p1 - p2;
  require(out.l2 >= 0, ErrorCode::AssumptionViolation, "latent dimension below structural minimum");

  std::vector<Eigen::Index> offset(f1.r_list.size() + 1, 0);
  for (std::size_t i = 0; i < f1.r_list.size(); ++i) offset[i + 1] = offset[i] + f1.r_list[i];
  const Eigen::Index r_total = offset[f1.r_list.size()];
  const Eigen::Index rest = l - r_total;

  // New latent functionals, rows of theta. Channel i of relative degree d
  // contributes gamma_i alpha_i^k for k = 0..d-1: the last, normalized by
  // the leading Markov parameter m_i, is the directly driven coordinate;
  // gamma_i itself is the directly observed one; the rest are undriven.
  // The driven coordinate is extended across the undriven remainder so
  // that row i of the k_i-th power of A22 lands exactly on it.
  Matrix theta = Matrix::Zero(l, l);
  const Matrix coupling = part.a22.topRightCorner(r_total, rest);
  const Matrix rmat = part.a22.bottomRightCorner(rest, rest);

  Eigen::Index row = 0;
  std::vector<RowVector> completions_store;
  for (int i = 0; i < p1; ++i) {
    const int r = f1.r_list[i], d = f1.rel_degrees[i];
    Matrix alpha = part.a22.block(offset[i], offset[i], r, r);
    RowVector gamma = part.a12.block(i, offset[i], 1, r);
    RowVector w = gamma;
    RowVector rho = RowVector::Zero(rest);
    for (int k = 1; k <= d - 1; ++k) {
      rho = rho * rmat + w * coupling.middleRows(offset[i], r);
      w = w * alpha;
    }
    double m = w(r - 1);
    require(std::abs(m) > 0.0, ErrorCode::AssumptionViolation, "vanishing leading Markov parameter");
    theta.block(row, offset[i], 1, r) = w / m;
    theta.block(row, r_total, 1, rest) = rho / m;
    ++row;
  }
  for (int i = p1; i < p1 + p2; ++i) {
    const int r = f1.r_list[i];
    RowVector gamma = part.a12.block(i, offset[i], 1, r);
    double m = gamma(r - 1);
    require(std::abs(m) > 0.0, ErrorCode::AssumptionViolation, "vanishing leading Markov parameter");
    theta.block(row, offset[i], 1, r) = gamma / m;
    ++row;
  }
  for (int i = 0; i < p1; ++i) {
    theta.block(row, offset[i], 1, f1.r_list[i]) = part.a12.block(i, offset[i], 1, f1.r_list[i]);
    ++row;
  }
  // z4: undriven chain functionals, then the untouched remainder.
  for (int i = 0; i < p1 + p2; ++i) {
    const int r = f1.r_list[i], d = f1.rel_degrees[i];
    Matrix alpha = part.a22.block(offset[i], offset[i], r, r);
    RowVector gamma = part.a12.block(i, offset[i], 1, r);
    Matrix w_span(d, r);
    RowVector w = gamma;
    for (int k = 0; k < d; ++k) {
      w_span.row(k) = w;
      w = w * alpha;
    }
    for (int k = 1; k <= d - 2; ++k) {
      theta.block(row, offset[i], 1, r) = w_span.row(k);
      ++row;
    }
    // Complete the annihilator of beta (functionals with last entry zero)
    // past the w rows already in it.
    const int have = d >= 2 ? d - 1 : 0;
    const int want = r - 1 - have;
    if (want > 0) {
      Matrix candidates = Matrix::Zero(r - 1, r);
      candidates.leftCols(r - 1) = Matrix::Identity(r - 1, r - 1);
      if (have > 0) {
        Matrix w_rows = w_span.topRows(have);
        Eigen::HouseholderQR<Matrix> qr(w_rows.transpose());
        Matrix q = qr.householderQ() * Matrix::Identity(r, have);
        candidates -= (candidates * q) * q.transpose();
      }
      Eigen::ColPivHouseholderQR<Matrix> pick(candidates.transpose());
      require(pick.rank() >= want, ErrorCode::AssumptionViolation, "chain completion failed");
      for (int k = 0; k < want; ++k) {
        Eigen::Index idx = pick.colsPermutation().indices()(k);
        theta(row, offset[i] + idx) = 1.0;
        ++row;
      }
    }
  }
  theta.block(row, r_total, rest, rest) = Matrix::Identity(rest, rest);
  row += rest;
  require(row == l, ErrorCode::AssumptionViolation, "latent bookkeeping mismatch");

  Matrix t2 = Matrix::Identity(n, n);
  Matrix t2_inv = Matrix::Identity(n, n);
  if (l > 0) {
    Eigen::FullPivLU<Matrix> lu(theta);
    require(lu.isInvertible(), ErrorCode::AssumptionViolation, "latent functionals are dependent");
    t2.bottomRightCorner(l, l) = theta;
    t2_inv.bottomRightCorner(l, l) = lu.inverse();
  }
  StateSpace shaped = similarity(f1.sys, t2, t2_inv);
  PartitionedSystem pb = partition(shaped);

  // Template snapping: driven blocks to exact unit patterns, observed
  // block to exact identity, structural zeros to zero.
  Snapper snap;
  const int p3 = out.p3, l2 = out.l2;
  snap.zero(pb.b1.topRows(p1 + p2));
  snap.zero(pb.b1.bottomRows(p3).leftCols(p1 + p2));
  Matrix b22 = pb.b1.bottomRightCorner(p3, p3);
  snap.set(pb.b1.bottomRightCorner(p3, p3), Matrix(b22.diagonal().asDiagonal()));
  Matrix b2_target = Matrix::Zero(l, p);
  b2_target.block(0, 0, p1 + p2, p1 + p2) = Matrix::Identity(p1 + p2, p1 + p2);
  snap.set(pb.b2, b2_target);
  // A12 rows: degree > 1 read z3 exactly; degree 1 read z2 diagonally.
  Matrix a12_top = Matrix::Zero(p1, l);
  a12_top.block(0, p1 + p2, p1, p1) = Matrix::Identity(p1, p1);
  snap.set(pb.a12.topRows(p1), a12_top);
  Matrix gamma22 = pb.a12.block(p1, p1, p2, p2);
  Matrix a12_mid = Matrix::Zero(p2, l);
  a12_mid.block(0, p1, p2, p2) = Matrix(gamma22.diagonal().asDiagonal());
  snap.set(pb.a12.middleRows(p1, p2), a12_mid);
  // A22 z3 rows: z2 block zero, z1 block diagonal. Channels of relative
  // degree two reach the driven block in one step, so their undriven
  // block must vanish already in A22 itself.
  snap.zero(pb.a22.block(p1 + p2, p1, p1, p2));
  Matrix a31 = pb.a22.block(p1 + p2, 0, p1, p1);
  snap.set(pb.a22.block(p1 + p2, 0, p1, p1), Matrix(a31.diagonal().asDiagonal()));
  for (int i = 0; i < p1; ++i)
    if (f1.rel_degrees[i] == 2) snap.zero(pb.a22.block(p1 + p2 + i, 2 * p1 + p2, 1, l2));
  double scale = 1.0 + std::max({max_abs(part.a22), max_abs(part.a12), max_abs(part.b1), max_abs(part.b2)});
  require(snap.worst <= tol.residual * scale * 10.0, ErrorCode::AssumptionViolation,
          "canonical form residual too large: " + std::to_string(snap.worst));

  // k indices: first power of A22 whose z3 row i lands on z1, with the
  // z4 block vanishing at that power.
  Matrix power = Matrix::Identity(l, l);
  std::vector<int> k_list(p1, 0);
  for (int k = 1; k <= static_cast<int>(l) - 1 && p1 > 0; ++k) {
    power = power * pb.a22;
    double pscale = 1.0 + max_abs(power);
    for (int i = 0; i < p1; ++i) {
      if (k_list[i] != 0) continue;
      RowVector z1_block = power.block(p1 + p2 + i, 0, 1, p1);
      if (z1_block.cwiseAbs().maxCoeff() > 1e-7 * pscale) {
        for (int j = 0; j < p1; ++j)
          require(j == i || std::abs(z1_block(j)) <= 1e-7 * pscale, ErrorCode::AssumptionViolation,
                  "power structure is not diagonal");
        RowVector z4_block = power.block(p1 + p2 + i, 2 * p1 + p2, 1, l2);
        require(z4_block.size() == 0 || z4_block.cwiseAbs().maxCoeff() <= 1e-7 * pscale,
                ErrorCode::AssumptionViolation, "driven and undriven blocks mix");
        k_list[i] = k;
      }
    }
  }
  for (int i = 0; i < p1; ++i)
    require(k_list[i] >= 1, ErrorCode::AssumptionViolation, "no power reaches the driven block");
  out.k_list = k_list;
  out.sys = pb;
  out.t = t2 * f1.t;
  return out;
}

}  // namespace netfactor
