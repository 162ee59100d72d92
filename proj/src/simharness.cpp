#include "netfactor/simharness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "netfactor/dsf.hpp"

namespace netfactor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(rng);
}

double standard_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

// Normal draw pushed away from zero so leading coefficients and noise
// gains stay numerically full rank.
double bounded_away(std::mt19937_64& rng, double floor_mag) {
  double v = standard_normal(rng);
  if (std::abs(v) < floor_mag) v = v < 0.0 ? v - floor_mag : v + floor_mag;
  return v;
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = standard_normal(rng);
  return m;
}

// Monic polynomial with real roots drawn log-uniformly in [-3, -0.3],
// coefficients descending.
Vector stable_monic(std::mt19937_64& rng, int degree) {
  Vector poly = Vector::Zero(degree + 1);
  poly(0) = 1.0;
  std::uniform_real_distribution<double> dist(std::log(0.3), std::log(3.0));
  for (int k = 0; k < degree; ++k) {
    double root = -std::exp(dist(rng));
    // multiply by (s - root)
    Vector next = Vector::Zero(degree + 1);
    for (int i = 0; i <= k; ++i) {
      next(i) += poly(i);
      next(i + 1) -= root * poly(i);
    }
    poly = next;
  }
  return poly;
}

Vector random_numerator(std::mt19937_64& rng, int degree) {
  Vector num(degree + 1);
  for (int i = 0; i <= degree; ++i) num(i) = standard_normal(rng);
  num(0) = bounded_away(rng, 0.3);
  return num;
}

struct ChannelPlan {
  int rel_degree = 0;   // 0, 1 or 2
  int chain = 0;        // latent chain length realizing the proper part
  double feedthrough = 0.0;  // nonzero only for relative degree 0
};

// Well-conditioned random invertible matrix: two orthogonal factors around
// log-uniform singular values in [e^{-0.5}, e^{0.5}].
Matrix random_invertible(std::mt19937_64& rng, int n) {
  if (n == 0) return Matrix(0, 0);
  Eigen::HouseholderQR<Matrix> qr1(random_matrix(rng, n, n));
  Eigen::HouseholderQR<Matrix> qr2(random_matrix(rng, n, n));
  Matrix q1 = qr1.householderQ();
  Matrix q2 = qr2.householderQ();
  Vector sv(n);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (int i = 0; i < n; ++i) sv(i) = std::exp(dist(rng));
  return q1 * sv.asDiagonal() * q2.transpose();
}

StateSpace build_candidate(const TrialDims& dims, std::mt19937_64& rng) {
  int p = dims.p;
  int l = dims.l;

  // Channel plans: p1 channels of degree 2, p2 of degree 1, p3 of degree 0.
  std::vector<ChannelPlan> plan(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    if (i < dims.p1) {
      plan[static_cast<std::size_t>(i)].rel_degree = 2;
      plan[static_cast<std::size_t>(i)].chain = 2;
    } else if (i < dims.p1 + dims.p2) {
      plan[static_cast<std::size_t>(i)].rel_degree = 1;
      plan[static_cast<std::size_t>(i)].chain = 1;
    } else {
      plan[static_cast<std::size_t>(i)].rel_degree = 0;
      plan[static_cast<std::size_t>(i)].chain = 0;
      plan[static_cast<std::size_t>(i)].feedthrough = bounded_away(rng, 0.3);
    }
  }

  // Distribute the l2 budget between chain extensions (including fresh
  // chains behind a feedthrough) and undriven latent states; every unit
  // adds one state beyond the 2 p1 + p2 structural minimum.
  int undriven = 0;
  for (int unit = 0; unit < dims.l2; ++unit) {
    int choice = uniform_int(rng, 0, p);
    if (choice == p) {
      ++undriven;
    } else {
      ++plan[static_cast<std::size_t>(choice)].chain;
    }
  }

  std::vector<int> chain_start(static_cast<std::size_t>(p), 0);
  int chain_total = 0;
  for (int i = 0; i < p; ++i) {
    chain_start[static_cast<std::size_t>(i)] = chain_total;
    chain_total += plan[static_cast<std::size_t>(i)].chain;
  }

  Matrix a22 = Matrix::Zero(l, l);
  Matrix a12 = Matrix::Zero(p, l);
  Matrix b2 = Matrix::Zero(l, p);
  Matrix b1 = Matrix::Zero(p, p);

  for (int i = 0; i < p; ++i) {
    const ChannelPlan& ch = plan[static_cast<std::size_t>(i)];
    b1(i, i) = ch.feedthrough;
    if (ch.chain == 0) continue;
    int num_degree = ch.chain - std::max(ch.rel_degree, 1);
    SisoRealization sr;
    for (;;) {
      try {
        sr = realize_siso_controllable(random_numerator(rng, num_degree),
                                       stable_monic(rng, ch.chain));
        break;
      } catch (const Error&) {
        // a rare non-coprime draw; redraw the fraction
      }
    }
    int s0 = chain_start[static_cast<std::size_t>(i)];
    a22.block(s0, s0, ch.chain, ch.chain) = sr.alpha;
    b2.block(s0, i, ch.chain, 1) = sr.beta;
    a12.block(i, s0, 1, ch.chain) = sr.gamma;
  }

  // Free couplings: chains may feed the undriven block and every manifest
  // row may read it; the undriven block never feeds the chains, keeping
  // the noise-to-output map diagonal.
  if (undriven > 0) {
    a22.block(0, chain_total, chain_total, undriven) =
        random_matrix(rng, chain_total, undriven);
    a22.block(chain_total, chain_total, undriven, undriven) =
        random_matrix(rng, undriven, undriven);
    a12.rightCols(undriven) = random_matrix(rng, p, undriven);
  }

  StateSpace sys;
  sys.a = Matrix(p + l, p + l);
  sys.a.topLeftCorner(p, p) = random_matrix(rng, p, p);
  sys.a.topRightCorner(p, l) = a12;
  sys.a.bottomLeftCorner(l, p) = random_matrix(rng, l, p);
  sys.a.bottomRightCorner(l, l) = a22;
  sys.b = Matrix::Zero(p + l, p);
  sys.b.topRows(p) = b1;
  sys.b.bottomRows(l) = b2;
  sys.c = Matrix::Zero(p, p + l);
  sys.c.leftCols(p) = Matrix::Identity(p, p);
  sys.d = Matrix::Zero(p, p);

  // Shift the spectrum to a 0.1 stability margin; the diagonal structure
  // of the noise map survives any shift of the whole state matrix.
  Eigen::EigenSolver<Matrix> eig(sys.a);
  require(eig.info() == Eigen::Success, ErrorCode::EigensolverFailure,
          "eigenvalue computation failed during generation");
  double margin = 0.1;
  double top = eig.eigenvalues().real().maxCoeff();
  if (top > -margin) sys.a -= (top + margin) * Matrix::Identity(p + l, p + l);

  // Hide the construction: random latent basis (leaves the structure
  // function invariant) and random channel relabeling.
  if (l > 0) {
    Matrix t = Matrix::Identity(p + l, p + l);
    t.bottomRightCorner(l, l) = random_invertible(rng, l);
    sys = apply_transformation(sys, t);
    sys.c = Matrix::Zero(p, p + l);
    sys.c.leftCols(p) = Matrix::Identity(p, p);
    sys.d = Matrix::Zero(p, p);
  }
  std::vector<int> relabel(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) relabel[static_cast<std::size_t>(i)] = i;
  std::shuffle(relabel.begin(), relabel.end(), rng);
  return permute_manifest(sys, relabel);
}

}  // namespace

const char* trial_status_name(TrialStatus status) {
  switch (status) {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::Continuum: return "continuum";
    case TrialStatus::Skipped: return "skipped";
    case TrialStatus::Failed: return "failed";
  }
  return "unknown";
}

std::uint64_t derive_trial_seed(std::uint64_t seed, int trial) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial) + 1));
}

TrialDims draw_dims(const DimRanges& ranges, std::mt19937_64& rng) {
  require(ranges.p_min >= 1 && ranges.p_min <= ranges.p_max &&
              ranges.l2_min >= 0 && ranges.l2_min <= ranges.l2_max &&
              ranges.l_min >= 0 && ranges.l_min <= ranges.l_max,
          ErrorCode::DimensionMismatch, "dimension ranges are empty or negative");
  TrialDims dims;
  dims.p = uniform_int(rng, ranges.p_min, ranges.p_max);
  for (int i = 0; i < dims.p; ++i) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < 0.4)
      ++dims.p3;
    else if (u < 0.7)
      ++dims.p2;
    else
      ++dims.p1;
  }
  // Demote channels until the structural minimum fits the latent budget.
  while (2 * dims.p1 + dims.p2 > ranges.l_max) {
    if (dims.p1 > 0) {
      --dims.p1;
      ++dims.p2;
    } else {
      --dims.p2;
      ++dims.p3;
    }
  }
  int base = 2 * dims.p1 + dims.p2;
  int cap = ranges.l_max - base;
  int lo = std::min(std::max(ranges.l2_min, ranges.l_min - base), cap);
  int hi = std::min(ranges.l2_max, cap);
  if (lo > hi) lo = hi;
  dims.l2 = uniform_int(rng, lo, hi);
  dims.l = base + dims.l2;
  return dims;
}

StateSpace random_system(const TrialDims& dims, std::mt19937_64& rng, const Tolerances& tol) {
  require(dims.p >= 1 && dims.p1 >= 0 && dims.p2 >= 0 && dims.p3 >= 0 &&
              dims.p1 + dims.p2 + dims.p3 == dims.p && dims.l2 >= 0 &&
              dims.l == 2 * dims.p1 + dims.p2 + dims.l2,
          ErrorCode::DimensionMismatch, "inconsistent dimension tuple");
  for (int attempt = 0; attempt < 100; ++attempt) {
    StateSpace sys = build_candidate(dims, rng);
    if (validate_assumptions(sys, tol).all()) return sys;
  }
  throw Error(ErrorCode::GenerationExhausted,
              "no valid system found in 100 attempts at the requested dimensions");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  require(cfg.trials >= 0, ErrorCode::DimensionMismatch, "trial count must be nonnegative");
  require(cfg.max_are_dim >= 0, ErrorCode::DimensionMismatch,
          "max_are_dim must be nonnegative");

  ExperimentResult result;
  result.records.resize(static_cast<std::size_t>(cfg.trials));

  auto run_trial = [&cfg, &result](int trial) {
    TrialRecord& rec = result.records[static_cast<std::size_t>(trial)];
    rec.trial = trial;
    rec.seed = derive_trial_seed(cfg.seed, trial);
    std::mt19937_64 rng(rec.seed);
    try {
      rec.dims = draw_dims(cfg.dims, rng);
      if (rec.dims.l2 > cfg.max_are_dim) {
        rec.status = TrialStatus::Skipped;
        return;
      }
      StateSpace sys = random_system(rec.dims, rng, cfg.tolerances);
      auto start = std::chrono::steady_clock::now();
      NetworkSolutionSet set = enumerate_equivalent_networks(sys, cfg.tolerances);
      auto stop = std::chrono::steady_clock::now();
      rec.wall_time = std::chrono::duration<double>(stop - start).count();
      if (set.kind == SetKind::Continuum) {
        rec.status = TrialStatus::Continuum;
        return;
      }
      rec.status = TrialStatus::Ok;
      rec.are_count = set.are_count;
      rec.admissible_count = set.admissible_count;
      rec.diagonal_count = set.diagonal_count;
    } catch (const std::exception& ex) {
      rec.status = TrialStatus::Failed;
      rec.error = ex.what();
    }
  };

  if (cfg.mode == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < cfg.trials; ++trial) run_trial(trial);
  } else {
    for (int trial = 0; trial < cfg.trials; ++trial) run_trial(trial);
  }

  std::map<int, StratumSummary> strata;
  for (const TrialRecord& rec : result.records) {
    StratumSummary& s = strata[rec.dims.l2];
    s.l2 = rec.dims.l2;
    ++s.trials;
    switch (rec.status) {
      case TrialStatus::Ok:
        ++s.ok;
        s.mean_are += rec.are_count;
        s.mean_admissible += rec.admissible_count;
        s.mean_diagonal += rec.diagonal_count;
        break;
      case TrialStatus::Continuum: ++s.continuum; break;
      case TrialStatus::Skipped: ++s.skipped; break;
      case TrialStatus::Failed: ++s.failed; break;
    }
  }
  for (auto& [l2, s] : strata) {
    if (s.ok > 0) {
      s.mean_are /= s.ok;
      s.mean_admissible /= s.ok;
      s.mean_diagonal /= s.ok;
    }
    result.summary.push_back(s);
  }
  return result;
}

void write_trials_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << "trial,p,l,l2,p1,p2,p3,status,are_count,admissible_count,diagonal_count,"
         "wall_time,seed\n";
  for (const TrialRecord& rec : records) {
    out << rec.trial << ',' << rec.dims.p << ',' << rec.dims.l << ',' << rec.dims.l2 << ','
        << rec.dims.p1 << ',' << rec.dims.p2 << ',' << rec.dims.p3 << ','
        << trial_status_name(rec.status) << ',' << rec.are_count << ','
        << rec.admissible_count << ',' << rec.diagonal_count << ',' << rec.wall_time << ','
        << rec.seed << '\n';
  }
}

void write_summary_csv(const std::vector<StratumSummary>& summary, std::ostream& out) {
  out << "l2,trials,ok,continuum,skipped,failed,mean_are,mean_admissible,mean_diagonal\n";
  for (const StratumSummary& s : summary) {
    out << s.l2 << ',' << s.trials << ',' << s.ok << ',' << s.continuum << ',' << s.skipped
        << ',' << s.failed << ',' << s.mean_are << ',' << s.mean_admissible << ','
        << s.mean_diagonal << '\n';
  }
}

}  // namespace netfactor
