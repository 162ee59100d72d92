#pragma once

#include <string>
#include <vector>

#include "netfactor/dsf.hpp"
#include "netfactor/numerics.hpp"
#include "netfactor/spectral.hpp"

namespace netfactor {

// Witness (s, t, j) tying a candidate realization to a reference realization
// with equal output spectral density, in the convention a_cand = t^-1 a_ref t;
// j is the signed identity acting on the noise channels.
struct EquivalenceCertificate {
  Matrix s;
  Matrix t;
  Matrix j;
  ResidualReport residuals;
};

struct NetworkSolution {
  StateSpace sys;
  Dsf dsf;
  EquivalenceCertificate certificate;
  // Worst off-diagonal Markov-parameter residual of the noise filter after
  // the diagonalizing search; zero when the filter is exactly diagonal.
  double p_offdiagonal = 0.0;
  // Latent covariance completion behind this factor; filled by the
  // reconstruction path, empty when enumeration produced the solution.
  Matrix r2;
};

// Every enumerated network sharing one output spectral density, together
// with the funnel counts: symmetric Riccati solutions, solutions passing the
// structural admissibility filter, and solutions realizing a diagonal noise
// filter. diagonal_count <= admissible_count <= are_count on every run.
struct NetworkSolutionSet {
  std::vector<NetworkSolution> solutions;
  SetKind kind = SetKind::Finite;
  int are_count = 0;
  int admissible_count = 0;
  int diagonal_count = 0;
  // Realization every certificate verifies against; solutions share its
  // state basis and channel order.
  StateSpace reference;
  // Channel relabeling applied to the input: reference channel k carries
  // input channel order[k].
  std::vector<int> order;
  std::vector<std::string> notes;
};

// Builds the homogeneous Riccati problem whose symmetric solutions
// parameterize all equal-spectral-density networks of the given canonical
// system: a = alpha44^T, g = bbar bbar^T with
// bbar = [gamma34^T b22^-T, alpha14^T, alpha24^T, alpha34^T], q = 0.
// Controllability of (a, bbar) is asserted; failure signals an upstream
// minimality defect.
AreProblem equivalence_riccati(const PDiagForm2& f2);

// Enumerates every network with the same output spectral density as sys:
// canonical form, Riccati enumeration, structural filter, witness
// construction, then a diagonalizing search over the residual freedom.
// Every emitted member passes phi_equal against the reference.
NetworkSolutionSet enumerate_equivalent_networks(const StateSpace& sys,
                                                 const Tolerances& tol = default_tolerances());

// Constructive path from a positive-real summand Z with invertible manifest
// gain: re-realizes to c = [I 0], factors the manifest noise gain with
// positive signs, enumerates the filter Riccati equation, keeps candidates
// with positive-definite covariance, and applies the latent shear that zeroes
// the latent noise block so every emitted network has a diagonal noise
// filter by construction.
NetworkSolutionSet reconstruct_from_phi(const PositiveRealSystem& z,
                                        const Tolerances& tol = default_tolerances());

// Index of the unique minimum-phase member of a finite solution set.
int classify_minimum_phase_solution(const NetworkSolutionSet& set);

// Residuals of the four equal-spectral-density relations for systems whose
// every state carries its own noise source (b = blkdiag(b11, b22), both
// square diagonal full rank), evaluated with witnesses (s2, t):
//   state:     a2 - t^-1 a t
//   gain:      b11' b11'^T - b11 b11^T
//   coupling:  t1 - s2 a12^T b11^-2
//   riccati:   s2 abar + abar^T s2 - s2 bbar bbar^T s2 + qbar
ResidualReport full_noise_verify(const StateSpace& sys_a, const StateSpace& sys_b,
                                 const Matrix& s2, const Matrix& t, double tol);

struct FullNoiseSample {
  double theta = 0.0;
  StateSpace sys;
  Dsf dsf;
  EquivalenceCertificate certificate;
};

// One-parameter family of equal-spectral-density networks for a full-noise
// system with a single latent state; theta_min/theta_max bound the closed
// admissible interval where the latent gain stays real.
struct FullNoiseFamily {
  double theta_min = 0.0;
  double theta_max = 0.0;
  std::vector<FullNoiseSample> samples;
  std::vector<std::string> notes;
};

// Emits the transformed network for every admissible requested theta; each
// emission passes full_noise_verify and phi_equal against the input.
FullNoiseFamily full_noise_scalar_family(const StateSpace& sys,
                                         const std::vector<double>& theta_samples);

}  // namespace netfactor
