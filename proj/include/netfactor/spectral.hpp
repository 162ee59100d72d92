#pragma once

#include <string>
#include <utility>
#include <vector>

#include "netfactor/statespace.hpp"

namespace netfactor {

// Output spectral density held through a stable generator realization,
// evaluated on the imaginary axis as Phi(iw) = G(iw) G(iw)^H.
struct SpectralDensity {
  StateSpace generator;
  int p_count = 0;

  ComplexMatrix at(double omega) const;
};

// Positive-real summand Z with Z(iw) + Z(iw)^H = Phi(iw); sys carries
// (A, B_z, C, D_z).
struct PositiveRealSystem {
  StateSpace sys;

  ComplexMatrix at(double omega) const;
};

// Wraps a Hurwitz system as the generator of its output spectral density.
SpectralDensity spectral_density_of(const StateSpace& sys);

// Builds the positive-real summand with B_z = R_c C^T, where R_c is the
// controllability gramian of (A, B), and D_z = 0.
PositiveRealSystem positive_real_realization(const StateSpace& sys);

// True iff both output spectral densities agree at every sampled frequency:
// ||Phi1(iw) - Phi2(iw)||_F <= tol * (1 + ||Phi1(iw)||_F).
bool phi_equal(const StateSpace& s1, const StateSpace& s2,
               const FrequencyGrid& grid = FrequencyGrid{}, double tol = 1e-6,
               Execution mode = Execution::Parallel);

// Labeled Frobenius residuals of a set of verification relations; pass is
// true when every residual is at or below tol.
struct ResidualReport {
  std::vector<std::pair<std::string, double>> entries;
  double tol = 0.0;
  bool pass = false;

  double worst() const;
  double value(const std::string& name) const;
};

// Residuals of the five relations tying two equal-spectral-density
// realizations together through the pair (s, t), with t mapping the second
// basis into the first:
//   state:       a2 - t^-1 a t
//   output:      c2 - c t
//   covariance:  s a^T + a s + b b^T - t b2 b2^T t^T
//   cross:       s c^T + b d^T - t b2 d2^T
//   feedthrough: d d^T - d2 d2^T
ResidualReport verify_glover_willems(const StateSpace& sys, const StateSpace& sys2,
                                     const Matrix& s, const Matrix& t, double tol);

}  // namespace netfactor
