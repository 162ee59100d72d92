#pragma once

#include "netfactor/rational.hpp"
#include "netfactor/statespace.hpp"

namespace netfactor {

// Dynamical structure function (Q, P): hollow Q couples manifest signals,
// diagonal P maps inputs to manifest signals. Both are carried as exact
// state-space realizations; rational displays are derived on demand.
struct Dsf {
  StateSpace q_realization;  // p outputs, p inputs
  StateSpace p_realization;  // p outputs, m inputs
  Eigen::Index p_count = 0;
  std::string meta;
};

// Realizations (A22, A21, A12, A11) of W and (A22, B2, A12, B1) of V, the
// manifest-feedback and input-to-manifest maps after eliminating the
// latent states: s y = W(s) y + V(s) u.
std::pair<StateSpace, StateSpace> compute_wv(const PartitionedSystem& part);

// Builds (Q, P) from a system with c = [I 0], d = 0. W_D is the diagonal
// of W realized channel by channel; Q = (sI-W_D)^{-1}(W-W_D) and
// P = (sI-W_D)^{-1}V are assembled as feedback-series realizations.
Dsf compute_dsf(const StateSpace& sys);

// True iff B1 and A12 A22^k B2 (k = 0..l-1) have all off-diagonal entries
// within tol; equivalent to V(s) diagonal.
bool is_v_diagonal(const PartitionedSystem& part, double tol);

// Frequency-domain comparison of two structure functions over a grid.
bool dsf_equal(const Dsf& d1, const Dsf& d2, const FrequencyGrid& grid = FrequencyGrid{},
               double tol = 1e-6);

// Relabels manifest variables and inputs jointly: new channel k is old
// channel order[k]. Requires c = [I 0], d = 0; the result keeps that shape.
StateSpace permute_manifest(const StateSpace& sys, const std::vector<int>& order);

// Entry (row, col) of the transfer matrix as a reduced rational function.
Rational transfer_entry(const StateSpace& sys, Eigen::Index row, Eigen::Index col,
                        double cancel_tol = 1e-6);

// Relative degree of each V(i,i) from its Markov parameters; 0 means a
// nonzero feedthrough B1(i,i). Throws NonMinimalV when a channel is
// identically zero.
std::vector<int> v_relative_degrees(const PartitionedSystem& part, double rel_tol = 1e-7);

// First canonical form: manifest channels ordered by relative degree
// (descending groups: >1, =1, =0), latent space split into stacked
// controllable-canonical chains realizing the strictly proper V(i,i)
// and an undriven remainder, giving
//   [A12|B1; A22|B2] = [[c^,0|0,0],[0,x|0,B22]; [a^,x|b^,0],[0,x|0,0]].
struct Form1Result {
  StateSpace sys;
  Matrix t;                 // state transformation on the relabeled system
  std::vector<int> order;   // order[new_channel] = original channel
  int p11 = 0;              // channels with strictly proper V(i,i)
  int p22 = 0;              // channels with static V(i,i)
  std::vector<int> r_list;       // chain length per p11 channel
  std::vector<int> rel_degrees;  // per relabeled channel
};

Form1Result to_pdiag_form1(const StateSpace& sys, const Tolerances& tol = default_tolerances());

// Second canonical form: latent coordinates regrouped into directly driven
// states (z1, z2), directly observed states (z3) and the remainder (z4),
// sized p1, p2, p1 and l2 = l - 2 p1 - p2.
struct PDiagForm2 {
  PartitionedSystem sys;
  Matrix t;                // state transformation on the relabeled system
  std::vector<int> order;  // order[new_channel] = original channel
  int p1 = 0;              // relative degree > 1
  int p2 = 0;              // relative degree = 1
  int p3 = 0;              // relative degree = 0
  int l2 = 0;
  std::vector<int> k_list;  // per p1 row: first power of A22 reaching z1

  Matrix gamma22() const { return sys.a12.block(p1, p1, p2, p2); }
  Matrix gamma34() const { return sys.a12.block(p1 + p2, 2 * p1 + p2, p3, l2); }
  Matrix b22() const { return sys.b1.block(p1 + p2, p1 + p2, p3, p3); }
  Matrix alpha14() const { return sys.a22.block(0, 2 * p1 + p2, p1, l2); }
  Matrix alpha24() const { return sys.a22.block(p1, 2 * p1 + p2, p2, l2); }
  Matrix alpha31() const { return sys.a22.block(p1 + p2, 0, p1, p1); }
  Matrix alpha34() const { return sys.a22.block(p1 + p2, 2 * p1 + p2, p1, l2); }
  Matrix alpha44() const { return sys.a22.block(2 * p1 + p2, 2 * p1 + p2, l2, l2); }
};

PDiagForm2 to_pdiag_form2(const StateSpace& sys, const Tolerances& tol = default_tolerances());

}  // namespace netfactor
