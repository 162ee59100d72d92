#pragma once

#include "netfactor/types.hpp"

namespace netfactor {

// Continuous-time LTI system dx = Ax + Bu, y = Cx + Du.
struct StateSpace {
  Matrix a;
  Matrix b;
  Matrix c;
  Matrix d;

  Eigen::Index order() const { return a.rows(); }
  Eigen::Index inputs() const { return b.cols(); }
  Eigen::Index outputs() const { return c.rows(); }
};

// Throws DimensionMismatch / NonFiniteEntries on malformed systems.
void check_dimensions(const StateSpace& sys);

// State split into p manifest and l latent coordinates, with the output
// reading the manifest block directly: c = [I 0], d = 0.
struct PartitionedSystem {
  Matrix a11;  // p x p
  Matrix a12;  // p x l
  Matrix a21;  // l x p
  Matrix a22;  // l x l
  Matrix b1;   // p x m
  Matrix b2;   // l x m

  Eigen::Index manifest() const { return a11.rows(); }
  Eigen::Index latent() const { return a22.rows(); }
  Eigen::Index inputs() const { return b1.cols(); }

  StateSpace assemble() const;
};

// Splits a system whose output matrix is [I 0] with d = 0 into blocks.
// Throws ShapeViolation when the output shape is not of that form.
PartitionedSystem partition(const StateSpace& sys, double shape_tol = 1e-8);

// Controllable-canonical-form realization of a strictly proper SISO
// transfer function: alpha companion, beta = [0,...,0,1]^T.
struct SisoRealization {
  Matrix alpha;
  Vector beta;
  RowVector gamma;
  int r = 0;
};

struct AssumptionReport {
  bool hurwitz = false;
  bool minimal = false;
  bool c_is_identity_zero = false;
  bool d_is_zero = false;
  bool p_diagonal = false;

  bool all() const { return hurwitz && minimal && c_is_identity_zero && d_is_zero && p_diagonal; }
};

// Checks stability, joint controllability/observability, output shape
// c = [I 0] with d = 0, and diagonality of the noise-to-output map.
AssumptionReport validate_assumptions(const StateSpace& sys, const Tolerances& tol = default_tolerances());

// [B, AB, ..., A^{n-1}B], n x (n m).
Matrix controllability_matrix(const Matrix& a, const Matrix& b);
// [C; CA; ...; CA^{n-1}], (n p) x n.
Matrix observability_matrix(const Matrix& a, const Matrix& c);

// Change of state coordinates x -> Tx: returns (TAT^{-1}, TB, CT^{-1}, D).
// Throws SingularTransformation when t is numerically rank deficient.
StateSpace apply_transformation(const StateSpace& sys, const Matrix& t,
                                const Tolerances& tol = default_tolerances());

// G(s) = C (sI - A)^{-1} B + D by linear solve. Throws PoleHit when
// sI - A is numerically singular.
ComplexMatrix frequency_response(const StateSpace& sys, Complex s,
                                 const Tolerances& tol = default_tolerances());

// Finite generalized eigenvalues of the Rosenbrock pencil
// [[A - sI, B], [C, D]]; eigenvalues beyond the infinite-magnitude cutoff
// are discarded. Throws NonSquare unless p = m.
std::vector<Complex> transmission_zeros(const StateSpace& sys,
                                        const Tolerances& tol = default_tolerances());

// True iff every transmission zero satisfies Re(s) < tol.
bool is_minimum_phase(const StateSpace& sys, double tol = 0.0,
                      const Tolerances& num_tol = default_tolerances());

// Companion-form realization of num/den (descending coefficients).
// Requires deg(num) < deg(den) and coprimality; the denominator is made
// monic first. Throws ImproperFraction / NotCoprime.
SisoRealization realize_siso_controllable(const Vector& num, const Vector& den,
                                          double coprime_tol = 1e-8);

}  // namespace netfactor
