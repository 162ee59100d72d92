#pragma once

#include "netfactor/types.hpp"

namespace netfactor {

// Solves a X + X a^T + q = 0 for symmetric X via complex Schur reduction
// (Bartels-Stewart). Requires that no two eigenvalues of a sum to zero.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

// True iff m is symmetric (within tol-scaled asymmetry) with smallest
// eigenvalue strictly above tol. Throws NotSymmetric on gross asymmetry.
bool is_positive_definite(const Matrix& m, double tol);

// Coefficients of X a + a^T X + quadratic_sign * X g X + q = 0.
struct AreProblem {
  Matrix a;
  Matrix g;  // symmetric PSD
  Matrix q;  // symmetric
  int quadratic_sign = -1;

  int dim() const { return static_cast<int>(a.rows()); }
};

enum class SetKind { Finite, Continuum };

struct AreSolutionSet {
  SetKind kind = SetKind::Finite;
  std::vector<Matrix> solutions;  // empty when Continuum
  std::vector<Complex> hamiltonian_eigenvalues;
};

// Enumerates every real symmetric solution by walking the conjugation-closed
// n-dimensional invariant subspaces of the 2n x 2n Hamiltonian
//   H = [[A, sign*G], [-Q, -A^T]].
// Eigenvalues with geometric multiplicity one contribute Jordan-chain
// prefixes; any higher geometric multiplicity means a solution continuum.
AreSolutionSet enumerate_are_solutions(const AreProblem& p, double tol, int max_dim = 12,
                                       Execution mode = Execution::Parallel);

// Residual of a candidate ARE solution, for diagnostics and tests.
double are_residual(const AreProblem& p, const Matrix& x);

// Numerical rank: singular values above rel_tol * sigma_max * max(rows, cols).
int matrix_rank(const Matrix& m, double rel_tol);

}  // namespace netfactor
