#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately naive: dense Kronecker solves, closed-form
// scalar roots, direct frequency sweeps. Slow but simple enough to trust.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "netfactor/statespace.hpp"

namespace oracles {

using netfactor::Complex;
using netfactor::ComplexMatrix;
using netfactor::Matrix;
using netfactor::StateSpace;
using netfactor::Vector;

// Solves a x + x a^T + q = 0 through the n^2 x n^2 Kronecker system
// (I (x) a + a (x) I) vec(x) = -vec(q), column-major vec.
inline Matrix kron_lyapunov(const Matrix& a, const Matrix& q) {
  const int n = static_cast<int>(a.rows());
  Matrix big = Matrix::Zero(n * n, n * n);
  Matrix eye = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          // vec index of entry (row, col) is col * n + row.
          big(j * n + i, m * n + k) += eye(j, m) * a(i, k) + a(j, m) * eye(i, k);
        }
  Eigen::VectorXd rhs(n * n);
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < n; ++row) rhs(col * n + row) = -q(row, col);
  Eigen::VectorXd sol = big.fullPivLu().solve(rhs);
  Matrix x(n, n);
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < n; ++row) x(row, col) = sol(col * n + row);
  return x;
}

// Real roots of 2 a x + sign g x^2 + q = 0, ascending. Empty when the
// discriminant is negative; a single root when the equation is linear.
inline std::vector<double> scalar_are_roots(double a, double g, double q, int sign) {
  std::vector<double> roots;
  double quad = sign * g;
  if (std::abs(quad) < 1e-300) {
    if (std::abs(a) > 1e-300) roots.push_back(-q / (2.0 * a));
    return roots;
  }
  double disc = 4.0 * a * a - 4.0 * quad * q;
  if (disc < 0.0) return roots;
  double root_disc = std::sqrt(disc);
  roots.push_back((-2.0 * a - root_disc) / (2.0 * quad));
  roots.push_back((-2.0 * a + root_disc) / (2.0 * quad));
  std::sort(roots.begin(), roots.end());
  if (std::abs(roots[0] - roots[1]) < 1e-12) roots.pop_back();
  return roots;
}

// Frequency-sweep diagonality test of V(s) = B1 + A12 (sI - A22)^{-1} B2:
// true iff every off-diagonal entry stays below tol * scale across the grid.
inline bool v_diagonal_grid(const netfactor::PartitionedSystem& part, double tol) {
  const int p = static_cast<int>(part.manifest());
  const int l = static_cast<int>(part.latent());
  const int m = static_cast<int>(part.inputs());
  double scale = 1.0 + part.b1.norm() + part.a12.norm() * part.b2.norm();
  std::vector<double> omegas;
  for (int k = 0; k < 60; ++k)
    omegas.push_back(std::pow(10.0, -2.0 + 4.0 * k / 59.0));
  for (double omega : omegas) {
    ComplexMatrix v = part.b1.cast<Complex>();
    if (l > 0) {
      ComplexMatrix res = (Complex(0.0, omega) * ComplexMatrix::Identity(l, l) -
                           part.a22.cast<Complex>())
                              .lu()
                              .solve(part.b2.cast<Complex>());
      v += part.a12.cast<Complex>() * res;
    }
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j && std::abs(v(i, j)) > tol * scale) return false;
  }
  return true;
}

inline Matrix random_gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

// Random matrix shifted so every eigenvalue real part is at most -margin.
inline Matrix random_hurwitz(std::mt19937_64& rng, int n, double margin) {
  Matrix a = random_gaussian(rng, n, n);
  Eigen::EigenSolver<Matrix> eig(a);
  a -= (eig.eigenvalues().real().maxCoeff() + margin) * Matrix::Identity(n, n);
  return a;
}

// Two-manifest, one-latent benchmark system: the smallest example with a
// second equal-density network.
inline StateSpace sys_2d() {
  StateSpace sys;
  sys.a = Matrix{{-1.0, 0.0, 4.0}, {0.0, -2.0, 5.0}, {-6.0, 0.0, -3.0}};
  sys.b = Matrix{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
  sys.c = Matrix{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  sys.d = Matrix::Zero(2, 2);
  return sys;
}

// The unique second network sharing sys_2d's output spectral density, in
// exact arithmetic: A' = T^{-1} A T with T the certificate below.
inline StateSpace sys_second_exact() {
  StateSpace sys = sys_2d();
  sys.a = Matrix{{-137.0 / 41.0, -120.0 / 41.0, 4.0},
                 {-120.0 / 41.0, -232.0 / 41.0, 5.0},
                 {-342.0 / 41.0, -150.0 / 41.0, 3.0}};
  return sys;
}

// Exact certificate pair linking sys_2d to sys_second_exact.
inline Matrix cert_t_exact() {
  return Matrix{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {-24.0 / 41.0, -30.0 / 41.0, 1.0}};
}

inline Matrix cert_s_exact() {
  Matrix s = Matrix::Zero(3, 3);
  s(2, 2) = -6.0 / 41.0;
  return s;
}

// sys_2d with a noise source on every state: the non-identifiable case.
inline StateSpace sys_fullnoise() {
  StateSpace sys = sys_2d();
  sys.b = Matrix::Identity(3, 3);
  sys.d = Matrix::Zero(2, 3);
  return sys;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace oracles
