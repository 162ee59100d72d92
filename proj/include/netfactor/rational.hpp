#pragma once

#include "netfactor/types.hpp"

namespace netfactor {

// Scalar rational function in s. Coefficients are stored in descending
// powers; a canonical value keeps the denominator monic.
struct Rational {
  Vector num;
  Vector den;
};

Complex poly_eval(const Vector& coeffs, Complex s);
Vector poly_mul(const Vector& a, const Vector& b);
Vector poly_add(const Vector& a, const Vector& b);
// Drops leading coefficients below rel_tol times the largest magnitude.
Vector poly_trim(const Vector& coeffs, double rel_tol = 1e-10);
// Real coefficients from a conjugate-closed root list.
Vector poly_from_roots(const std::vector<Complex>& roots);
std::vector<Complex> poly_roots(const Vector& coeffs);
// Sylvester resultant, normalized by coefficient magnitudes so a unit-scale
// threshold decides coprimality.
double normalized_resultant(const Vector& a, const Vector& b);

Complex rational_eval(const Rational& r, Complex s);
// Divides out numerator/denominator root pairs closer than tol.
Rational cancel_common_factors(const Rational& r, double tol = 1e-7);
// Scales so the denominator is monic.
Rational make_monic(const Rational& r);

// Transfer function of a SISO realization by the Faddeev-LeVerrier
// resolvent expansion: det(sI - A) and c adj(sI - A) b + d det(sI - A).
Rational transfer_function_siso(const Matrix& a, const Vector& b, const RowVector& c, double d);

// Human-readable "(3 s + 1)/(s^2 + 4 s + 27)" rendering.
std::string rational_to_string(const Rational& r, int precision = 4);
std::string poly_to_string(const Vector& coeffs, int precision = 4);

}  // namespace netfactor
