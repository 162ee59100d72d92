#include "netfactor/rational.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace netfactor {

Complex poly_eval(const Vector& coeffs, Complex s) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) acc = acc * s + coeffs(i);
  return acc;
}

Vector poly_mul(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) return Vector(0);
  Vector out = Vector::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out(i + j) += a(i) * b(j);
  return out;
}

Vector poly_add(const Vector& a, const Vector& b) {
  Eigen::Index n = std::max(a.size(), b.size());
  Vector out = Vector::Zero(n);
  out.tail(a.size()) += a;
  out.tail(b.size()) += b;
  return out;
}

Vector poly_trim(const Vector& coeffs, double rel_tol) {
  if (coeffs.size() == 0) return coeffs;
  double scale = coeffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Vector::Zero(1);
  Eigen::Index first = 0;
  while (first < coeffs.size() - 1 && std::abs(coeffs(first)) <= rel_tol * scale) ++first;
  return coeffs.tail(coeffs.size() - first).eval();
}

Vector poly_from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> acc = {Complex(1.0, 0.0)};
  for (const Complex& r : roots) {
    std::vector<Complex> next(acc.size() + 1, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] * r;
    }
    acc = std::move(next);
  }
  Vector out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out(i) = acc[i].real();
  return out;
}

std::vector<Complex> poly_roots(const Vector& coeffs) {
  Vector p = poly_trim(coeffs);
  Eigen::Index deg = p.size() - 1;
  if (deg <= 0) return {};
  Matrix companion = Matrix::Zero(deg, deg);
  for (Eigen::Index i = 0; i + 1 < deg; ++i) companion(i + 1, i) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) companion(i, deg - 1) = -p(deg - i) / p(0);
  // Column-companion layout: characteristic polynomial equals p up to scale.
  Eigen::EigenSolver<Matrix> eig(companion);
  require(eig.info() == Eigen::Success, ErrorCode::EigensolverFailure, "companion eigensolver failed");
  std::vector<Complex> roots;
  for (Eigen::Index i = 0; i < deg; ++i) roots.push_back(eig.eigenvalues()(i));
  return roots;
}

double normalized_resultant(const Vector& a_in, const Vector& b_in) {
  Vector a = poly_trim(a_in), b = poly_trim(b_in);
  if (a.cwiseAbs().maxCoeff() == 0.0 || b.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::Index m = a.size() - 1, n = b.size() - 1;
  if (m == 0 || n == 0) return 1.0;  // a nonzero constant is coprime to anything
  Matrix syl = Matrix::Zero(m + n, m + n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= m; ++j) syl(i, i + j) = a(j);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= n; ++j) syl(n + i, i + j) = b(j);
  double det = syl.fullPivLu().determinant();
  double scale = std::pow(a.cwiseAbs().maxCoeff(), n) * std::pow(b.cwiseAbs().maxCoeff(), m);
  return scale > 0 ? std::abs(det) / scale : 0.0;
}

Complex rational_eval(const Rational& r, Complex s) {
  return poly_eval(r.num, s) / poly_eval(r.den, s);
}

Rational make_monic(const Rational& r) {
  Rational out{poly_trim(r.num), poly_trim(r.den)};
  double lead = out.den(0);
  require(std::abs(lead) > 0, ErrorCode::ParseError, "zero denominator");
  out.num /= lead;
  out.den /= lead;
  return out;
}

Rational cancel_common_factors(const Rational& r, double tol) {
  Vector num = poly_trim(r.num), den = poly_trim(r.den);
  if (num.size() <= 1 || den.size() <= 1) return make_monic({num, den});
  std::vector<Complex> nr = poly_roots(num);
  std::vector<Complex> dr = poly_roots(den);
  double scale = 1.0;
  for (const Complex& z : dr) scale = std::max(scale, std::abs(z));
  std::vector<bool> keep_d(dr.size(), true);
  std::vector<bool> keep_n(nr.size(), true);
  for (std::size_t i = 0; i < nr.size(); ++i) {
    for (std::size_t j = 0; j < dr.size(); ++j) {
      if (keep_d[j] && std::abs(nr[i] - dr[j]) <= tol * scale) {
        keep_n[i] = false;
        keep_d[j] = false;
        break;
      }
    }
  }
  std::vector<Complex> nkeep, dkeep;
  for (std::size_t i = 0; i < nr.size(); ++i)
    if (keep_n[i]) nkeep.push_back(nr[i]);
  for (std::size_t j = 0; j < dr.size(); ++j)
    if (keep_d[j]) dkeep.push_back(dr[j]);
  double ngain = num(0), dgain = den(0);
  Rational out{ngain * poly_from_roots(nkeep), dgain * poly_from_roots(dkeep)};
  return make_monic(out);
}

Rational transfer_function_siso(const Matrix& a, const Vector& b, const RowVector& c, double d) {
  const Eigen::Index n = a.rows();
  // Faddeev-LeVerrier: adj(sI - A) = sum_k M_k s^{n-1-k} with
  // M_0 = I, a_k = -tr(A M_{k-1})/k, M_k = A M_{k-1} + a_k I.
  Vector den(n + 1);
  den(0) = 1.0;
  Vector num_sp = Vector::Zero(n);  // strictly proper part coefficients
  Matrix m = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    num_sp(k - 1) = c.dot(m * b);
    Matrix am = a * m;
    double ak = -am.trace() / static_cast<double>(k);
    den(k) = ak;
    m = am + ak * Matrix::Identity(n, n);
  }
  Vector num = poly_add(num_sp, d * den);
  return {poly_trim(num), den};
}

namespace {

std::string format_coeff(double v, int precision) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

}  // namespace

std::string poly_to_string(const Vector& coeffs_in, int precision) {
  Vector coeffs = poly_trim(coeffs_in);
  const Eigen::Index deg = coeffs.size() - 1;
  if (deg < 0) return "0";
  double scale = coeffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) return "0";
  std::ostringstream os;
  bool first = true;
  for (Eigen::Index i = 0; i <= deg; ++i) {
    double v = coeffs(i);
    if (std::abs(v) <= 1e-12 * scale) continue;
    Eigen::Index power = deg - i;
    if (first) {
      if (v < 0) os << "-";
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    double mag = std::abs(v);
    bool unit = std::abs(mag - 1.0) < 1e-12;
    if (power == 0) {
      os << format_coeff(mag, precision);
    } else {
      if (!unit) os << format_coeff(mag, precision) << " ";
      os << "s";
      if (power > 1) os << "^" << power;
    }
    first = false;
  }
  return first ? "0" : os.str();
}

std::string rational_to_string(const Rational& r, int precision) {
  return "(" + poly_to_string(r.num, precision) + ")/(" + poly_to_string(r.den, precision) + ")";
}

}  // namespace netfactor
