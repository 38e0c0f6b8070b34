#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "optdesign/model.hpp"

namespace optdesign {

/// Matrix-mean criterion phi_p with p in [-inf, 1].
struct Criterion {
  double p = 0.0;

  static Criterion D() { return {0.0}; }
  static Criterion A() { return {-1.0}; }
  static Criterion E() { return {-std::numeric_limits<double>::infinity()}; }
  static Criterion T() { return {1.0}; }
  static Criterion with_p(double p);
  /// "D", "A", "E", "T" or "p:<real>" ("p:-inf" is E).
  static Criterion parse(const std::string& text);

  bool is_D() const { return p == 0.0; }
  bool is_E() const { return std::isinf(p); }
  /// Canonical name: D, A, E, T or p:<value>.
  std::string name() const;
  /// Conjugate exponent q = p / (p - 1) of the polar function.
  double conjugate() const;
};

/// phi_p(M). Returns 0 for singular M when p <= 0.
double phi(const Criterion& c, const Matrix& m);

/// Polar function s * phi_q(N), q the conjugate exponent.
double polar(const Criterion& c, const Matrix& n);

/// Relative spectral gap below which the smallest eigenvalue counts as multiple.
inline constexpr double kEigenMultiplicityGap = 1e-8;

/// True when M is numerically singular (smallest eigenvalue <= 1e-14 * largest).
bool is_singular(const Matrix& m);

/// Dual matrix N from M alone: M^{p-1} / trace(M^p) for finite p and
/// z z^T / lambda_min for E with a simple smallest eigenvalue. Throws
/// ValidationError for singular M and for E with a multiple smallest
/// eigenvalue (that case needs the candidate set, see build_certificate).
Matrix dual_matrix(const Criterion& c, const Matrix& m);

/// f(x)^T N f(x) with N = dual_matrix(c, M).
double sensitivity(const Criterion& c, const Matrix& m, const Regression& f, const Point& x);

}  // namespace optdesign
