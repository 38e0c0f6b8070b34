#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerical code paths beyond evaluating f.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "optdesign/design.hpp"

namespace oracle {

using optdesign::Matrix;
using optdesign::Point;
using optdesign::Vector;

inline Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double v : xs) p(i++) = v;
  return p;
}

/// Sum of w f f^T by explicit loops.
inline Matrix info_matrix(const std::vector<Point>& xs, const std::vector<double>& ws,
                          const optdesign::Regression& f) {
  Matrix m = Matrix::Zero(f.k(), f.k());
  for (size_t l = 0; l < xs.size(); ++l) {
    const Vector v = f(xs[l]);
    for (int i = 0; i < f.k(); ++i) {
      for (int j = 0; j < f.k(); ++j) m(i, j) += ws[l] * v(i) * v(j);
    }
  }
  return m;
}

/// Eigenvalues of a symmetric PSD matrix through the SVD.
inline Vector psd_eigenvalues(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues(); }

/// Matrix mean straight from its definition.
inline double phi(double p, const Matrix& m) {
  const Vector ev = psd_eigenvalues(m);
  const double s = static_cast<double>(ev.size());
  if (std::isinf(p)) return ev.minCoeff();
  if (p == 0.0) return std::exp(ev.array().log().sum() / s);
  return std::pow(ev.array().pow(p).sum() / s, 1.0 / p);
}

/// Polar function s * phi_q with q = p / (p - 1).
inline double polar(double p, const Matrix& n) {
  const double s = static_cast<double>(n.rows());
  if (std::isinf(p)) return s * phi(1.0, n);
  if (p == 0.0) return s * phi(0.0, n);
  if (p == 1.0) return s * phi(-std::numeric_limits<double>::infinity(), n);
  return s * phi(p / (p - 1.0), n);
}

/// Directional derivative of log phi(M) toward f f^T by central differences.
inline double fd_sensitivity(double p, const Matrix& m, const Vector& f, double h = 1e-6) {
  const Matrix dir = f * f.transpose() - m;
  return (std::log(phi(p, m + h * dir)) - std::log(phi(p, m - h * dir))) / (2.0 * h) + 1.0;
}

/// Plain multiplicative algorithm for D-optimal weights on a fixed grid.
inline double d_optimal_value(const std::vector<Point>& grid, const optdesign::Regression& f, int iters) {
  const auto n = grid.size();
  std::vector<Vector> fs;
  for (const auto& x : grid) fs.push_back(f(x));
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  const double k = f.k();
  Matrix m;
  for (int it = 0; it < iters; ++it) {
    m = info_matrix(grid, w, f);
    const Matrix mi = m.inverse();
    for (size_t i = 0; i < n; ++i) w[i] *= fs[i].dot(mi * fs[i]) / k;
  }
  m = info_matrix(grid, w, f);
  return phi(0.0, m);
}

inline Matrix random_pd(std::mt19937_64& rng, int k, double ridge = 1e-2) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(k, k);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  return a * a.transpose() / k + ridge * Matrix::Identity(k, k);
}

inline std::vector<Point> random_points(std::mt19937_64& rng, const std::vector<Point>& grid, size_t count) {
  std::vector<Point> out;
  std::uniform_int_distribution<size_t> pick(0, grid.size() - 1);
  while (out.size() < count) {
    const Point& x = grid[pick(rng)];
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

inline Vector random_weights(std::mt19937_64& rng, Eigen::Index m) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Vector w(m);
  for (Eigen::Index i = 0; i < m; ++i) w(i) = g(rng) + 1e-3;
  return w / w.sum();
}

}  // namespace oracle
