#include "optdesign/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "optdesign/errors.hpp"

namespace optdesign::linalg {

SymEigen sym_eigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  const Eigen::Index n = a.rows();
  SymEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;
    out.values(i) = es.eigenvalues()(src);
    Vector v = es.eigenvectors().col(src);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(v(j)) > 1e-12) {
        if (v(j) < 0) v = -v;
        break;
      }
    }
    out.vectors.col(i) = v;
  }
  return out;
}

Vector sym_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& a) {
  if (a.rows() == 1) return a(0, 0);
  if (a.rows() == 2) {
    const double m = 0.5 * (a(0, 0) + a(1, 1));
    const double d = 0.5 * (a(0, 0) - a(1, 1));
    const double off = 0.5 * (a(0, 1) + a(1, 0));
    return m - std::hypot(d, off);
  }
  return sym_eigenvalues(a)(0);
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

void require_psd(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw ValidationError(std::string(what) + ": matrix is not square");
  }
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + ": matrix has non-finite entries");
  }
  if (max_abs(a - a.transpose()) > 1e-12 * std::max(1.0, max_abs(a))) {
    throw ValidationError(std::string(what) + ": matrix is not symmetric");
  }
  const Vector ev = sym_eigenvalues(a);
  const double top = std::max(std::abs(ev(ev.size() - 1)), 1e-300);
  if (ev(0) < -1e-9 * top) {
    throw ValidationError(std::string(what) + ": matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(ev(0)) + ")");
  }
}

Matrix sym_power(const Matrix& a, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  Vector ev = es.eigenvalues();
  const double floor = 1e-14 * std::max(ev.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = std::pow(std::max(ev(i), floor), p);
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++r;
  }
  return r;
}

Vector project_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = std::max(v(i) - theta, 0.0);
  return out;
}

}  // namespace optdesign::linalg
