#include "optdesign/criteria.hpp"

#include <cmath>
#include <sstream>

#include "optdesign/errors.hpp"

namespace optdesign {

Criterion Criterion::with_p(double p) {
  if (std::isnan(p) || p > 1.0) throw ValidationError("criterion exponent p must lie in [-inf, 1]");
  return Criterion{p};
}

Criterion Criterion::parse(const std::string& text) {
  if (text == "D") return D();
  if (text == "A") return A();
  if (text == "E") return E();
  if (text == "T") return T();
  if (text.rfind("p:", 0) == 0) {
    const std::string v = text.substr(2);
    if (v == "-inf") return E();
    size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(v, &used);
    } catch (const std::exception&) {
      throw ValidationError("unrecognized criterion '" + text + "'");
    }
    if (used != v.size()) throw ValidationError("unrecognized criterion '" + text + "'");
    return with_p(p);
  }
  throw ValidationError("unrecognized criterion '" + text + "' (expected D, A, E, T or p:<real>)");
}

std::string Criterion::name() const {
  if (p == 0.0) return "D";
  if (p == -1.0) return "A";
  if (is_E()) return "E";
  if (p == 1.0) return "T";
  std::ostringstream os;
  os.precision(12);
  os << "p:" << p;
  return os.str();
}

double Criterion::conjugate() const {
  if (p == 0.0) return 0.0;
  if (is_E()) return 1.0;
  if (p == 1.0) return -std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

namespace {

/// phi_p on an ascending eigenvalue list (already validated PSD).
double phi_from_eigenvalues(double p, Vector ev) {
  const Eigen::Index s = ev.size();
  const double top = std::max(ev(s - 1), 0.0);
  if (top <= 0.0) return 0.0;
  for (Eigen::Index i = 0; i < s; ++i) ev(i) = std::max(ev(i), 0.0);
  const bool singular = ev(0) <= 1e-14 * top;
  if (std::isinf(p)) return ev(0);
  if (p <= 0.0 && singular) return 0.0;
  const double ds = static_cast<double>(s);
  if (p == 0.0) return std::exp(ev.array().log().sum() / ds);
  if (p < 0.0) {
    // Scale by lambda_min so the powers stay bounded.
    const double lo = ev(0);
    return lo * std::pow((ev.array() / lo).pow(p).sum() / ds, 1.0 / p);
  }
  return top * std::pow((ev.array() / top).pow(p).sum() / ds, 1.0 / p);
}

}  // namespace

double phi(const Criterion& c, const Matrix& m) {
  linalg::require_psd(m, "phi");
  return phi_from_eigenvalues(c.p, linalg::sym_eigenvalues(m));
}

double polar(const Criterion& c, const Matrix& n) {
  linalg::require_psd(n, "polar");
  return static_cast<double>(n.rows()) * phi_from_eigenvalues(c.conjugate(), linalg::sym_eigenvalues(n));
}

bool is_singular(const Matrix& m) {
  const Vector ev = linalg::sym_eigenvalues(m);
  const double top = ev(ev.size() - 1);
  return top <= 0.0 || ev(0) <= 1e-14 * top;
}

Matrix dual_matrix(const Criterion& c, const Matrix& m) {
  linalg::require_psd(m, "dual_matrix");
  if (is_singular(m)) {
    throw ValidationError("information matrix is singular; start from a design with a nonsingular matrix");
  }
  if (c.is_E()) {
    const auto eig = linalg::sym_eigen(m);
    const Eigen::Index s = m.rows();
    const double lmin = eig.values(s - 1);
    if (s > 1 && eig.values(s - 2) - lmin < kEigenMultiplicityGap * eig.values(0)) {
      throw ValidationError(
          "smallest eigenvalue is multiple; the E-criterion dual matrix needs the candidate set");
    }
    const Vector z = eig.vectors.col(s - 1);
    return z * z.transpose() / lmin;
  }
  const Matrix mp = linalg::sym_power(m, c.p);
  const Matrix mp1 = linalg::sym_power(m, c.p - 1.0);
  return linalg::symmetrize(mp1 / mp.trace());
}

double sensitivity(const Criterion& c, const Matrix& m, const Regression& f, const Point& x) {
  const Vector v = f(x);
  return v.dot(dual_matrix(c, m) * v);
}

}  // namespace optdesign
