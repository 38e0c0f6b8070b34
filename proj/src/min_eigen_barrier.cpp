#include "optdesign/min_eigen_barrier.hpp"

#include <cmath>

#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

struct BarrierState {
  Matrix s_inv;
  double value = 0.0;
  bool feasible = false;
};

BarrierState evaluate(const FeatureMatrix& rows, const Matrix& offset, const Vector& w, double t, double mu) {
  BarrierState st;
  if ((w.array() <= 0.0).any()) return st;
  const Eigen::Index k = rows.cols();
  Matrix s = rows.transpose() * w.asDiagonal() * rows - offset - t * Matrix::Identity(k, k);
  Eigen::LLT<Matrix> llt(linalg::symmetrize(s));
  if (llt.info() != Eigen::Success) return st;
  const Matrix l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  if (!std::isfinite(logdet)) return st;
  st.s_inv = llt.solve(Matrix::Identity(k, k));
  st.value = t + mu * (logdet + w.array().log().sum());
  st.feasible = true;
  return st;
}

}  // namespace

MinEigenResult maximize_min_eigen(const FeatureMatrix& rows, const Matrix& offset, Vector w0,
                                  const MinEigenOptions& opts) {
  const Eigen::Index n = rows.rows(), k = rows.cols();
  if (n == 0) throw ValidationError("maximize_min_eigen: no rows");
  Vector w = w0.size() == n ? w0 : Vector::Constant(n, 1.0 / static_cast<double>(n));
  w = w.cwiseMax(1e-12);
  w /= w.sum();

  const Matrix m_full = rows.transpose() * Vector::Constant(n, 1.0 / static_cast<double>(n)).asDiagonal() * rows;
  const double scale = std::max({m_full.trace() / static_cast<double>(k), linalg::max_abs(offset), 1e-300});

  auto lam_min = [&](const Vector& ww) {
    return linalg::min_eigenvalue(Matrix(rows.transpose() * ww.asDiagonal() * rows - offset));
  };
  double t = lam_min(w) - scale;

  MinEigenResult res;
  double mu = opts.mu_start * scale;
  const double mu_end = opts.mu_end * scale;
  bool all_stages_converged = true;
  BarrierState st;
  while (true) {
    st = evaluate(rows, offset, w, t, mu);
    if (!st.feasible) throw ValidationError("maximize_min_eigen: lost strict feasibility");
    bool stage_converged = false;
    for (int it = 0; it < opts.max_newton; ++it) {
      ++res.newton_steps;
      const Matrix& si = st.s_inv;
      const Matrix fs = rows * si;               // n x k, row i = f_i^T S^{-1}
      const Matrix cross = fs * rows.transpose();  // f_i^T S^{-1} f_j
      const Matrix si2 = si * si;
      Vector g(n + 1);
      Matrix h = Matrix::Zero(n + 1, n + 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        g(i) = mu * (cross(i, i) + 1.0 / w(i));
        for (Eigen::Index j = 0; j < n; ++j) h(i, j) = -mu * cross(i, j) * cross(i, j);
        h(i, i) -= mu / (w(i) * w(i));
        const double wt = mu * rows.row(i).dot(si2 * rows.row(i).transpose());
        h(i, n) = wt;
        h(n, i) = wt;
      }
      g(n) = 1.0 - mu * si.trace();
      h(n, n) = -mu * si2.trace();

      // Equality-constrained Newton step (sum of weights fixed).
      Matrix kkt = Matrix::Zero(n + 2, n + 2);
      kkt.topLeftCorner(n + 1, n + 1) = h;
      kkt.block(0, n + 1, n, 1).setOnes();
      kkt.block(n + 1, 0, 1, n).setOnes();
      Vector rhs = Vector::Zero(n + 2);
      rhs.head(n + 1) = -g;
      const Vector sol = kkt.fullPivLu().solve(rhs);
      const Vector dx = sol.head(n + 1);
      const double decrement = -dx.dot(h * dx);
      if (!std::isfinite(decrement)) break;
      if (decrement < 1e-14 * scale) {
        stage_converged = true;
        break;
      }
      double step = 1.0;
      BarrierState next;
      while (step > 1e-14) {
        const Vector wn = w + step * dx.head(n);
        const double tn = t + step * dx(n);
        next = evaluate(rows, offset, wn, tn, mu);
        if (next.feasible && next.value >= st.value + 0.25 * step * g.dot(dx)) {
          w = wn;
          t = tn;
          break;
        }
        step *= 0.5;
      }
      if (step <= 1e-14) {
        stage_converged = decrement < 1e-8 * scale;
        break;
      }
      st = next;
    }
    all_stages_converged = all_stages_converged && stage_converged;
    if (mu <= mu_end) break;
    mu = std::max(mu / 10.0, mu_end);
  }
  st = evaluate(rows, offset, w, t, mu);
  res.w = w;
  res.t = lam_min(w);
  res.dual = linalg::symmetrize(mu * st.s_inv);
  res.converged = all_stages_converged;
  return res;
}

}  // namespace optdesign
