#include "optdesign/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "optdesign/certificate.hpp"
#include "optdesign/errors.hpp"
#include "optdesign/min_eigen_barrier.hpp"

namespace optdesign {

namespace {

Matrix gram(const FeatureMatrix& rows, const Vector& w) { return rows.transpose() * w.asDiagonal() * rows; }

double log_phi(const Criterion& c, const Matrix& m) {
  const double v = phi(c, m);
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

/// Log-barrier Newton method for max log det M(w) on the simplex. Resolves
/// near ties between neighbouring grid points, where the multiplicative
/// update only converges linearly with a rate close to one.
Vector newton_d(const FeatureMatrix& rows, Vector w) {
  const Eigen::Index n = rows.rows();
  w = (0.99 * w / w.sum()).array() + 0.01 / static_cast<double>(n);
  auto objective = [&](const Vector& ww, double mu, Matrix* m_inv) {
    if ((ww.array() <= 0.0).any()) return -std::numeric_limits<double>::infinity();
    Eigen::LLT<Matrix> llt(gram(rows, ww));
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const Matrix l = llt.matrixL();
    if (m_inv) *m_inv = llt.solve(Matrix::Identity(rows.cols(), rows.cols()));
    return 2.0 * l.diagonal().array().log().sum() + mu * ww.array().log().sum();
  };
  for (double mu = 1e-3; mu >= 1e-14 * 0.999; mu /= 10.0) {
    for (int it = 0; it < 50; ++it) {
      Matrix m_inv;
      const double val = objective(w, mu, &m_inv);
      const Matrix cross = rows * m_inv * rows.transpose();
      Vector g = cross.diagonal() + mu * w.cwiseInverse();
      Matrix h = -cross.cwiseProduct(cross);
      h.diagonal() -= mu * w.cwiseInverse().cwiseAbs2();
      Matrix kkt = Matrix::Zero(n + 1, n + 1);
      kkt.topLeftCorner(n, n) = h;
      kkt.block(0, n, n, 1).setOnes();
      kkt.block(n, 0, 1, n).setOnes();
      Vector rhs = Vector::Zero(n + 1);
      rhs.head(n) = -g;
      const Vector dx = kkt.fullPivLu().solve(rhs).head(n);
      const double decrement = -dx.dot(h * dx);
      if (!std::isfinite(decrement) || decrement < 1e-15) break;
      double step = 1.0;
      while (step > 1e-14 && objective(w + step * dx, mu, nullptr) < val + 0.25 * step * g.dot(dx)) step *= 0.5;
      if (step <= 1e-14) break;
      w += step * dx;
    }
  }
  return w.cwiseMax(0.0) / w.cwiseMax(0.0).sum();
}

WeightSolution refine_d(const FeatureMatrix& rows, Vector w, int max_iters, double tol) {
  const auto k = static_cast<double>(rows.cols());
  WeightSolution out;
  Vector d;
  Matrix m_inv;
  auto sensitivities = [&](const Vector& ww) {
    Eigen::LLT<Matrix> llt(gram(rows, ww));
    if (llt.info() != Eigen::Success) throw ValidationError("D refinement: singular information matrix");
    m_inv = llt.solve(Matrix::Identity(rows.cols(), rows.cols()));
    d = (rows * m_inv).cwiseProduct(rows).rowwise().sum();
  };
  // Multiplicative updates; a Newton polish takes over when they stall.
  const int multiplicative_budget = std::min(max_iters, 200);
  bool done = false;
  for (int it = 0;; ++it) {
    sensitivities(w);
    out.iterations = it;
    if (d.maxCoeff() / k - 1.0 <= tol) {
      done = true;
      break;
    }
    if (it >= multiplicative_budget) break;
    w = w.cwiseProduct(d) / k;
    w /= w.sum();
  }
  if (!done) {
    const double before = std::log(gram(rows, w).determinant());
    const Vector wn = newton_d(rows, w);
    const Matrix mn = gram(rows, wn);
    if (!is_singular(mn) && std::log(mn.determinant()) >= before) w = wn;
    sensitivities(w);
  }
  out.w = w;
  out.dual = linalg::symmetrize(m_inv / k);
  out.value = phi(Criterion::D(), gram(rows, w));
  return out;
}

WeightSolution refine_e(const FeatureMatrix& rows, const Vector& w0) {
  const MinEigenResult r = maximize_min_eigen(rows, Matrix::Zero(rows.cols(), rows.cols()), w0);
  WeightSolution out;
  out.w = r.w;
  const Matrix m = gram(rows, r.w);
  out.dual = linalg::symmetrize(r.dual / (m * r.dual).trace());
  out.value = linalg::min_eigenvalue(m);
  out.iterations = r.newton_steps;
  return out;
}

/// For p > 0 the powers of a singular M stay finite, so no rank check.
Matrix dual_of(const Criterion& c, const Matrix& m) {
  if (c.p <= 0.0) return dual_matrix(c, m);
  return linalg::symmetrize(linalg::sym_power(m, c.p - 1.0) / linalg::sym_power(m, c.p).trace());
}

/// Projected gradient ascent of log phi_p on the simplex; the gradient is the
/// normalized sensitivity d_i = f_i^T M^{p-1} f_i / trace(M^p).
WeightSolution refine_projected(const FeatureMatrix& rows, const Criterion& c, Vector w, int max_iters,
                                double tol) {
  auto grad = [&](const Vector& ww) { return kernels::reference::quadratic_forms(rows, dual_of(c, gram(rows, ww))); };
  double val = log_phi(c, gram(rows, w));
  Vector d = grad(w);
  double eta = 1.0;
  WeightSolution out;
  int it = 0;
  for (; it < max_iters; ++it) {
    if (d.maxCoeff() - 1.0 <= tol) break;
    bool accepted = false;
    Vector wn;
    double valn = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      wn = linalg::project_simplex(w + eta * d);
      const Matrix mn = gram(rows, wn);
      valn = c.p <= 0.0 && is_singular(mn) ? -std::numeric_limits<double>::infinity() : log_phi(c, mn);
      if (valn >= val + 1e-4 * d.dot(wn - w)) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted || (wn - w).lpNorm<Eigen::Infinity>() == 0.0) break;
    const Vector dn = grad(wn);
    const Vector s = wn - w;
    const Vector y = d - dn;
    const double sy = s.dot(y);
    eta = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * eta;
    eta = std::clamp(eta, 1e-10, 1e10);
    w = wn;
    d = dn;
    val = valn;
  }
  out.w = w;
  out.dual = dual_of(c, gram(rows, w));
  out.value = phi(c, gram(rows, w));
  out.iterations = it;
  return out;
}

FeatureMatrix select_rows(const FeatureMatrix& f, const std::vector<Eigen::Index>& idx) {
  FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), f.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = f.row(idx[i]);
  return out;
}

bool spans(const FeatureMatrix& rows) {
  if (rows.rows() < rows.cols()) return false;
  return linalg::numerical_rank(Matrix(rows.transpose() * rows)) == rows.cols();
}

}  // namespace

WeightSolution optimize_weights(const FeatureMatrix& rows, const Criterion& c, Vector w0, int max_iters,
                                double tol) {
  const Eigen::Index n = rows.rows();
  if (n == 0) throw ValidationError("optimize_weights: empty support");
  if (w0.size() != n) w0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
  if (c.p <= 0.0 && !spans(rows)) {
    throw DegenerateModelError("support does not span the regression space; the criterion value is 0");
  }
  if (c.is_D()) return refine_d(rows, w0.cwiseMax(1e-300) / w0.sum(), max_iters, tol);
  if (c.is_E()) {
    Vector w = (0.9 * w0 / w0.sum()).array() + 0.1 / static_cast<double>(n);
    return refine_e(rows, w);
  }
  return refine_projected(rows, c, w0 / w0.sum(), max_iters, tol);
}

std::vector<Eigen::Index> spread_start(const FeatureMatrix& features, int count, bool need_full_rank,
                                       std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::vector<Eigen::Index> chosen{pick(rng)};
  Vector dist = (features.rowwise() - features.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<Eigen::Index>(chosen.size()) < n) {
    if (static_cast<int>(chosen.size()) >= count && (!need_full_rank || spans(select_rows(features, chosen)))) {
      break;
    }
    const Eigen::Index next = kernels::argmax(dist);
    if (dist(next) <= 0.0) break;
    chosen.push_back(next);
    dist = dist.cwiseMin((features.rowwise() - features.row(next)).rowwise().squaredNorm());
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

struct CoreResult {
  std::vector<Eigen::Index> support;
  Vector w;
  double violation = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

double violation_on(const FeatureMatrix& features, const Matrix& dual) {
  const Vector sens = kernels::quadratic_forms(features, dual);
  return std::max(sens(kernels::argmax(sens)) - 1.0, 0.0);
}

// A multiple smallest eigenvalue admits many dual matrices; the certificate
// search picks the best one instead of the barrier's.
double e_violation(const FeatureMatrix& features, const Matrix& m) {
  const Certificate cert = build_certificate(Criterion::E(), m, features);
  return violation_on(features, cert.N);
}

CoreResult column_generation(const FeatureMatrix& features, const Criterion& c, const SolverOptions& opts,
                             std::vector<Eigen::Index> support, Vector w) {
  const double inner_tol = std::min(1e-9, opts.kkt_tol * 1e-3);
  const auto k = static_cast<double>(features.cols());
  CoreResult res;
  for (int outer = 1;; ++outer) {
    const FeatureMatrix rows = select_rows(features, support);
    const WeightSolution ws = optimize_weights(rows, c, w, opts.max_inner_iters, inner_tol);
    // Drop numerical dust from the active set. The E barrier keeps every
    // weight strictly positive, so its small weights are not dust.
    std::vector<Eigen::Index> kept;
    std::vector<double> kept_w;
    for (Eigen::Index i = 0; i < ws.w.size(); ++i) {
      if (c.is_E() || ws.w(i) >= 1e-12) {
        kept.push_back(support[static_cast<size_t>(i)]);
        kept_w.push_back(ws.w(i));
      }
    }
    if (c.p <= 0.0 && !spans(select_rows(features, kept))) {
      kept = support;
      kept_w.assign(ws.w.data(), ws.w.data() + ws.w.size());
    }
    support = kept;
    w = Eigen::Map<Vector>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
    w /= w.sum();

    res.history.push_back(ws.value);
    const Vector sens = kernels::quadratic_forms(features, ws.dual);
    const Eigen::Index j = kernels::argmax(sens);
    res.violation = std::max(sens(j) - 1.0, 0.0);
    if (c.is_E() && res.violation > 0.1 * opts.kkt_tol) {
      res.violation = std::min(res.violation, e_violation(features, gram(rows, ws.w)));
    }
    res.iterations = outer;
    if (res.violation <= 0.1 * opts.kkt_tol || outer >= opts.max_outer_iters) break;
    if (std::find(support.begin(), support.end(), j) != support.end()) {
      if (res.violation <= opts.kkt_tol) break;
      continue;
    }
    // Enter the most violating candidate.
    support.push_back(j);
    Vector wn(w.size() + 1);
    if (c.is_D()) {
      const double dj = k * sens(j);
      const double alpha = (dj / k - 1.0) / (dj - 1.0);
      wn.head(w.size()) = (1.0 - alpha) * w;
      wn(w.size()) = alpha;
    } else {
      wn.head(w.size()) = w;
      wn(w.size()) = 0.0;
    }
    w = wn;
  }
  res.support = support;
  res.w = w;
  return res;
}

}  // namespace

SolveReport solve(const Regression& f, const CandidateSet& candidates, const Criterion& c,
                  const SolverOptions& opts) {
  if (opts.max_outer_iters < 1 || opts.max_inner_iters < 1) throw ValidationError("solver: max iters must be >= 1");
  if (!(opts.kkt_tol > 0.0) || !(opts.weight_floor > 0.0)) throw ValidationError("solver: tolerances must be positive");
  if (candidates.size() == 0) throw ValidationError("solver: empty candidate set");
  const FeatureMatrix features = kernels::evaluate_features(f, candidates.points);
  if (!spans(features)) throw DegenerateModelError("candidate set does not span the regression space");

  std::vector<Eigen::Index> support;
  Vector w;
  if (opts.init_design) {
    for (const auto& a : opts.init_design->atoms()) {
      Eigen::Index best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < candidates.size(); ++i) {
        const double dd = (candidates.points[i] - a.x).squaredNorm();
        if (dd < bd) {
          bd = dd;
          best = static_cast<Eigen::Index>(i);
        }
      }
      if (std::find(support.begin(), support.end(), best) == support.end()) support.push_back(best);
    }
    if (!spans(select_rows(features, support))) {
      for (Eigen::Index extra : spread_start(features, f.k() + 1, true, opts.seed)) {
        if (std::find(support.begin(), support.end(), extra) == support.end()) support.push_back(extra);
      }
    }
  } else {
    support = spread_start(features, f.k() + 1, true, opts.seed);
  }
  w = Vector::Constant(static_cast<Eigen::Index>(support.size()), 1.0 / static_cast<double>(support.size()));

  const CoreResult core = column_generation(features, c, opts, support, w);

  SolveReport rep;
  rep.history = core.history;
  rep.iterations = core.iterations;
  std::vector<Point> pts;
  for (Eigen::Index i : core.support) pts.push_back(candidates.points[static_cast<size_t>(i)]);
  Design raw = Design::from_weights(pts, core.w);
  Design pruned = prune(raw, std::min(opts.weight_floor, 0.5 * raw.weights().maxCoeff()));

  const double inner_tol = std::min(1e-9, opts.kkt_tol * 1e-3);
  auto finish = [&](const Design& d) {
    const FeatureMatrix rows = kernels::reference::evaluate_features(f, d.points());
    WeightSolution ws = optimize_weights(rows, c, d.weights(), opts.max_inner_iters, inner_tol);
    Design out = Design::from_weights(d.points(), ws.w);
    out = prune(out, std::min(opts.weight_floor, 0.5 * out.weights().maxCoeff()));
    if (out.size() != d.size()) {
      const FeatureMatrix r2 = kernels::reference::evaluate_features(f, out.points());
      ws = optimize_weights(r2, c, out.weights(), opts.max_inner_iters, inner_tol);
      out = Design::from_weights(out.points(), ws.w);
    }
    const FeatureMatrix own = kernels::reference::evaluate_features(f, out.points());
    double v = std::max(violation_on(features, ws.dual), violation_on(own, ws.dual));
    if (c.is_E() && v > 0.1 * opts.kkt_tol) {
      const Matrix m = gram(own, ws.w);
      v = std::min(v, std::max(e_violation(features, m), e_violation(own, m)));
    }
    if (c.is_E()) {
      for (int round = 0; round < 3; ++round) {
        const FeatureMatrix cur = kernels::reference::evaluate_features(f, out.points());
        const Certificate cert = build_certificate(c, gram(cur, out.weights()), features);
        const Vector s = kernels::quadratic_forms(cur, cert.N);
        std::vector<Point> keep;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
          if (s(i) >= cert.bound - std::max(1e-3, 10.0 * opts.kkt_tol)) keep.push_back(out.points()[static_cast<size_t>(i)]);
        }
        const double gap = cert.bound - s.minCoeff();
        if (keep.size() == out.size() || keep.empty()) {
          v = std::max(v, gap);
          break;
        }
        const FeatureMatrix kr = kernels::reference::evaluate_features(f, keep);
        if (!spans(kr)) {
          v = std::max(v, gap);
          break;
        }
        const WeightSolution ks = optimize_weights(kr, c, Vector(), opts.max_inner_iters, inner_tol);
        const Matrix km = gram(kr, ks.w);
        const double kv = std::max(e_violation(features, km), e_violation(kr, km));
        if (kv > std::max(opts.kkt_tol, v)) {
          v = std::max(v, gap);
          break;
        }
        out = Design::from_weights(keep, ks.w);
        v = kv;
      }
    }
    return std::pair<Design, double>{out, v};
  };

  auto [unmerged, v_unmerged] = finish(pruned);
  const double merge_tol = opts.merge_tol >= 0.0 ? opts.merge_tol : candidates.min_step() * (1.0 + 1e-6);
  Design merged_in = merge_close(unmerged, merge_tol);
  if (merged_in.size() < unmerged.size()) {
    auto [merged, v_merged] = finish(merged_in);
    if (v_merged <= std::max(opts.kkt_tol, v_unmerged)) {
      unmerged = merged;
      v_unmerged = v_merged;
    } else {
      rep.notes.push_back("merging neighbouring atoms raised the violation; reporting the unmerged design");
    }
  }
  rep.design = unmerged;
  rep.max_sensitivity_violation = v_unmerged;
  rep.criterion_value = phi(c, info_matrix(rep.design, f));
  rep.converged = rep.max_sensitivity_violation <= opts.kkt_tol;
  if (!rep.converged) {
    rep.notes.push_back("normality violation " + std::to_string(rep.max_sensitivity_violation) +
                        " exceeds the tolerance");
  }
  return rep;
}

Design refine_weights(const Regression& f, const std::vector<Point>& support, const Criterion& c,
                      const SolverOptions& opts) {
  if (support.empty()) throw EmptyDesignError("refine_weights: empty support");
  std::vector<Point> pts;
  for (const auto& x : support) {
    if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
  }
  FeatureMatrix rows(static_cast<Eigen::Index>(pts.size()), f.k());
  for (size_t i = 0; i < pts.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = f(pts[i]).transpose();
  const WeightSolution ws =
      optimize_weights(rows, c, {}, opts.max_inner_iters, std::min(1e-9, opts.kkt_tol * 1e-3));
  return Design::from_weights(pts, ws.w);
}

}  // namespace optdesign
