#include "optdesign/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optdesign/errors.hpp"
#include "optdesign/min_eigen_barrier.hpp"

namespace optdesign {

namespace {

constexpr const char* kOneSided =
    "admissible means no dominating design was found within the search budget; inadmissible verdicts carry a "
    "verified dominator";

double dominance_scale(const Matrix& m2, const Matrix& m1) {
  return std::max({linalg::max_abs(m1), linalg::max_abs(m2), 1e-300});
}

Matrix gram(const FeatureMatrix& rows, const Vector& w) { return rows.transpose() * w.asDiagonal() * rows; }

struct Found {
  Vector w;
  double trace = -1.0;
  std::string method;
};

/// Keeps the candidate with the larger trace gain when it dominates.
void offer(std::optional<Found>& best, const FeatureMatrix& pool, const Matrix& m1, const Vector& w,
           const std::string& method, double tol) {
  const Matrix m2 = gram(pool, w);
  if (!dominates(m2, m1, tol)) return;
  const double tr = (m2 - m1).trace();
  if (!best || tr > best->trace) best = Found{w, tr, method};
}

/// Phase 1: penalized supergradient ascent of
///   J(w) = trace(M(w) - M1) + rho * min(0, lambda_min(M(w) - M1)),
/// then barrier polishing of lambda_min on the support of the best iterate.
/// Returns true when the ascent was still improving at the end of the budget.
bool penalized_ascent(const FeatureMatrix& pool, const Matrix& m1, const Vector& w_start, int budget, double tol,
                      std::optional<Found>& best) {
  const Eigen::Index n = pool.rows();
  const Vector norms = kernels::squared_norms(pool);
  const double scale = std::max(linalg::max_abs(m1), 1e-300);
  Vector w = w_start;
  Vector best_w = w;
  double best_j = -std::numeric_limits<double>::infinity();
  int last_improvement = 0;
  int step_total = 0;
  for (double rho = 10.0; rho <= 1e6 * 1.0000001; rho *= 10.0) {
    for (int it = 0; it < budget; ++it, ++step_total) {
      const Matrix d = gram(pool, w) - m1;
      const auto eig = linalg::sym_eigen(d);
      const Eigen::Index k = d.rows();
      const double lmin = eig.values(k - 1);
      const double j = d.trace() + rho * std::min(0.0, lmin);
      if (j > best_j + 1e-6 * scale) last_improvement = step_total;
      if (j > best_j) {
        best_j = j;
        best_w = w;
      }
      Vector g = norms;
      if (lmin < 0.0) {
        const Vector z = eig.vectors.col(k - 1);
        g += rho * (pool * z).array().square().matrix();
      }
      const double gmax = g.lpNorm<Eigen::Infinity>();
      if (gmax <= 0.0) break;
      w = linalg::project_simplex(w + (0.5 / std::sqrt(static_cast<double>(it) + 1.0)) * g / gmax);
    }
  }
  offer(best, pool, m1, best_w, "penalized-ascent", tol);

  // Polish on the support of the best iterate.
  std::vector<Eigen::Index> support;
  const double wmax = best_w.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (best_w(i) >= 1e-4 * wmax) support.push_back(i);
  }
  FeatureMatrix rows(static_cast<Eigen::Index>(support.size()), pool.cols());
  Vector w0(static_cast<Eigen::Index>(support.size()));
  for (size_t i = 0; i < support.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = pool.row(support[i]);
    w0(static_cast<Eigen::Index>(i)) = best_w(support[i]);
  }
  try {
    const MinEigenResult r = maximize_min_eigen(rows, m1, w0);
    Vector full = Vector::Zero(n);
    for (size_t i = 0; i < support.size(); ++i) full(support[i]) = r.w(static_cast<Eigen::Index>(i));
    offer(best, pool, m1, full, "penalized-ascent", tol);
  } catch (const ValidationError&) {
  }
  return step_total - last_improvement < 50;
}

double min_eig_pair(const Eigen::Ref<const Eigen::RowVectorXd>& fi, const Eigen::Ref<const Eigen::RowVectorXd>& fj,
                    double v, const Matrix& m1) {
  const Matrix d = (1.0 - v) * fi.transpose() * fi + v * fj.transpose() * fj - m1;
  return linalg::min_eigenvalue(d);
}

/// Phase 2: every two-point support, weight on a 1/64 grid as bracket, then
/// golden-section refinement of the concave map v -> lambda_min(D(v)).
void pair_sweep(const FeatureMatrix& pool, const Matrix& m1, double tol, std::optional<Found>& best) {
  const Eigen::Index n = pool.rows();
  const double scale = std::max(linalg::max_abs(m1), 1e-300);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // One-point designs.
    if (min_eig_pair(pool.row(i), pool.row(i), 0.0, m1) >= -tol * scale) {
      Vector w = Vector::Zero(n);
      w(i) = 1.0;
      offer(best, pool, m1, w, "pair-sweep", tol);
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      int best_g = 0;
      double best_v = -std::numeric_limits<double>::infinity();
      for (int g = 0; g <= 64; ++g) {
        const double v = min_eig_pair(pool.row(i), pool.row(j), g / 64.0, m1);
        if (v > best_v) {
          best_v = v;
          best_g = g;
        }
      }
      double lo = std::max(0, best_g - 1) / 64.0, hi = std::min(64, best_g + 1) / 64.0;
      double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
      double fa = min_eig_pair(pool.row(i), pool.row(j), a, m1);
      double fb = min_eig_pair(pool.row(i), pool.row(j), b, m1);
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        if (fa < fb) {
          lo = a;
          a = b;
          fa = fb;
          b = lo + gr * (hi - lo);
          fb = min_eig_pair(pool.row(i), pool.row(j), b, m1);
        } else {
          hi = b;
          b = a;
          fb = fa;
          a = hi - gr * (hi - lo);
          fa = min_eig_pair(pool.row(i), pool.row(j), a, m1);
        }
      }
      double v = 0.5 * (lo + hi);
      double fv = min_eig_pair(pool.row(i), pool.row(j), v, m1);
      if (best_v > fv) {
        v = best_g / 64.0;
        fv = best_v;
      }
      if (fv < -tol * scale) continue;
      Vector w = Vector::Zero(n);
      w(i) = 1.0 - v;
      w(j) = v;
      offer(best, pool, m1, w, "pair-sweep", tol);
    }
  }
}

Design to_design(const std::vector<Point>& pool_points, const Vector& w, const FeatureMatrix& pool,
                 const Matrix& m1, double tol) {
  // Drop dust only when dominance survives.
  const double wmax = w.maxCoeff();
  Vector trimmed = w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (trimmed(i) < 1e-9 * wmax) trimmed(i) = 0.0;
  }
  trimmed /= trimmed.sum();
  const Vector& use = dominates(gram(pool, trimmed), m1, tol) ? trimmed : w;
  std::vector<Point> pts;
  std::vector<double> ws;
  for (Eigen::Index i = 0; i < use.size(); ++i) {
    if (use(i) <= 0.0) continue;
    const Point& p = pool_points[static_cast<size_t>(i)];
    auto it = std::find(pts.begin(), pts.end(), p);
    if (it == pts.end()) {
      pts.push_back(p);
      ws.push_back(use(i));
    } else {
      ws[static_cast<size_t>(it - pts.begin())] += use(i);
    }
  }
  return Design::from_weights(pts, Eigen::Map<Vector>(ws.data(), static_cast<Eigen::Index>(ws.size())));
}

}  // namespace

std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::admissible: return "admissible";
    case VerdictStatus::inadmissible: return "inadmissible";
    case VerdictStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

bool dominates(const Matrix& m2, const Matrix& m1, double tol) {
  if (m2.rows() != m1.rows() || m2.cols() != m1.cols()) throw ValidationError("dominates: size mismatch");
  const Matrix d = linalg::symmetrize(m2 - m1);
  const double scale = dominance_scale(m2, m1);
  return linalg::min_eigenvalue(d) >= -tol * scale && linalg::max_abs(d) > tol * scale;
}

bool dominates(const Design& d2, const Design& d1, const Regression& f, double tol) {
  return dominates(info_matrix(d2, f), info_matrix(d1, f), tol);
}

AdmissibilityVerdict find_dominator(const Design& d1, const CandidateSet& candidates, const Regression& f,
                                    const DominatorOptions& opts) {
  if (d1.empty()) throw EmptyDesignError("find_dominator: empty design");
  if (opts.budget < 1) throw ValidationError("find_dominator: budget must be >= 1");
  // Pool = candidates followed by the atoms of d1.
  std::vector<Point> pool_points = candidates.points;
  for (const auto& a : d1.atoms()) pool_points.push_back(a.x);
  const FeatureMatrix pool = kernels::evaluate_features(f, pool_points);
  const Matrix m1 = info_matrix(d1, f);
  const int k = f.k();
  if (linalg::numerical_rank(Matrix(pool.transpose() * pool)) < linalg::numerical_rank(m1)) {
    throw ValidationError("find_dominator: candidates do not span the range of M(d1)");
  }
  Vector w_start = Vector::Zero(pool.rows());
  for (size_t i = 0; i < d1.size(); ++i) w_start(static_cast<Eigen::Index>(candidates.size() + i)) = d1.atoms()[i].w;

  std::optional<Found> best;
  const bool improving = penalized_ascent(pool, m1, w_start, opts.budget, opts.tol, best);
  const bool exhaustive = k <= 2 && pool.rows() <= static_cast<Eigen::Index>(opts.exhaustive_limit);
  if (exhaustive) pair_sweep(pool, m1, opts.tol, best);

  AdmissibilityVerdict v;
  v.note = kOneSided;
  if (best) {
    Design dom = to_design(pool_points, best->w, pool, m1, opts.tol);
    if (dominates(dom, d1, f, opts.tol)) {
      v.status = VerdictStatus::inadmissible;
      v.dominator = std::move(dom);
      v.method = best->method;
      return v;
    }
  }
  v.method = exhaustive ? "pair-sweep" : "penalized-ascent";
  v.status = (!exhaustive && improving) ? VerdictStatus::inconclusive : VerdictStatus::admissible;
  return v;
}

AdmissibilityVerdict conditional_audit(const Design& design, const SliceMap& tmap, const ModelSpec& model,
                                       const CandidateSet& candidates, const DominatorOptions& opts) {
  const SliceDecomposition dec = decompose(design, tmap, model);
  AdmissibilityVerdict out;
  out.note = std::string("conditional admissibility is a necessary condition only; ") + kOneSided;
  std::vector<Atom> spliced;
  bool any_dominated = false;
  bool any_inconclusive = false;
  for (const auto& s : dec.slices) {
    std::vector<Point> slice_pts;
    for (const auto& p : candidates.points) {
      if (std::abs(tmap(p) - s.t) <= tmap.tol) slice_pts.push_back(p);
    }
    SliceEvidence ev;
    ev.t = s.t;
    const CandidateSet slice_cands{candidates.space, slice_pts, candidates.resolution};
    const AdmissibilityVerdict sv = find_dominator(s.conditional_design, slice_cands, s.model.f_tilde, opts);
    ev.status = sv.status;
    ev.dominator = sv.dominator;
    const Design& use = sv.dominator ? *sv.dominator : s.conditional_design;
    for (const auto& a : use.atoms()) spliced.push_back({a.x, s.marginal_weight * a.w});
    any_dominated = any_dominated || sv.status == VerdictStatus::inadmissible;
    any_inconclusive = any_inconclusive || sv.status == VerdictStatus::inconclusive;
    out.evidence.push_back(std::move(ev));
  }
  if (any_dominated) {
    Design full(std::move(spliced));
    if (dominates(full, design, model, opts.tol)) {
      out.status = VerdictStatus::inadmissible;
      out.dominator = std::move(full);
      out.method = "slice-splice";
      return out;
    }
    throw InconsistencyError("spliced design does not dominate although a slice was dominated");
  }
  out.status = any_inconclusive ? VerdictStatus::inconclusive : VerdictStatus::admissible;
  return out;
}

ProductAudit product_audit(const Design& design, const ModelSpec& model, const CandidateSet& candidates,
                           const DominatorOptions& opts, std::optional<std::pair<int, int>> support_sizes) {
  if (model.q() != 2) throw NoConditionalModelError("product audit needs a two-factor model");
  ProductAudit out;
  int sizes[2] = {0, 0};
  for (int factor = 0; factor < 2; ++factor) {
    const Regression marginal = marginal_model(model, factor);
    std::vector<double> values;
    for (const auto& p : candidates.points) values.push_back(p(factor));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
                 values.end());
    std::vector<Point> pts;
    for (double v : values) {
      Point p(1);
      p(0) = v;
      pts.push_back(p);
    }
    const DesignSpace axis_space({model.space().axis(factor)});
    const CandidateSet axis_cands{axis_space, pts,
                                  {candidates.resolution.empty() ? 0.0 : candidates.resolution[static_cast<size_t>(factor)]}};
    FactorVerdict fv;
    fv.factor = factor;
    fv.marginal = marginal_design(design, factor);
    fv.verdict = find_dominator(fv.marginal, axis_cands, marginal, opts);
    sizes[factor] = static_cast<int>(fv.marginal.size());
    out.factors.push_back(std::move(fv));
  }
  if (support_sizes) {
    sizes[0] = support_sizes->first;
    sizes[1] = support_sizes->second;
  }
  out.support_bound = sizes[0] * sizes[1];
  out.note = std::string("designs built from admissible marginals are products of at most p1*p2 points; ") + kOneSided;
  return out;
}

}  // namespace optdesign
