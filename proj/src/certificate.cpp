#include "optdesign/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "optdesign/errors.hpp"

namespace optdesign {

namespace {

Certificate finish(Matrix n) {
  Certificate cert;
  cert.N = linalg::symmetrize(n);
  const auto eig = linalg::sym_eigen(cert.N);
  cert.Z = eig.vectors;
  cert.Lambda = eig.values.cwiseMax(0.0);
  return cert;
}

/// Trace-one PSD matrix E minimizing max_x g_x^T E g_x by projected
/// subgradient steps with the Polyak rule (target value 1).
Matrix optimize_eigenspace_weights(const Matrix& g, double& best_value) {
  const Eigen::Index r = g.cols(), n = g.rows();
  Matrix e = Matrix::Identity(r, r) / static_cast<double>(r);
  auto values = [&](const Matrix& ee, const std::vector<Eigen::Index>& rows) {
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto gi = g.row(rows[i]);
      out(static_cast<Eigen::Index>(i)) = gi.dot(ee * gi.transpose());
    }
    return out;
  };
  std::vector<Eigen::Index> all(static_cast<size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});

  // Working set of the currently largest quadratic forms, enlarged on demand.
  auto top_rows = [&](const Matrix& ee, size_t count) {
    const Vector v = values(ee, all);
    std::vector<Eigen::Index> idx = all;
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) > v(b); });
    idx.resize(std::min(count, idx.size()));
    return idx;
  };
  std::vector<Eigen::Index> work = top_rows(e, 64);
  Matrix best = e;
  best_value = values(e, all).maxCoeff();
  for (int round = 0; round < 20; ++round) {
    Matrix cur = best;
    double cur_best = values(best, work).maxCoeff();
    for (int it = 0; it < 20000 && cur_best > 1.0 + 1e-13; ++it) {
      const Vector v = values(cur, work);
      Eigen::Index j = 0;
      const double h = v.maxCoeff(&j);
      if (h < cur_best) {
        cur_best = h;
        best = cur;
      }
      const Vector gj = g.row(work[static_cast<size_t>(j)]).transpose();
      Matrix sub = gj * gj.transpose() - (gj.squaredNorm() / static_cast<double>(r)) * Matrix::Identity(r, r);
      const double nrm = sub.squaredNorm();
      if (nrm <= 0.0 || h <= 1.0) break;
      cur = linalg::symmetrize(cur - ((h - 1.0) / nrm) * sub);
      const auto eig = linalg::sym_eigen(cur);
      const Vector lam = linalg::project_simplex(eig.values);
      cur = eig.vectors * lam.asDiagonal() * eig.vectors.transpose();
    }
    const Vector full = values(best, all);
    best_value = full.maxCoeff();
    if (best_value <= values(best, work).maxCoeff() + 1e-13) break;
    const std::vector<Eigen::Index> extra = top_rows(best, work.size() + 64);
    for (Eigen::Index i : extra) {
      if (std::find(work.begin(), work.end(), i) == work.end()) work.push_back(i);
    }
  }
  return best;
}

Certificate build_e_certificate(const Matrix& m, const FeatureMatrix& features) {
  const auto eig = linalg::sym_eigen(m);
  const Eigen::Index s = m.rows();
  const double lmin = eig.values(s - 1);
  const double lmax = eig.values(0);
  std::optional<Certificate> best;
  double best_score = std::numeric_limits<double>::infinity();
  int last_r = 0;
  // Start at the multiplicity threshold and widen the eigen-cluster while
  // the certificate violates normality (nearly optimal designs have nearly
  // multiple eigenvalues).
  for (double gap : {kEigenMultiplicityGap, 1e-6, 1e-4}) {
    int r = 0;
    while (r < s && eig.values(s - 1 - r) - lmin <= gap * lmax) ++r;
    if (r == last_r) continue;
    last_r = r;
    Matrix v = eig.vectors.rightCols(r);
    Certificate cert;
    double residual = 0.0;
    if (r == 1) {
      cert = finish(v * v.transpose() / lmin);
    } else {
      const Matrix g = features * v / std::sqrt(lmin);
      double h = 0.0;
      const Matrix e = optimize_eigenspace_weights(g, h);
      cert = finish(v * e * v.transpose() / lmin);
      residual = std::max(h - 1.0, 0.0);
    }
    const Vector sens = kernels::quadratic_forms(features, cert.N);
    residual = std::max(sens.maxCoeff() - 1.0, 0.0);
    cert.residual = residual;
    cert.eigenspace_dim = r;
    const double score = std::max(residual, std::abs((m * cert.N).trace() - 1.0));
    if (score < best_score) {
      best_score = score;
      best = cert;
    }
    if (best_score <= 1e-10) break;
  }
  return *best;
}

}  // namespace

Certificate build_certificate(const Criterion& c, const Matrix& m, const FeatureMatrix& features) {
  linalg::require_psd(m, "build_certificate");
  if (is_singular(m)) throw ValidationError("build_certificate: information matrix is singular");
  if (c.is_E()) return build_e_certificate(m, features);
  return finish(dual_matrix(c, m));
}

Certificate build_certificate(const Criterion& c, const Matrix& m, const Regression& f,
                              const CandidateSet& candidates) {
  return build_certificate(c, m, kernels::evaluate_features(f, candidates.points));
}

CertifyReport certify(const Design& design, const Regression& f, const CandidateSet& candidates,
                      const Criterion& c, double tol) {
  if (design.empty()) throw EmptyDesignError("certify: empty design");
  const Matrix m = info_matrix(design, f);
  if (is_singular(m)) throw ValidationError("certify: the design's information matrix is singular");
  const FeatureMatrix features = kernels::evaluate_features(f, candidates.points);
  CertifyReport rep;
  rep.tol = tol;
  rep.certificate = build_certificate(c, m, features);
  const Matrix& n = rep.certificate.N;
  rep.trace_mn = (m * n).trace();
  rep.phi_times_polar = phi(c, m) * polar(c, n);
  rep.candidate_sensitivities = kernels::quadratic_forms(features, n);
  const Eigen::Index j = kernels::argmax(rep.candidate_sensitivities);
  const double excess = rep.candidate_sensitivities(j) - rep.certificate.bound;
  rep.max_violation = std::max(excess, 0.0);
  if (excess > 0.0) rep.violating_point = candidates.points[static_cast<size_t>(j)];
  for (const auto& a : design.atoms()) {
    const Vector v = f(a.x);
    const double s = v.dot(n * v);
    rep.support_sensitivities.push_back(s);
    rep.max_support_gap = std::max(rep.max_support_gap, std::abs(s - rep.certificate.bound));
    rep.max_violation = std::max(rep.max_violation, s - rep.certificate.bound);
  }

  // Normality on a truncated axis boundary must be slack.
  const DesignSpace& space = candidates.space;
  for (int ax = 0; ax < space.dimension(); ++ax) {
    if (!space.truncated(ax)) continue;
    const double hi = space.axis(ax).hi;
    const double eps = 1e-9 * std::max(1.0, std::abs(hi));
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (std::abs(candidates.points[i](ax) - hi) <= eps) {
        worst = std::max(worst, rep.candidate_sensitivities(static_cast<Eigen::Index>(i)));
      }
    }
    if (worst > rep.certificate.bound - 10.0 * tol) {
      rep.truncation_warning = true;
      std::ostringstream os;
      os << "normality inequality is not slack at the truncated boundary of axis " << ax << " (value " << worst
         << "); enlarge the truncation bound";
      rep.warnings.push_back(os.str());
    }
  }
  if (rep.certificate.residual > tol) {
    std::ostringstream os;
    os << "E-criterion certificate search left residual " << rep.certificate.residual;
    rep.warnings.push_back(os.str());
  }
  rep.optimal = std::abs(rep.trace_mn - 1.0) <= tol && std::abs(rep.phi_times_polar - 1.0) <= tol &&
                rep.max_violation <= tol && rep.max_support_gap <= tol;
  return rep;
}

PolytopeReport polytope_report(const Certificate& cert, const Design& design, const Regression& f,
                               const CandidateSet& candidates, double tol) {
  PolytopeReport rep;
  const FeatureMatrix features = kernels::evaluate_features(f, candidates.points);
  const Matrix h = features * cert.Z;  // row i = h_Z(x_i)^T
  rep.squared_coords.reserve(candidates.size());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const Vector p = h.row(i).array().square();
    rep.max_candidate_constraint = std::max(rep.max_candidate_constraint, p.dot(cert.Lambda));
    rep.squared_coords.push_back(p);
  }
  for (const auto& a : design.atoms()) {
    const Vector fx = f(a.x);
    const Vector p = (cert.Z.transpose() * fx).array().square();
    const double lhs = p.dot(cert.Lambda);
    if (std::abs(lhs - cert.bound) > tol) {
      std::ostringstream os;
      os << "support point constraint P_Z(x)^T Lambda = " << lhs << " is not active";
      throw InconsistencyError(os.str());
    }
    const double len = fx.norm();
    bool placed = false;
    for (auto& hp : rep.hyperplanes) {
      const double scale = std::max(1.0, hp.c.lpNorm<Eigen::Infinity>());
      if ((hp.c - p).lpNorm<Eigen::Infinity>() <= 1e-5 * scale) {
        hp.active_support.push_back(a.x);
        hp.lengths.push_back(len);
        placed = true;
        break;
      }
    }
    if (!placed) rep.hyperplanes.push_back(Hyperplane{p, {a.x}, {len}});
  }
  double max_len = 0.0;
  for (const auto& hp : rep.hyperplanes) {
    for (double l : hp.lengths) max_len = std::max(max_len, l);
  }
  for (const auto& hp : rep.hyperplanes) {
    const auto [lo, hi] = std::minmax_element(hp.lengths.begin(), hp.lengths.end());
    rep.max_length_spread = std::max(rep.max_length_spread, *hi - *lo);
  }
  // Length groups over the whole support.
  std::vector<std::pair<double, Point>> lens;
  for (const auto& a : design.atoms()) lens.emplace_back(f(a.x).norm(), a.x);
  std::stable_sort(lens.begin(), lens.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  double start = -1.0;
  for (const auto& [l, x] : lens) {
    if (rep.length_groups.empty() || l - start > 1e-5 * std::max(max_len, 1e-300)) {
      rep.length_groups.emplace_back();
      start = l;
    }
    rep.length_groups.back().push_back(x);
  }
  return rep;
}

GarzaReport garza_report(const Regression& f, const CandidateSet& candidates, double norm_tol) {
  if (candidates.size() == 0) throw ValidationError("garza_report: empty candidate set");
  GarzaReport rep;
  const FeatureMatrix features = kernels::evaluate_features(f, candidates.points);
  rep.norm_values = kernels::squared_norms(features);
  std::vector<double> sorted(rep.norm_values.data(), rep.norm_values.data() + rep.norm_values.size());
  std::sort(sorted.begin(), sorted.end());
  int group = 0;
  double start = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i] - start > norm_tol) {
      start = sorted[i];
      group = 1;
    } else {
      ++group;
    }
    rep.max_equal_group_size = std::max(rep.max_equal_group_size, group);
  }
  rep.injective = rep.max_equal_group_size == 1;
  rep.saturation_bound = rep.injective ? f.k() : rep.max_equal_group_size * f.k();

  if (candidates.space.dimension() == 1 && candidates.size() > 1) {
    std::vector<size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return candidates.points[a](0) < candidates.points[b](0); });
    bool inc = true, dec = true;
    for (size_t i = 1; i < order.size(); ++i) {
      const double d = rep.norm_values(static_cast<Eigen::Index>(order[i])) -
                       rep.norm_values(static_cast<Eigen::Index>(order[i - 1]));
      inc = inc && d > 0.0;
      dec = dec && d < 0.0;
    }
    if (inc) rep.monotone_axis_note = "||f(x)||^2 is strictly increasing along the axis";
    if (dec) rep.monotone_axis_note = "||f(x)||^2 is strictly decreasing along the axis";
  }
  return rep;
}

SaturationCheck exp_saturation_check(const std::vector<double>& a, const std::vector<double>& lambda) {
  if (a.size() != lambda.size() || a.empty()) throw ValidationError("exp_saturation_check: size mismatch");
  SaturationCheck out;
  out.holds = true;
  for (size_t i = 0; i < a.size(); ++i) {
    const double margin = lambda[i] - std::abs(a[i]) / 2.0;
    out.margins.push_back(margin);
    out.holds = out.holds && margin >= 0.0;
  }
  return out;
}

RescaleCheck rescale_invariance_check(const std::vector<double>& a, const std::vector<double>& lambda, double c,
                                      const CandidateSet& candidates, const Criterion& criterion,
                                      const SolverOptions& opts) {
  if (!(c > 0.0)) throw ValidationError("rescale_invariance_check: c must be positive");
  const ModelSpec model = ModelSpec::exponential_sum(a, lambda, candidates.space);
  const size_t l_count = lambda.size();
  const Regression g("exponential-sum-rescaled", model.k(), 1,
                     [lambda, c, l_count](const Point& x, double* out) {
                       for (size_t l = 0; l < l_count; ++l) {
                         const double e = std::exp(-lambda[l] * x(0));
                         out[2 * l] = e;
                         out[2 * l + 1] = c * x(0) * e;
                       }
                     },
                     candidates.space);
  RescaleCheck out;
  out.original = solve(model, candidates, criterion, opts).design;
  out.rescaled = solve(g, candidates, criterion, opts).design;
  const double radius = candidates.min_step() * (1.0 + 1e-6) + 1e-12;
  auto covered = [&](const Design& x, const Design& y) {
    for (const auto& ax : x.atoms()) {
      bool hit = false;
      for (const auto& ay : y.atoms()) {
        if ((ax.x - ay.x).norm() <= radius && std::abs(ax.w - ay.w) <= 1e-4) hit = true;
      }
      if (!hit) return false;
    }
    return true;
  };
  out.coincide = out.original.size() == out.rescaled.size() && covered(out.original, out.rescaled) &&
                 covered(out.rescaled, out.original);
  return out;
}

}  // namespace optdesign
