#include "optdesign/design.hpp"

#include <cmath>
#include <numeric>

#include "optdesign/errors.hpp"

namespace optdesign {

Design::Design(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw EmptyDesignError("design has no atoms");
  const Eigen::Index q = atoms_.front().x.size();
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.x.size() != q || q == 0) throw ValidationError("design atoms must share one positive dimension");
    if (!a.x.allFinite()) throw ValidationError("design atom has non-finite coordinates");
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw ValidationError("design weights must be positive");
    total += a.w;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw ValidationError("design weights sum to " + std::to_string(total) + ", expected 1");
  }
  for (auto& a : atoms_) a.w /= total;
  for (size_t i = 0; i < atoms_.size(); ++i) {
    for (size_t j = i + 1; j < atoms_.size(); ++j) {
      if (atoms_[i].x == atoms_[j].x) throw ValidationError("design support points must be distinct");
    }
  }
}

Design Design::uniform(const std::vector<Point>& points) {
  std::vector<Atom> atoms;
  for (const auto& p : points) atoms.push_back({p, 1.0 / static_cast<double>(points.size())});
  return Design(std::move(atoms));
}

Design Design::from_weights(const std::vector<Point>& points, const Vector& weights) {
  if (static_cast<Eigen::Index>(points.size()) != weights.size()) {
    throw ValidationError("from_weights: size mismatch");
  }
  std::vector<Atom> atoms;
  double total = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (weights(static_cast<Eigen::Index>(i)) > 0.0) {
      atoms.push_back({points[i], weights(static_cast<Eigen::Index>(i))});
      total += atoms.back().w;
    }
  }
  for (auto& a : atoms) a.w /= total;
  return Design(std::move(atoms));
}

std::vector<Point> Design::points() const {
  std::vector<Point> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.x);
  return out;
}

Vector Design::weights() const {
  Vector w(static_cast<Eigen::Index>(atoms_.size()));
  for (size_t i = 0; i < atoms_.size(); ++i) w(static_cast<Eigen::Index>(i)) = atoms_[i].w;
  return w;
}

Design mix(const Design& a, const Design& b, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw ValidationError("mix: alpha must lie in [0,1]");
  if (alpha == 1.0) return a;
  if (alpha == 0.0) return b;
  std::vector<Atom> atoms;
  for (const auto& at : a.atoms()) atoms.push_back({at.x, alpha * at.w});
  for (const auto& bt : b.atoms()) {
    bool found = false;
    for (auto& at : atoms) {
      if (at.x == bt.x) {
        at.w += (1.0 - alpha) * bt.w;
        found = true;
        break;
      }
    }
    if (!found) atoms.push_back({bt.x, (1.0 - alpha) * bt.w});
  }
  return Design(std::move(atoms));
}

Matrix info_matrix(const Design& design, const Regression& f) {
  const int k = f.k();
  Matrix m = Matrix::Zero(k, k);
  for (const auto& a : design.atoms()) {
    const Vector v = f(a.x);
    m.selfadjointView<Eigen::Lower>().rankUpdate(v, a.w);
  }
  return m.selfadjointView<Eigen::Lower>();
}

Design merge_close(const Design& design, double tol) {
  if (tol < 0.0) throw ValidationError("merge_close: tol must be nonnegative");
  const size_t m = design.size();
  if (m == 0) return design;
  // Union-find over pairs closer than tol.
  std::vector<size_t> parent(m);
  std::iota(parent.begin(), parent.end(), size_t{0});
  auto find = [&](size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const auto& atoms = design.atoms();
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      if ((atoms[i].x - atoms[j].x).norm() <= tol) {
        const size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::vector<Atom> out;
  std::vector<long> slot(m, -1);
  for (size_t i = 0; i < m; ++i) {
    const size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.size());
      out.push_back({Point::Zero(atoms[i].x.size()), 0.0});
    }
    Atom& acc = out[static_cast<size_t>(slot[r])];
    acc.x += atoms[i].w * atoms[i].x;
    acc.w += atoms[i].w;
  }
  for (auto& a : out) a.x /= a.w;
  return Design(std::move(out));
}

Design prune(const Design& design, double wmin) {
  std::vector<Atom> kept;
  for (const auto& a : design.atoms()) {
    if (a.w >= wmin) kept.push_back(a);
  }
  if (kept.empty()) throw EmptyDesignError("prune: every atom is below the weight floor");
  if (kept.size() == design.size()) return design;
  double total = 0.0;
  for (const auto& a : kept) total += a.w;
  for (auto& a : kept) a.w /= total;
  return Design(std::move(kept));
}

ExactDesign round_to_n(const Design& design, long n) {
  const long m = static_cast<long>(design.size());
  if (m == 0) throw EmptyDesignError("round_to_n: empty design");
  if (n < m) throw InfeasibleError("round_to_n: n is smaller than the number of atoms");
  const Vector w = design.weights();
  std::vector<long> reps(static_cast<size_t>(m));
  long total = 0;
  for (long i = 0; i < m; ++i) {
    reps[static_cast<size_t>(i)] =
        std::max(1L, static_cast<long>(std::ceil((static_cast<double>(n) - 0.5 * static_cast<double>(m)) * w(i))));
    total += reps[static_cast<size_t>(i)];
  }
  while (total < n) {
    long best = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (long i = 0; i < m; ++i) {
      const double r = static_cast<double>(reps[static_cast<size_t>(i)]) / w(i);
      if (r < best_ratio) {
        best_ratio = r;
        best = i;
      }
    }
    ++reps[static_cast<size_t>(best)];
    ++total;
  }
  while (total > n) {
    long best = -1;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < m; ++i) {
      if (reps[static_cast<size_t>(i)] <= 1) continue;
      const double r = static_cast<double>(reps[static_cast<size_t>(i)] - 1) / w(i);
      if (r > best_ratio) {
        best_ratio = r;
        best = i;
      }
    }
    --reps[static_cast<size_t>(best)];
    --total;
  }
  return ExactDesign{design.points(), std::move(reps), n};
}

}  // namespace optdesign
