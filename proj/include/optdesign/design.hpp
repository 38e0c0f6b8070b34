#pragma once

#include <vector>

#include "optdesign/model.hpp"

namespace optdesign {

struct Atom {
  Point x;
  double w = 0.0;
};

/// Approximate design: distinct support points carrying positive weights that
/// sum to one.
class Design {
 public:
  Design() = default;
  /// Validates the atoms. Weights whose sum is within 1e-6 of one are
  /// renormalized exactly; anything further off is rejected.
  explicit Design(std::vector<Atom> atoms);

  static Design uniform(const std::vector<Point>& points);
  static Design from_weights(const std::vector<Point>& points, const Vector& weights);

  const std::vector<Atom>& atoms() const { return atoms_; }
  size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  int dimension() const { return atoms_.empty() ? 0 : static_cast<int>(atoms_.front().x.size()); }
  std::vector<Point> points() const;
  Vector weights() const;

 private:
  std::vector<Atom> atoms_;
};

/// alpha * a + (1 - alpha) * b, identical support points combined.
Design mix(const Design& a, const Design& b, double alpha);

/// Integer replications per support point.
struct ExactDesign {
  std::vector<Point> points;
  std::vector<long> reps;
  long n = 0;
};

/// M = sum_i w_i f(x_i) f(x_i)^T, summed in atom order.
Matrix info_matrix(const Design& design, const Regression& f);

/// Atoms closer than `tol` (Euclidean) are merged into their weighted centroid
/// (single linkage).
Design merge_close(const Design& design, double tol);

/// Drops atoms with weight below `wmin` and renormalizes.
Design prune(const Design& design, double wmin);

/// Efficient apportionment of n runs; ties in the repair step go to the lowest
/// atom index.
ExactDesign round_to_n(const Design& design, long n);

}  // namespace optdesign
