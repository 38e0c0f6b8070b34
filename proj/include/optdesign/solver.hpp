#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optdesign/criteria.hpp"
#include "optdesign/design.hpp"
#include "optdesign/kernels.hpp"

namespace optdesign {

struct SolverOptions {
  int max_outer_iters = 500;
  int max_inner_iters = 5000;
  /// Allowed slack in the normality inequality (bound normalized to 1).
  double kkt_tol = 1e-5;
  double weight_floor = 1e-6;
  std::uint64_t seed = 0;
  /// Starting design; when absent, k+1 spread candidates with uniform weights.
  std::optional<Design> init_design;
  /// Merge radius for the reported design; negative means one grid step.
  double merge_tol = -1.0;
};

struct SolveReport {
  Design design;
  double criterion_value = 0.0;
  int iterations = 0;
  double max_sensitivity_violation = 0.0;
  bool converged = false;
  /// Criterion value after every outer iteration.
  std::vector<double> history;
  std::vector<std::string> notes;
};

/// Optimal weights on a fixed set of feature rows.
struct WeightSolution {
  Vector w;
  Matrix dual;   // normalized so the bound of f^T N f is 1
  double value = 0.0;
  int iterations = 0;
};

/// Vertex-direction outer loop over a candidate set with criterion-specific
/// weight refinement on the active support.
SolveReport solve(const Regression& f, const CandidateSet& candidates, const Criterion& c,
                  const SolverOptions& opts = {});

/// Optimal weights on a fixed support.
Design refine_weights(const Regression& f, const std::vector<Point>& support, const Criterion& c,
                      const SolverOptions& opts = {});

/// Feature-level weight refinement: multiplicative updates for D, a
/// log-barrier method for E, projected gradient with Armijo backtracking
/// otherwise. `w0` may be empty (uniform start).
WeightSolution optimize_weights(const FeatureMatrix& rows, const Criterion& c, Vector w0, int max_iters,
                                double tol);

/// Indices of `count` candidates spread by greedy max-min distance in feature
/// space, starting from a seeded random index. For p <= 0 the pass continues
/// until the chosen rows span R^k.
std::vector<Eigen::Index> spread_start(const FeatureMatrix& features, int count, bool need_full_rank,
                                       std::uint64_t seed);

}  // namespace optdesign
