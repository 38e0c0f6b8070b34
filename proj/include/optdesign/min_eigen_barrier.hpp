#pragma once

#include "optdesign/kernels.hpp"

namespace optdesign {

/// Result of maximizing lambda_min(sum_i w_i f_i f_i^T - B) over the simplex.
struct MinEigenResult {
  Vector w;              // weights over the rows of the feature matrix
  double t = 0.0;        // attained lambda_min(M(w) - B)
  Matrix dual;           // Y = mu S^{-1}, trace(Y) ~ 1
  int newton_steps = 0;
  bool converged = false;
};

struct MinEigenOptions {
  double mu_start = 1e-2;   // relative to the problem scale
  double mu_end = 1e-15;    // relative to the problem scale
  int max_newton = 60;      // per barrier stage
};

/// Log-barrier interior-point method for
///   max t  s.t.  M(w) - B - t I > 0,  w in the simplex.
/// `w0` must be strictly positive; pass an empty vector for uniform weights.
MinEigenResult maximize_min_eigen(const FeatureMatrix& rows, const Matrix& offset, Vector w0 = {},
                                  const MinEigenOptions& opts = {});

}  // namespace optdesign
