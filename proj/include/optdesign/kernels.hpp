#pragma once

#include <vector>

#include "optdesign/model.hpp"

namespace optdesign {

/// One row per candidate: row i is f(x_i)^T.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Candidate sweeps. The default namespace runs with OpenMP; `reference`
/// holds the serial versions the tests compare against. Both give bitwise
/// identical results: every reduction uses a fixed order.
namespace kernels {

/// Thread count used by the parallel kernels (OPTDESIGN_THREADS caps it).
int thread_count();

FeatureMatrix evaluate_features(const Regression& f, const std::vector<Point>& points);
/// r_i = F_i N F_i^T
Vector quadratic_forms(const FeatureMatrix& features, const Matrix& n);
/// Index of the largest entry; the lowest index wins ties.
Eigen::Index argmax(const Vector& v);
/// sum_i w_i F_i^T F_i over rows with w_i != 0.
Matrix weighted_gram(const FeatureMatrix& features, const Vector& w);
/// ||F_i||^2
Vector squared_norms(const FeatureMatrix& features);

namespace reference {
FeatureMatrix evaluate_features(const Regression& f, const std::vector<Point>& points);
Vector quadratic_forms(const FeatureMatrix& features, const Matrix& n);
Eigen::Index argmax(const Vector& v);
Matrix weighted_gram(const FeatureMatrix& features, const Vector& w);
Vector squared_norms(const FeatureMatrix& features);
}  // namespace reference

}  // namespace kernels
}  // namespace optdesign
