#include "optdesign/kernels.hpp"

namespace optdesign::kernels::reference {

FeatureMatrix evaluate_features(const Regression& f, const std::vector<Point>& points) {
  FeatureMatrix out(static_cast<Eigen::Index>(points.size()), f.k());
  for (size_t i = 0; i < points.size(); ++i) f.eval_into(points[i], out.row(static_cast<Eigen::Index>(i)).data());
  return out;
}

Vector quadratic_forms(const FeatureMatrix& features, const Matrix& n) {
  const Eigen::Index rows = features.rows(), k = features.cols();
  Vector out(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double* fi = features.row(i).data();
    double acc = 0.0;
    for (Eigen::Index a = 0; a < k; ++a) {
      double inner = 0.0;
      for (Eigen::Index b = 0; b < k; ++b) inner += n(a, b) * fi[b];
      acc += fi[a] * inner;
    }
    out(i) = acc;
  }
  return out;
}

Eigen::Index argmax(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

Matrix weighted_gram(const FeatureMatrix& features, const Vector& w) {
  const Eigen::Index k = features.cols();
  Matrix m = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    if (w(i) == 0.0) continue;
    const double* fi = features.row(i).data();
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b <= a; ++b) m(a, b) += w(i) * fi[a] * fi[b];
    }
  }
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) m(a, b) = m(b, a);
  }
  return m;
}

Vector squared_norms(const FeatureMatrix& features) {
  Vector out(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index a = 0; a < features.cols(); ++a) acc += features(i, a) * features(i, a);
    out(i) = acc;
  }
  return out;
}

}  // namespace optdesign::kernels::reference
