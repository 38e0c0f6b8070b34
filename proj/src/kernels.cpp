#include "optdesign/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace optdesign::kernels {

int thread_count() {
  static const int count = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("OPTDESIGN_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap >= 1) n = std::min(n, cap);
      } catch (const std::exception&) {
      }
    }
    return std::max(n, 1);
  }();
  return count;
}

FeatureMatrix evaluate_features(const Regression& f, const std::vector<Point>& points) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  FeatureMatrix out(rows, f.k());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (Eigen::Index i = 0; i < rows; ++i) f.eval_into(points[static_cast<size_t>(i)], out.row(i).data());
  return out;
}

Vector quadratic_forms(const FeatureMatrix& features, const Matrix& n) {
  const Eigen::Index rows = features.rows(), k = features.cols();
  Vector out(rows);
#pragma omp parallel for schedule(static) num_threads(thread_count())
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
  const Eigen::Index n = v.size();
  const int threads = static_cast<int>(std::min<Eigen::Index>(thread_count(), std::max<Eigen::Index>(n / 4096, 1)));
  if (threads <= 1) return reference::argmax(v);
  std::vector<Eigen::Index> best(static_cast<size_t>(threads), 0);
#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    const Eigen::Index lo = n * t / threads, hi = n * (t + 1) / threads;
    Eigen::Index b = lo;
    for (Eigen::Index i = lo + 1; i < hi; ++i) {
      if (v(i) > v(b)) b = i;
    }
    best[static_cast<size_t>(t)] = b;
  }
  Eigen::Index out = best[0];
  for (int t = 1; t < threads; ++t) {
    if (v(best[static_cast<size_t>(t)]) > v(out)) out = best[static_cast<size_t>(t)];
  }
  return out;
}

Matrix weighted_gram(const FeatureMatrix& features, const Vector& w) {
  const Eigen::Index k = features.cols(), rows = features.rows();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (w(i) != 0.0) active.push_back(i);
  }
  Matrix m = Matrix::Zero(k, k);
  // One task per lower-triangle entry; each entry sums rows in index order.
  const Eigen::Index entries = k * (k + 1) / 2;
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (active.size() > 2048)
  for (Eigen::Index e = 0; e < entries; ++e) {
    Eigen::Index a = 0;
    while ((a + 1) * (a + 2) / 2 <= e) ++a;
    const Eigen::Index b = e - a * (a + 1) / 2;
    double acc = 0.0;
    for (Eigen::Index i : active) acc += w(i) * features(i, a) * features(i, b);
    m(a, b) = acc;
    m(b, a) = acc;
  }
  return m;
}

Vector squared_norms(const FeatureMatrix& features) {
  Vector out(features.rows());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index a = 0; a < features.cols(); ++a) acc += features(i, a) * features(i, a);
    out(i) = acc;
  }
  return out;
}

}  // namespace optdesign::kernels
