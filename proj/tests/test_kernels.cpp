#include <doctest.h>

#include <random>

#include "optdesign/kernels.hpp"
#include "oracles.hpp"

using namespace optdesign;

namespace {

struct Fixture {
  ModelSpec model = ModelSpec::mixture_poly_exp(1.0);
  CandidateSet grid = discretize(model.space(), {0.01, 0.01});
};

bool same(const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

}  // namespace

TEST_CASE("thread count is positive") { CHECK(kernels::thread_count() >= 1); }

TEST_CASE("parallel kernels are bitwise equal to the serial reference") {
  Fixture fx;
  std::mt19937_64 rng(21);
  const FeatureMatrix fp = kernels::evaluate_features(fx.model, fx.grid.points);
  const FeatureMatrix fs = kernels::reference::evaluate_features(fx.model, fx.grid.points);
  CHECK(fp == fs);

  const Matrix n = oracle::random_pd(rng, fx.model.k());
  const Vector qp = kernels::quadratic_forms(fp, n);
  CHECK(qp == kernels::reference::quadratic_forms(fs, n));
  CHECK(kernels::argmax(qp) == kernels::reference::argmax(qp));

  const Vector w = oracle::random_weights(rng, fp.rows());
  CHECK(same(kernels::weighted_gram(fp, w), kernels::reference::weighted_gram(fs, w)));
  CHECK(kernels::squared_norms(fp) == kernels::reference::squared_norms(fs));
}

TEST_CASE("kernels agree with loop oracles") {
  Fixture fx;
  std::mt19937_64 rng(22);
  const auto pts = oracle::random_points(rng, fx.grid.points, 300);
  const FeatureMatrix f = kernels::evaluate_features(fx.model, pts);
  const Matrix n = oracle::random_pd(rng, fx.model.k());
  const Vector q = kernels::quadratic_forms(f, n);
  const Vector norms = kernels::squared_norms(f);
  for (size_t i = 0; i < pts.size(); ++i) {
    const Vector fi = fx.model.eval_f(pts[i]);
    CHECK(f.row(static_cast<Eigen::Index>(i)).transpose() == fi);
    CHECK(q(static_cast<Eigen::Index>(i)) == doctest::Approx(fi.dot(n * fi)).epsilon(1e-13));
    CHECK(norms(static_cast<Eigen::Index>(i)) == doctest::Approx(fi.squaredNorm()).epsilon(1e-14));
  }
  const Vector w = oracle::random_weights(rng, f.rows());
  const Matrix expected = oracle::info_matrix(pts, {w.data(), w.data() + w.size()}, fx.model);
  CHECK((kernels::weighted_gram(f, w) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("argmax returns the lowest index among ties") {
  Vector v = Vector::Zero(100000);
  v(70000) = 3.0;
  v(20000) = 3.0;
  v(99999) = 3.0;
  CHECK(kernels::argmax(v) == 20000);
  CHECK(kernels::reference::argmax(v) == 20000);
  Vector flat = Vector::Constant(50000, -1.0);
  CHECK(kernels::argmax(flat) == 0);
  Vector small(3);
  small << 1.0, 5.0, 5.0;
  CHECK(kernels::argmax(small) == 1);
}

TEST_CASE("argmax agrees with the reference on random vectors") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> level(0, 50);
  for (Eigen::Index n : {1, 7, 4096, 8193, 100003}) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = level(rng);
    CHECK(kernels::argmax(v) == kernels::reference::argmax(v));
  }
}
