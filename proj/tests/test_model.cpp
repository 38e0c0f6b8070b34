#include <doctest.h>

#include <cmath>
#include <random>

#include "optdesign/errors.hpp"
#include "optdesign/kernels.hpp"
#include "optdesign/model.hpp"
#include "oracles.hpp"

using namespace optdesign;
using oracle::pt;

namespace {

std::vector<ModelSpec> catalog() {
  std::vector<ModelSpec> out{
      ModelSpec::polynomial(3),
      ModelSpec::weighted_polynomial(2, Efficiency{Efficiency::Kind::exponential, 1.0, 0.5}),
      ModelSpec::linear_2f_no_intercept(),
      ModelSpec::interaction_2f(),
      ModelSpec::exp_growth_2f({0.5, 1.0, 2.0}),
      ModelSpec::exp_product_2f({1.0, 1.0, 2.0}, {1.0, 1.5}),
      ModelSpec::mixture_poly_exp(1.0),
  };
  ModelSpec es = ModelSpec::exponential_sum({1.0, -0.5}, {1.0, 2.0});
  out.push_back(es.with_space(truncate(es.space(), 0, default_exponential_truncation(es))));
  return out;
}

std::vector<double> steps_for(const ModelSpec& m, double per_axis) {
  return std::vector<double>(static_cast<size_t>(m.q()), per_axis);
}

}  // namespace

TEST_CASE("eval_f examples") {
  CHECK(ModelSpec::linear_2f_no_intercept().eval_f(pt({1, 0})).isApprox(pt({1, 0})));
  const Vector g = ModelSpec::exp_growth_2f({0.3, 1.0, 1.0}).eval_f(pt({0, 0}));
  CHECK(g(0) == 1.0);
  CHECK(g(1) == 0.0);
  CHECK(g(2) == 0.0);
  const Vector e = ModelSpec::exponential_sum({1.0}, {1.0}).eval_f(pt({1.0}));
  CHECK(e(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(e(1) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("eval_f rejects points outside the space") {
  CHECK_THROWS_AS(ModelSpec::linear_2f_no_intercept().eval_f(pt({1.5, 0})), DomainError);
  CHECK_THROWS_AS(ModelSpec::polynomial(2).eval_f(pt({0.5, 0.5})), DomainError);
  CHECK_THROWS_AS(ModelSpec::exp_growth_2f({0.0, 0.5, 1.0}), ValidationError);
  CHECK_THROWS_AS(ModelSpec::exponential_sum({1.0, 1.0}, {2.0, 1.0}), ValidationError);
}

TEST_CASE("efficiency examples") {
  const Point half = pt({0.5}), zero = pt({0.0}), one = pt({1.0});
  CHECK(ModelSpec::weighted_polynomial(1, Efficiency{}).eval_efficiency(half) == 1.0);
  CHECK(ModelSpec::weighted_polynomial(1, {Efficiency::Kind::exponential, 1.0, 1.0}).eval_efficiency(zero) == 1.0);
  CHECK(ModelSpec::weighted_polynomial(1, {Efficiency::Kind::linear, 1.0, 1.0}).eval_efficiency(one) == 2.0);
  CHECK_THROWS_AS(ModelSpec::weighted_polynomial(1, {Efficiency::Kind::linear, 1.0, -2.0}), ValidationError);
}

TEST_CASE("discretize examples") {
  CHECK(discretize(DesignSpace::unit_box(2), {0.5, 0.5}).size() == 9);
  const CandidateSet line = discretize(DesignSpace::unit_box(1), {0.25});
  REQUIRE(line.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(line.points[static_cast<size_t>(i)](0) == doctest::Approx(0.25 * i));
  CHECK(discretize(DesignSpace({{-1.0, 1.0}, {0.0, 2.0}}), {0.5, 1.0}).size() == 15);
  CHECK_THROWS_AS(discretize(DesignSpace({{0.0, std::numeric_limits<double>::infinity()}}), {0.1}),
                  MustTruncateError);
}

TEST_CASE("discretize keeps the upper endpoint when the step does not divide the span") {
  const CandidateSet c = discretize(DesignSpace({{0.0, 1.0}}), {0.3});
  CHECK(c.points.back()(0) == 1.0);
  for (const auto& x : c.points) CHECK(x(0) <= 1.0);
}

TEST_CASE("truncate examples") {
  const DesignSpace open({{0.0, std::numeric_limits<double>::infinity()}});
  const DesignSpace t = truncate(open, 0, 10.0);
  CHECK(t.axis(0).hi == 10.0);
  CHECK(t.truncated(0));
  CHECK(t.truncation_note().has_value());

  const ModelSpec es = ModelSpec::exponential_sum({1.0, 1.0}, {2.0, 3.0});
  CHECK(default_exponential_truncation(es) == doctest::Approx(1.5));

  const DesignSpace bounded = truncate(DesignSpace::unit_box(1), 0, 0.5);
  CHECK(bounded.axis(0).hi == 1.0);
  CHECK_FALSE(bounded.truncated(0));
  CHECK(bounded.truncation_note().has_value());
}

TEST_CASE("catalog evaluations are finite on the grid") {
  for (const auto& m : catalog()) {
    const CandidateSet c = discretize(m.space(), steps_for(m, 0.1));
    for (const auto& x : c.points) {
      const Vector f = m.eval_f(x);
      CHECK(f.allFinite());
    }
  }
}

TEST_CASE("exponential-sum squared norm identity") {
  const std::vector<double> a{1.0, -0.7}, lam{0.8, 1.9};
  ModelSpec es = ModelSpec::exponential_sum(a, lam);
  es = es.with_space(truncate(es.space(), 0, 4.0));
  for (const auto& x : discretize(es.space(), {0.05}).points) {
    double expected = 0.0;
    for (size_t i = 0; i < a.size(); ++i) expected += std::exp(-2.0 * lam[i] * x(0)) * (1.0 + a[i] * a[i] * x(0) * x(0));
    CHECK(es.eval_f(x).squaredNorm() == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("unit efficiency reproduces the plain polynomial") {
  for (int d = 0; d <= 5; ++d) {
    const ModelSpec w = ModelSpec::weighted_polynomial(d, Efficiency{});
    const ModelSpec p = ModelSpec::polynomial(d);
    for (const auto& x : discretize(p.space(), {0.01}).points) CHECK(w.eval_f(x) == p.eval_f(x));
  }
}

TEST_CASE("every family has linearly independent regressors") {
  std::mt19937_64 rng(5);
  for (const auto& m : catalog()) {
    const CandidateSet c = discretize(m.space(), steps_for(m, 0.05));
    const auto pts = oracle::random_points(rng, c.points, static_cast<size_t>(m.k() + 5));
    const FeatureMatrix fm = kernels::reference::evaluate_features(m, pts);
    const Matrix gram = fm.transpose() * fm;
    CAPTURE(m.family_name());
    CHECK(linalg::numerical_rank(gram) == m.k());
  }
}

TEST_CASE("regression wrapper checks its domain") {
  const Regression r("square", 1, 1, [](const Point& x, double* out) { out[0] = x(0) * x(0); },
                     DesignSpace::unit_box(1));
  CHECK(r(pt({0.5}))(0) == 0.25);
  CHECK_THROWS_AS(r(pt({2.0})), DomainError);
  CHECK_THROWS_AS(r(pt({0.5, 0.5})), DomainError);
}
