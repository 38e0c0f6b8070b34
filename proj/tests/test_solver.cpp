#include <doctest.h>

#include "optdesign/certificate.hpp"
#include "optdesign/errors.hpp"
#include "optdesign/solver.hpp"
#include "oracles.hpp"

using namespace optdesign;
using oracle::pt;

namespace {

const ModelSpec kLinear = ModelSpec::linear_2f_no_intercept();

double mass_at(const Design& d, const Point& x) {
  for (const auto& a : d.atoms()) {
    if ((a.x - x).cwiseAbs().maxCoeff() < 1e-9) return a.w;
  }
  return 0.0;
}

struct Case {
  ModelSpec model;
  std::vector<double> steps;
};

std::vector<Case> cases() {
  ModelSpec es = ModelSpec::exponential_sum({1.0, 1.0}, {1.0, 2.0});
  es = es.with_space(truncate(es.space(), 0, default_exponential_truncation(es)));
  return {
      {kLinear, {0.05, 0.05}},
      {ModelSpec::polynomial(3), {0.01}},
      {ModelSpec::weighted_polynomial(2, {Efficiency::Kind::exponential, 1.0, -1.0}), {0.01}},
      {ModelSpec::interaction_2f(), {0.1, 0.1}},
      {ModelSpec::exp_growth_2f({1.0, 1.0, 2.0}), {0.05, 0.05}},
      {es, {0.01}},
  };
}

}  // namespace

TEST_CASE("solve examples on Example 2.1") {
  const CandidateSet grid = discretize(kLinear.space(), {0.05, 0.05});
  const SolveReport d = solve(kLinear, grid, Criterion::D());
  CHECK(d.converged);
  for (const Point& x : {pt({1, 1}), pt({1, 0}), pt({0, 1})}) CHECK(mass_at(d.design, x) == doctest::Approx(1.0 / 3).epsilon(1e-4));

  const SolveReport e = solve(kLinear, grid, Criterion::E());
  CHECK(e.converged);
  CHECK(mass_at(e.design, pt({1, 0})) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(mass_at(e.design, pt({0, 1})) == doctest::Approx(0.5).epsilon(1e-4));

  const SolveReport a = solve(kLinear, grid, Criterion::A());
  const double w = 1.0 - 4.0 / (3.0 + std::sqrt(3.0));
  CHECK(mass_at(a.design, pt({1, 1})) == doctest::Approx(w).epsilon(1e-4));
  CHECK(mass_at(a.design, pt({1, 0})) == doctest::Approx((1.0 - w) / 2).epsilon(1e-4));

  const SolveReport t = solve(kLinear, grid, Criterion::T());
  CHECK(mass_at(t.design, pt({1, 1})) == doctest::Approx(1.0));
}

TEST_CASE("growth model puts 1/4 on the corners") {
  const ModelSpec m = ModelSpec::exp_growth_2f({1.0, 1.0, 1.0});
  const SolveReport r = solve(m, discretize(m.space(), {0.05, 0.05}), Criterion::D());
  CHECK(r.converged);
  CHECK(r.design.size() == 4);
  for (const Point& x : {pt({0, 0}), pt({0, 1}), pt({1, 0}), pt({1, 1})}) {
    CHECK(mass_at(r.design, x) == doctest::Approx(0.25).epsilon(1e-3));
  }
}

TEST_CASE("refine_weights examples") {
  const SolverOptions opts;
  const Design d = refine_weights(kLinear, {pt({1, 1}), pt({1, 0}), pt({0, 1})}, Criterion::D(), opts);
  for (const auto& a : d.atoms()) CHECK(a.w == doctest::Approx(1.0 / 3).epsilon(1e-6));
  const Design e = refine_weights(kLinear, {pt({1, 0}), pt({0, 1})}, Criterion::E(), opts);
  for (const auto& a : e.atoms()) CHECK(a.w == doctest::Approx(0.5).epsilon(1e-6));
  const Design one = refine_weights(kLinear, {pt({1, 1})}, Criterion::T(), opts);
  REQUIRE(one.size() == 1);
  CHECK(one.atoms()[0].w == 1.0);
}

TEST_CASE("solver errors and budgets") {
  const CandidateSet line = make_candidates(kLinear.space(), {pt({0, 0}), pt({0.5, 0}), pt({1, 0})});
  CHECK_THROWS_AS(solve(kLinear, line, Criterion::D()), DegenerateModelError);

  SolverOptions tight;
  tight.max_outer_iters = 1;
  tight.max_inner_iters = 1;
  const ModelSpec p = ModelSpec::polynomial(4);
  const SolveReport r = solve(p, discretize(p.space(), {0.001}), Criterion::D(), tight);
  CHECK_FALSE(r.converged);
  CHECK(r.max_sensitivity_violation > tight.kkt_tol);
  CHECK_FALSE(r.notes.empty());

  SolverOptions bad;
  bad.kkt_tol = 0.0;
  CHECK_THROWS_AS(solve(kLinear, discretize(kLinear.space(), {0.5, 0.5}), Criterion::D(), bad), ValidationError);
}

TEST_CASE("D value matches a long multiplicative run on a small grid") {
  const ModelSpec m = ModelSpec::polynomial(2);
  const CandidateSet grid = discretize(m.space(), {0.05});
  const SolveReport r = solve(m, grid, Criterion::D());
  const double oracle_value = oracle::d_optimal_value(grid.points, m, 20000);
  CHECK(r.criterion_value >= oracle_value - 1e-8);
  CHECK(r.criterion_value == doctest::Approx(oracle_value).epsilon(1e-6));
}

TEST_CASE("criterion value never decreases across outer iterations") {
  for (const auto& c : cases()) {
    for (double p : {0.0, -1.0, 0.5}) {
      const SolveReport r = solve(c.model, discretize(c.model.space(), c.steps), Criterion::with_p(p));
      CAPTURE(c.model.family_name());
      CAPTURE(p);
      for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1] - 1e-12);
    }
  }
}

TEST_CASE("converged runs certify at twice the tolerance") {
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& c : cases()) {
    const CandidateSet grid = discretize(c.model.space(), c.steps);
    for (double p : {0.0, -1.0, -3.0, 0.5, -inf}) {
      SolverOptions opts;
      const SolveReport r = solve(c.model, grid, Criterion::with_p(p), opts);
      CAPTURE(c.model.family_name());
      CAPTURE(p);
      CHECK(r.converged);
      if (!r.converged) continue;
      CHECK(certify(r.design, c.model, grid, Criterion::with_p(p), 2.0 * opts.kkt_tol).optimal);
    }
  }
}

TEST_CASE("injective-norm models need at most k atoms") {
  for (int d = 1; d <= 5; ++d) {
    const ModelSpec m = ModelSpec::weighted_polynomial(d, {Efficiency::Kind::linear, 1.0, 1.0});
    const CandidateSet grid = discretize(m.space(), {0.002});
    REQUIRE(garza_report(m, grid).injective);
    for (double p : {0.0, -1.0}) {
      const SolveReport r = solve(m, grid, Criterion::with_p(p));
      CHECK(r.converged);
      CHECK(r.design.size() <= static_cast<size_t>(m.k()));
    }
  }
}

TEST_CASE("criterion value does not depend on the seed") {
  const ModelSpec m = ModelSpec::interaction_2f();
  const CandidateSet grid = discretize(m.space(), {0.05, 0.05});
  for (double p : {0.0, -1.0}) {
    std::vector<double> values;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
      SolverOptions opts;
      opts.seed = seed;
      values.push_back(solve(m, grid, Criterion::with_p(p), opts).criterion_value);
    }
    for (double v : values) CHECK(v == doctest::Approx(values.front()).epsilon(1e-6));
  }
}

TEST_CASE("spread_start spans the regression space") {
  const ModelSpec m = ModelSpec::polynomial(5);
  const CandidateSet grid = discretize(m.space(), {0.01});
  const FeatureMatrix f = kernels::evaluate_features(m, grid.points);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto idx = spread_start(f, m.k() + 1, true, seed);
    Matrix g = Matrix::Zero(m.k(), m.k());
    for (auto i : idx) g += f.row(i).transpose() * f.row(i);
    CHECK(linalg::numerical_rank(g) == m.k());
  }
}

TEST_CASE("an initial design is honoured and completed") {
  const CandidateSet grid = discretize(kLinear.space(), {0.05, 0.05});
  SolverOptions opts;
  opts.init_design = Design::uniform({pt({0.5, 0.5})});
  const SolveReport r = solve(kLinear, grid, Criterion::D(), opts);
  CHECK(r.converged);
  CHECK(mass_at(r.design, pt({1, 1})) == doctest::Approx(1.0 / 3).epsilon(1e-4));
}
