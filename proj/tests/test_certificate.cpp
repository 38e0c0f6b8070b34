#include <doctest.h>

#include <random>

#include "optdesign/certificate.hpp"
#include "optdesign/conditional_models.hpp"
#include "optdesign/errors.hpp"
#include "oracles.hpp"

using namespace optdesign;
using oracle::pt;

namespace {

const ModelSpec kLinear = ModelSpec::linear_2f_no_intercept();

Matrix d_optimal_m() {
  Matrix m(2, 2);
  m << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
  return m;
}

double max_quadratic(const Matrix& n, const Regression& f, const CandidateSet& c) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : c.points) {
    const Vector v = f(x);
    best = std::max(best, v.dot(n * v));
  }
  return best;
}

}  // namespace

TEST_CASE("build_certificate examples") {
  const CandidateSet grid = discretize(kLinear.space(), {0.05, 0.05});
  const Certificate d = build_certificate(Criterion::D(), d_optimal_m(), kLinear, grid);
  Matrix expected(2, 2);
  expected << 1.0, -0.5, -0.5, 1.0;
  CHECK((d.N - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((d_optimal_m() * d.N).trace() == doctest::Approx(1.0));

  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  const Certificate e = build_certificate(Criterion::E(), half, kLinear, grid);
  CHECK(e.eigenspace_dim == 2);
  CHECK((half * e.N).trace() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.N.trace() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(e.N(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.N(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  // Any off-diagonal in [-1, -1/2] is feasible here.
  CHECK(e.N(0, 1) <= -0.5 + 1e-6);
  CHECK(max_quadratic(e.N, kLinear, grid) <= 1.0 + 1e-6);
  CHECK(linalg::min_eigenvalue(e.N) >= -1e-12);

  const Certificate id = build_certificate(Criterion::D(), Matrix::Identity(2, 2), kLinear, grid);
  CHECK(id.N.isApprox(0.5 * Matrix::Identity(2, 2)));

  CHECK_THROWS_AS(build_certificate(Criterion::D(), Matrix::Zero(2, 2), kLinear, grid), ValidationError);
}

TEST_CASE("certify examples") {
  const CandidateSet grid = discretize(kLinear.space(), {0.05, 0.05});
  const Design opt = Design::uniform({pt({1, 1}), pt({1, 0}), pt({0, 1})});
  const CertifyReport r = certify(opt, kLinear, grid, Criterion::D());
  CHECK(r.optimal);
  for (double s : r.support_sensitivities) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.trace_mn == doctest::Approx(1.0));
  CHECK(r.phi_times_polar == doctest::Approx(1.0));

  const Design off({{pt({1, 1}), 0.5}, {pt({1, 0}), 0.25}, {pt({0, 1}), 0.25}});
  const CertifyReport bad = certify(off, kLinear, grid, Criterion::D());
  CHECK_FALSE(bad.optimal);
  CHECK(bad.max_violation > 0.0);
  REQUIRE(bad.violating_point.has_value());
  const Vector f = kLinear.eval_f(*bad.violating_point);
  const Matrix mi = info_matrix(off, kLinear).inverse();
  CHECK(f.dot(mi * f) / 2.0 - 1.0 == doctest::Approx(bad.max_violation).epsilon(1e-9));

  const Design spread = Design::uniform(grid.points);
  const CertifyReport u = certify(spread, kLinear, grid, Criterion::D());
  CHECK_FALSE(u.optimal);
  REQUIRE(u.violating_point.has_value());
  const Point v = *u.violating_point;
  CHECK(std::min((v - pt({1, 0})).norm(), (v - pt({0, 1})).norm()) < 1e-12);
}

TEST_CASE("polytope_report examples") {
  const CandidateSet grid = discretize(kLinear.space(), {0.05, 0.05});
  const Design dopt = Design::uniform({pt({1, 1}), pt({1, 0}), pt({0, 1})});
  const Certificate cd = build_certificate(Criterion::D(), info_matrix(dopt, kLinear), kLinear, grid);
  const PolytopeReport pd = polytope_report(cd, dopt, kLinear, grid);
  REQUIRE(pd.hyperplanes.size() == 2);
  CHECK(pd.max_candidate_constraint <= 1.0 + 1e-9);

  const Design eopt = Design::uniform({pt({1, 0}), pt({0, 1})});
  const Certificate ce = build_certificate(Criterion::E(), info_matrix(eopt, kLinear), kLinear, grid);
  const PolytopeReport pe = polytope_report(ce, eopt, kLinear, grid);
  REQUIRE(pe.hyperplanes.size() == 1);
  CHECK(pe.hyperplanes[0].active_support.size() == 2);
  for (double len : pe.hyperplanes[0].lengths) CHECK(len == doctest::Approx(1.0));
  CHECK(pe.length_groups.size() == 1);

  const Regression scalar("x", 1, 1, [](const Point& x, double* out) { out[0] = x(0); }, DesignSpace::unit_box(1));
  const CandidateSet line = discretize(DesignSpace::unit_box(1), {0.1});
  const Design at_one = Design::uniform({pt({1.0})});
  const Certificate c1 = build_certificate(Criterion::D(), info_matrix(at_one, scalar), scalar, line);
  const PolytopeReport p1 = polytope_report(c1, at_one, scalar, line);
  REQUIRE(p1.hyperplanes.size() == 1);
  CHECK(p1.hyperplanes[0].c(0) == doctest::Approx(1.0));

  const Design extra({{pt({1, 1}), 0.3}, {pt({1, 0}), 0.3}, {pt({0, 1}), 0.3}, {pt({0.5, 0.5}), 0.1}});
  CHECK_THROWS_AS(polytope_report(cd, extra, kLinear, grid), InconsistencyError);
}

TEST_CASE("garza examples") {
  for (int d = 1; d <= 5; ++d) {
    const ModelSpec m = ModelSpec::weighted_polynomial(d, Efficiency{});
    const GarzaReport g = garza_report(m, discretize(m.space(), {0.001}));
    CHECK(g.injective);
    CHECK(g.saturation_bound == d + 1);
  }
  ModelSpec es = ModelSpec::exponential_sum({1.0, -2.0}, {1.0, 1.5});
  es = es.with_space(truncate(es.space(), 0, default_exponential_truncation(es)));
  const GarzaReport ge = garza_report(es, discretize(es.space(), {0.01}));
  CHECK(ge.injective);
  CHECK(ge.saturation_bound == 4);

  const Regression cubic = marginal_model(ModelSpec::mixture_poly_exp(1.0), 0);
  const GarzaReport gm = garza_report(cubic, discretize(DesignSpace({{-1.0, 1.0}}), {0.01}));
  CHECK_FALSE(gm.injective);
  CHECK(gm.max_equal_group_size == 2);
  CHECK(gm.saturation_bound == 6);
}

TEST_CASE("garza norm values match the closed form") {
  const ModelSpec m = ModelSpec::polynomial(3);
  const CandidateSet grid = discretize(m.space(), {0.1});
  const GarzaReport g = garza_report(m, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.points[i](0);
    CHECK(g.norm_values(static_cast<Eigen::Index>(i)) == doctest::Approx(1 + x * x + std::pow(x, 4) + std::pow(x, 6)));
  }
}

TEST_CASE("exp_saturation_check examples") {
  const SaturationCheck a = exp_saturation_check({1, 1}, {1, 2});
  CHECK(a.holds);
  CHECK(a.margins == std::vector<double>{0.5, 1.5});
  const SaturationCheck b = exp_saturation_check({3}, {1});
  CHECK_FALSE(b.holds);
  CHECK(b.margins[0] == doctest::Approx(-0.5));
  const SaturationCheck c = exp_saturation_check({2}, {1});
  CHECK(c.holds);
  CHECK(c.margins[0] == 0.0);
}

TEST_CASE("rescale_invariance_check examples") {
  const CandidateSet g1 = discretize(DesignSpace({{0.0, 3.0}}), {0.01});
  CHECK(rescale_invariance_check({5.0}, {1.0}, 1.0, g1).coincide);
  const CandidateSet g2 = discretize(DesignSpace({{0.0, 3.0}}), {0.01});
  CHECK(rescale_invariance_check({1.0, -1.0}, {1.0, 2.0}, 2.0, g2).coincide);
  CHECK(rescale_invariance_check({1.0, 1.0}, {1.0, 2.0}, 1.0, g2).coincide);
}

TEST_CASE("weak duality sandwich on random designs") {
  std::mt19937_64 rng(31);
  const ModelSpec m = ModelSpec::interaction_2f();
  const CandidateSet grid = discretize(m.space(), {0.1, 0.1});
  const FeatureMatrix f = kernels::evaluate_features(m, grid.points);
  for (double p : {0.0, -1.0, -2.0, 0.5}) {
    const Criterion c = Criterion::with_p(p);
    for (int rep = 0; rep < 20; ++rep) {
      Matrix n = dual_matrix(c, oracle::random_pd(rng, m.k(), 0.1));
      n /= kernels::quadratic_forms(f, n).maxCoeff();
      const double bound = 1.0 / polar(c, n);
      const auto pts = oracle::random_points(rng, grid.points, 6);
      const Design d = Design::from_weights(pts, oracle::random_weights(rng, 6));
      CHECK(phi(c, info_matrix(d, m)) <= bound + 1e-8);
    }
  }
}

TEST_CASE("certified designs satisfy the geometry laws") {
  ModelSpec es = ModelSpec::exponential_sum({1.0, 1.0}, {1.0, 2.0});
  es = es.with_space(truncate(es.space(), 0, default_exponential_truncation(es)));
  const std::vector<std::pair<ModelSpec, std::vector<double>>> models{
      {kLinear, {0.05, 0.05}},
      {ModelSpec::polynomial(3), {0.01}},
      {ModelSpec::exp_growth_2f({1.0, 1.0, 1.0}), {0.05, 0.05}},
      {es, {0.01}},
  };
  for (const auto& [m, steps] : models) {
    const CandidateSet grid = discretize(m.space(), steps);
    for (double p : {0.0, -1.0}) {
      const Criterion c = Criterion::with_p(p);
      const SolveReport r = solve(m, grid, c);
      const CertifyReport cr = certify(r.design, m, grid, c);
      CAPTURE(m.family_name());
      REQUIRE(cr.optimal);
      CHECK(cr.phi_times_polar == doctest::Approx(1.0).epsilon(2e-5));
      const PolytopeReport pr = polytope_report(cr.certificate, r.design, m, grid);
      CHECK(pr.hyperplanes.size() <= static_cast<size_t>(m.k()));
      double max_len = 0.0;
      for (const auto& x : r.design.points()) max_len = std::max(max_len, m.eval_f(x).norm());
      CHECK(pr.max_length_spread <= 1e-5 * max_len);
    }
  }
}
