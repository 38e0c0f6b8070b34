#include <doctest.h>

#include <random>

#include "optdesign/design.hpp"
#include "optdesign/errors.hpp"
#include "oracles.hpp"

using namespace optdesign;
using oracle::pt;

namespace {

const ModelSpec kLinear = ModelSpec::linear_2f_no_intercept();

}  // namespace

TEST_CASE("info_matrix examples") {
  const Design d = Design::uniform({pt({1, 1}), pt({1, 0}), pt({0, 1})});
  Matrix md(2, 2);
  md << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
  CHECK((info_matrix(d, kLinear) - md).cwiseAbs().maxCoeff() < 1e-15);

  const Design e = Design::uniform({pt({1, 0}), pt({0, 1})});
  CHECK(info_matrix(e, kLinear).isApprox(0.5 * Matrix::Identity(2, 2)));

  const Matrix one = info_matrix(Design::uniform({pt({1, 0})}), kLinear);
  CHECK(one(0, 0) == 1.0);
  CHECK(one(1, 1) == 0.0);
  CHECK(linalg::numerical_rank(one) == 1);
}

TEST_CASE("info_matrix agrees with the loop oracle") {
  std::mt19937_64 rng(1);
  const ModelSpec m = ModelSpec::mixture_poly_exp(1.0);
  const CandidateSet grid = discretize(m.space(), {0.1, 0.1});
  for (int rep = 0; rep < 20; ++rep) {
    const auto pts = oracle::random_points(rng, grid.points, static_cast<size_t>(1 + rep % 9));
    const Vector w = oracle::random_weights(rng, static_cast<Eigen::Index>(pts.size()));
    const Design d = Design::from_weights(pts, w);
    const Matrix expected = oracle::info_matrix(pts, {w.data(), w.data() + w.size()}, m);
    CHECK((info_matrix(d, m) - expected).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("design validation") {
  CHECK_THROWS_AS(Design(std::vector<Atom>{}), EmptyDesignError);
  CHECK_THROWS_AS(Design({{pt({0}), 0.5}, {pt({1}), 0.4}}), ValidationError);
  CHECK_THROWS_AS(Design({{pt({0}), 0.5}, {pt({0}), 0.5}}), ValidationError);
  CHECK_THROWS_AS(Design({{pt({0}), 1.5}, {pt({1}), -0.5}}), ValidationError);
  CHECK_THROWS_AS(Design({{pt({0}), 0.5}, {pt({1, 0}), 0.5}}), ValidationError);
  const Design nearly({{pt({0}), 0.5 + 4e-7}, {pt({1}), 0.5}});
  CHECK(nearly.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("info_matrix is linear in the design") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ModelSpec m = ModelSpec::interaction_2f();
  const CandidateSet grid = discretize(m.space(), {0.1, 0.1});
  for (int rep = 0; rep < 50; ++rep) {
    const auto p1 = oracle::random_points(rng, grid.points, 1 + rep % 5);
    const auto p2 = oracle::random_points(rng, grid.points, 1 + rep % 7);
    const Design d1 = Design::from_weights(p1, oracle::random_weights(rng, static_cast<Eigen::Index>(p1.size())));
    const Design d2 = Design::from_weights(p2, oracle::random_weights(rng, static_cast<Eigen::Index>(p2.size())));
    const double a = unit(rng);
    const Matrix lhs = info_matrix(mix(d1, d2, a), m);
    const Matrix rhs = a * info_matrix(d1, m) + (1.0 - a) * info_matrix(d2, m);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("rank never exceeds the number of atoms") {
  std::mt19937_64 rng(3);
  const ModelSpec m = ModelSpec::polynomial(4);
  const CandidateSet grid = discretize(m.space(), {0.01});
  for (size_t atoms = 1; atoms <= 7; ++atoms) {
    const auto pts = oracle::random_points(rng, grid.points, atoms);
    const Matrix mi = info_matrix(Design::uniform(pts), m);
    CHECK(linalg::numerical_rank(mi) <= static_cast<int>(std::min<size_t>(atoms, 5)));
  }
}

TEST_CASE("merge_close examples") {
  const Design pair({{pt({0}), 0.5}, {pt({1e-10}), 0.5}});
  const Design merged = merge_close(pair, 1e-6);
  REQUIRE(merged.size() == 1);
  CHECK(merged.atoms()[0].w == 1.0);

  const Design apart = Design::uniform({pt({0}), pt({0.5}), pt({1})});
  const Design same = merge_close(apart, 1e-6);
  REQUIRE(same.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(same.atoms()[i].x == apart.atoms()[i].x);

  const Design line({{pt({0, 0}), 0.2}, {pt({1e-7, 0}), 0.3}, {pt({2e-7, 0}), 0.5}});
  const Design one = merge_close(line, 1e-6);
  REQUIRE(one.size() == 1);
  CHECK(one.atoms()[0].x(0) == doctest::Approx(0.3e-7 + 1e-7).epsilon(1e-12));
  CHECK(one.atoms()[0].x(1) == 0.0);
}

TEST_CASE("prune examples") {
  const Design d({{pt({0}), 0.5 - 5e-10}, {pt({1}), 0.5 - 5e-10}, {pt({2}), 1e-9}});
  const Design p = prune(d, 1e-6);
  REQUIRE(p.size() == 2);
  CHECK(p.atoms()[0].w == doctest::Approx(0.5));

  const Design full = Design::uniform({pt({0}), pt({1})});
  CHECK(prune(full, 1e-6).size() == 2);

  const Design t({{pt({0}), 0.7}, {pt({1}), 0.2}, {pt({2}), 0.1}});
  const Design q = prune(t, 0.15);
  REQUIRE(q.size() == 2);
  CHECK(q.atoms()[0].w == doctest::Approx(0.7 / 0.9));
  CHECK(q.atoms()[1].w == doctest::Approx(0.2 / 0.9));

  CHECK_THROWS_AS(prune(t, 0.8), EmptyDesignError);
}

TEST_CASE("merge and prune keep unit mass and never add atoms") {
  std::mt19937_64 rng(4);
  const CandidateSet grid = discretize(DesignSpace::unit_box(2), {0.05, 0.05});
  for (int rep = 0; rep < 50; ++rep) {
    const auto pts = oracle::random_points(rng, grid.points, static_cast<size_t>(2 + rep % 10));
    const Design d = Design::from_weights(pts, oracle::random_weights(rng, static_cast<Eigen::Index>(pts.size())));
    const Design m = merge_close(d, 0.12);
    const Design p = prune(d, 0.05);
    CHECK(m.size() <= d.size());
    CHECK(p.size() <= d.size());
    CHECK(m.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("round_to_n examples") {
  const Design thirds = Design::uniform({pt({0}), pt({0.5}), pt({1})});
  CHECK(round_to_n(thirds, 9).reps == std::vector<long>{3, 3, 3});
  std::vector<long> ten = round_to_n(thirds, 10).reps;
  std::sort(ten.begin(), ten.end());
  CHECK(ten == std::vector<long>{3, 3, 4});
  CHECK(round_to_n(Design::uniform({pt({0}), pt({1})}), 2).reps == std::vector<long>{1, 1});
  CHECK_THROWS_AS(round_to_n(thirds, 2), InfeasibleError);
}

TEST_CASE("round_to_n converges to the weights") {
  std::mt19937_64 rng(6);
  const CandidateSet grid = discretize(DesignSpace::unit_box(1), {0.01});
  for (int rep = 0; rep < 20; ++rep) {
    const auto pts = oracle::random_points(rng, grid.points, static_cast<size_t>(1 + rep % 8));
    const Design d = Design::from_weights(pts, oracle::random_weights(rng, static_cast<Eigen::Index>(pts.size())));
    const double m = static_cast<double>(d.size());
    for (long n : {10L, 100L, 1000L, 100000L}) {
      if (n < static_cast<long>(d.size())) continue;
      const ExactDesign e = round_to_n(d, n);
      long total = 0;
      for (size_t i = 0; i < e.reps.size(); ++i) {
        total += e.reps[i];
        CHECK(std::abs(static_cast<double>(e.reps[i]) / n - d.atoms()[i].w) <= m / static_cast<double>(n));
        CHECK(e.reps[i] >= 1);
      }
      CHECK(total == n);
    }
  }
}
