#include <benchmark/benchmark.h>

#include "optdesign/kernels.hpp"

namespace {

using namespace optdesign;

struct Fixture {
  ModelSpec model = ModelSpec::mixture_poly_exp(1.0);
  CandidateSet grid;
  FeatureMatrix features;
  Matrix n;
  Vector w;

  explicit Fixture(double step) : grid(discretize(model.space(), {step, step})) {
    features = kernels::reference::evaluate_features(model, grid.points);
    n = Matrix::Identity(model.k(), model.k()) * 0.25;
    n(0, 1) = n(1, 0) = 0.05;
    w = Vector::Constant(features.rows(), 1.0 / static_cast<double>(features.rows()));
  }
};

Fixture& fixture(int which) {
  static Fixture coarse(0.02), fine(0.005);
  return which == 0 ? coarse : fine;
}

void BM_QuadraticFormsSerial(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::reference::quadratic_forms(f.features, f.n));
  s.SetItemsProcessed(s.iterations() * f.features.rows());
}
void BM_QuadraticFormsParallel(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::quadratic_forms(f.features, f.n));
  s.SetItemsProcessed(s.iterations() * f.features.rows());
}
void BM_FeaturesSerial(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::reference::evaluate_features(f.model, f.grid.points));
}
void BM_FeaturesParallel(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::evaluate_features(f.model, f.grid.points));
}
void BM_GramSerial(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::reference::weighted_gram(f.features, f.w));
}
void BM_GramParallel(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::weighted_gram(f.features, f.w));
}
void BM_ArgmaxSerial(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  const Vector v = kernels::reference::quadratic_forms(f.features, f.n);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::reference::argmax(v));
}
void BM_ArgmaxParallel(benchmark::State& s) {
  auto& f = fixture(static_cast<int>(s.range(0)));
  const Vector v = kernels::reference::quadratic_forms(f.features, f.n);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::argmax(v));
}

}  // namespace

BENCHMARK(BM_QuadraticFormsSerial)->Arg(0)->Arg(1);
BENCHMARK(BM_QuadraticFormsParallel)->Arg(0)->Arg(1);
BENCHMARK(BM_FeaturesSerial)->Arg(0)->Arg(1);
BENCHMARK(BM_FeaturesParallel)->Arg(0)->Arg(1);
BENCHMARK(BM_GramSerial)->Arg(0)->Arg(1);
BENCHMARK(BM_GramParallel)->Arg(0)->Arg(1);
BENCHMARK(BM_ArgmaxSerial)->Arg(0)->Arg(1);
BENCHMARK(BM_ArgmaxParallel)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
