#include <benchmark/benchmark.h>

#include "fml/bounds.hpp"
#include "fml/hmin.hpp"
#include "fml/rng.hpp"
#include "fml/solver.hpp"

namespace {

using namespace fml;

DiscreteMeasure random_measure(double kappa, int n, std::uint64_t seed) {
  const ModelSpace s(kappa, 2);
  Rng rng(seed);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    if (kappa > 0.0)
      pts.push_back(uniform_random_point(s, rng.next_u64()));
    else
      pts.push_back(uniform_random_point(s, rng.next_u64(), Ball{s.origin(), 1.5}));
  }
  return DiscreteMeasure::with_uniform_weights(s, std::move(pts));
}

void BM_dist(benchmark::State& state) {
  const double kappa = static_cast<double>(state.range(0));
  const ModelSpace s(kappa, 2);
  Rng rng(1);
  const Point x = kappa > 0.0 ? uniform_random_point(s, 1)
                              : uniform_random_point(s, 1, Ball{s.origin(), 1.5});
  const Point y = kappa > 0.0 ? uniform_random_point(s, 2)
                              : uniform_random_point(s, 2, Ball{s.origin(), 1.5});
  for (auto _ : state) benchmark::DoNotOptimize(dist(s, x, y));
}
BENCHMARK(BM_dist)->Arg(1)->Arg(0)->Arg(-1);

void BM_exp_log_roundtrip(benchmark::State& state) {
  const ModelSpace s(1.0, 2);
  const Point x = uniform_random_point(s, 3);
  const Point y = uniform_random_point(s, 4);
  for (auto _ : state) benchmark::DoNotOptimize(exp_map(s, log_map(s, x, y)));
}
BENCHMARK(BM_exp_log_roundtrip);

void BM_frechet_cost(benchmark::State& state) {
  const DiscreteMeasure mu = random_measure(1.0, static_cast<int>(state.range(0)), 7);
  const Point x = uniform_random_point(mu.space, 9);
  for (auto _ : state) benchmark::DoNotOptimize(frechet_cost(mu, x));
}
BENCHMARK(BM_frechet_cost)->Arg(10)->Arg(100);

void BM_median_solve(benchmark::State& state) {
  const DiscreteMeasure mu = random_measure(static_cast<double>(state.range(0)), 5, 11);
  SolverConfig cfg;
  cfg.seed = 13;
  for (auto _ : state) benchmark::DoNotOptimize(median_solve(mu, cfg));
}
BENCHMARK(BM_median_solve)->Arg(1)->Arg(0)->Arg(-1);

void BM_hmin_closed_form(benchmark::State& state) {
  const HminInstance inst{HminGeometry::sphere, 0.5, 0.3, 0.45};
  for (auto _ : state) benchmark::DoNotOptimize(hmin_closed_form(inst));
}
BENCHMARK(BM_hmin_closed_form);

void BM_hmin_bruteforce(benchmark::State& state) {
  const HminInstance inst{HminGeometry::sphere, 0.5, 0.3, 0.45};
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hmin_bruteforce(inst, grid));
}
BENCHMARK(BM_hmin_bruteforce)->Arg(10000)->Arg(100000);

void BM_F_root(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(F_root(0.75, 1.0, -1.0));
}
BENCHMARK(BM_F_root);

}  // namespace

BENCHMARK_MAIN();
