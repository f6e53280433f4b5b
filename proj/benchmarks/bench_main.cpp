#include <benchmark/benchmark.h>

#include <random>

#include "demogen/pose.hpp"

static void BM_Compose(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  demogen::Pose a{demogen::Vec3{n(rng), n(rng), n(rng)},
                  demogen::Quat{n(rng), n(rng), n(rng), n(rng)}};
  demogen::Pose b{demogen::Vec3{n(rng), n(rng), n(rng)},
                  demogen::Quat{n(rng), n(rng), n(rng), n(rng)}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(demogen::compose(a, b));
  }
}
BENCHMARK(BM_Compose);

BENCHMARK_MAIN();
