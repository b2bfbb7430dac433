#include <benchmark/benchmark.h>

#include <vector>

#include "sphmax/configurations.hpp"
#include "sphmax/geometry.hpp"
#include "sphmax/maximal.hpp"
#include "sphmax/rng.hpp"
#include "sphmax/volume.hpp"

using namespace sphmax;

static void BM_McVolumeEnemyTriple(benchmark::State& state) {
  const double delta = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  const TripleSpec t = enemy_triple(delta, 0.0, Vec{-0.3, 0.4}, Vec{0.2, -0.6});
  std::vector<Region> r;
  for (const Sphere& s : t.spheres) r.push_back(Region::annulus(s, delta));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mc_volume(r, 1 << 18, ++seed));
  state.SetItemsProcessed(state.iterations() * (1 << 18));
}
BENCHMARK(BM_McVolumeEnemyTriple)->Arg(5)->Arg(8)->Arg(11)->Unit(benchmark::kMillisecond);

static void BM_GridVolumePair(benchmark::State& state) {
  const double delta = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 1.2), delta),
                              Region::annulus(Sphere(Vec{0.4, 0.1, 0}, 1.5), delta)};
  for (auto _ : state) benchmark::DoNotOptimize(grid_volume(r, delta / 4));
}
BENCHMARK(BM_GridVolumePair)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_WedgeNorm(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<Vec> v(n, Vec(n));
  for (Vec& x : v)
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(wedge_norm(v));
}
BENCHMARK(BM_WedgeNorm)->DenseRange(2, 6);

static void BM_BucketAudit(benchmark::State& state) {
  const SphereFamily f = random_family(3, 1.0 / 64, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(bucket_audit(f, 3, false));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0));
}
BENCHMARK(BM_BucketAudit)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_MultiplicityFunctional(benchmark::State& state) {
  const double delta = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  const SphereFamily f = random_family(3, delta, family_capacity(3, delta), 5, 1.5, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(multiplicity_functional(f, 1 << 18, 7));
  state.SetItemsProcessed(state.iterations() * (1 << 18));
}
BENCHMARK(BM_MultiplicityFunctional)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
