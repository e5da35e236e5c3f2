// Serial reference versus OpenMP kernel for the two verification sweeps.
// Levels come from $TREELIKE_CACHE_DIR when it is set, so a prior
// `treelike build` makes start-up instant.

#include <benchmark/benchmark.h>

#include <cstdlib>

#include "treelike/parallel.hpp"
#include "treelike/pl_map.hpp"
#include "treelike/tower.hpp"

namespace {

constexpr int kTopLevel = 4;

const treelike::Tower& tower() {
  static const treelike::Tower t = [] {
    treelike::TowerOptions opts;
    if (std::getenv("TREELIKE_CACHE_DIR") != nullptr) opts.cache_dir = treelike::default_cache_dir();
    return treelike::build_tower(kTopLevel, opts);
  }();
  return t;
}

template <treelike::MapDistance (*Kernel)(const treelike::PLMap&, const treelike::PLMap&)>
void min_distance(benchmark::State& state) {
  const auto& level = tower().at(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(level.f, level.g));
  state.counters["breakpoints"] = static_cast<double>(level.f.breakpoint_count() + level.g.breakpoint_count());
  state.counters["threads"] = treelike::max_threads();
}

template <treelike::Valence (*Kernel)(const treelike::PLMap&)>
void valence_of_g(benchmark::State& state) {
  const auto& level = tower().at(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(level.g));
  state.counters["breakpoints"] = static_cast<double>(level.g.breakpoint_count());
  state.counters["threads"] = treelike::max_threads();
}

}  // namespace

BENCHMARK(min_distance<treelike::min_map_distance_serial>)->Name("min_map_distance/serial")->DenseRange(1, kTopLevel)->Unit(benchmark::kMillisecond);
BENCHMARK(min_distance<treelike::min_map_distance>)->Name("min_map_distance/openmp")->DenseRange(1, kTopLevel)->Unit(benchmark::kMillisecond);
BENCHMARK(valence_of_g<treelike::valence_serial>)->Name("valence/serial")->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(valence_of_g<treelike::valence>)->Name("valence/openmp")->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
