#include <benchmark/benchmark.h>

#include "edgeuda/edges.hpp"
#include "edgeuda/eval/metrics.hpp"
#include "edgeuda/scenegen.hpp"

namespace {

using namespace edgeuda;

void BM_GenerateScene(benchmark::State& state) {
  const scenegen::SceneConfig cfg;
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(scenegen::generate_scene(cfg, i++).image.values.data());
}
BENCHMARK(BM_GenerateScene)->Unit(benchmark::kMicrosecond);

void BM_EdgeUnion(benchmark::State& state) {
  const scenegen::SceneConfig cfg;
  const auto s = scenegen::generate_scene(cfg, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        edges::edge_union(s.labels, cfg.num_classes, edges::CannyParams{}).values.data());
  }
}
BENCHMARK(BM_EdgeUnion)->Unit(benchmark::kMicrosecond);

void BM_BoundaryOracle(benchmark::State& state) {
  const auto s = scenegen::generate_scene(scenegen::SceneConfig{}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(edges::boundary_oracle(s.labels).values.data());
}
BENCHMARK(BM_BoundaryOracle)->Unit(benchmark::kMicrosecond);

void BM_ConfusionMatrix(benchmark::State& state) {
  const scenegen::SceneConfig cfg;
  const auto a = scenegen::generate_scene(cfg, 1);
  const auto b = scenegen::generate_scene(cfg, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval::confusion_matrix(a.labels, b.labels, cfg.num_classes).total());
  }
}
BENCHMARK(BM_ConfusionMatrix)->Unit(benchmark::kMicrosecond);

}  // namespace
