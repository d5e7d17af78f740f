#include <benchmark/benchmark.h>

#include <numeric>

#include "edgeuda/adapt/dataset.hpp"
#include "edgeuda/adapt/trainer.hpp"
#include "edgeuda/config.hpp"
#include "edgeuda/edges.hpp"
#include "edgeuda/scenegen.hpp"

namespace {

using namespace edgeuda;

struct Batches {
  adapt::SourceBatch src;
  adapt::TargetBatch tgt;
};

// Batch of 4 at the default 64x128 scene size.
Batches make_batches(const RunConfig& cfg) {
  std::vector<RgbImage> si, ti;
  std::vector<LabelMap> labels;
  std::vector<DepthMap> depth;
  std::vector<EdgeMap> edges;
  for (int i = 0; i < 4; ++i) {
    const auto s = scenegen::generate_scene(cfg.scene, i);
    si.push_back(s.image);
    labels.push_back(s.labels);
    depth.push_back(s.depth);
    edges.push_back(edges::edge_union(s.labels, cfg.num_classes(), cfg.canny));
    ti.push_back(scenegen::apply_domain_shift(scenegen::generate_scene(cfg.scene, 100 + i).image,
                                              cfg.shift, i));
  }
  std::vector<std::size_t> idx(4);
  std::iota(idx.begin(), idx.end(), 0);
  return {{adapt::images_to_tensor(si, idx), adapt::labels_to_tensor(labels, idx),
           adapt::depth_to_tensor(depth, idx), adapt::edges_to_tensor(edges, idx)},
          {adapt::images_to_tensor(ti, idx)}};
}

void BM_ModelForward(benchmark::State& state) {
  const RunConfig cfg;
  const auto model = adapt::make_model(cfg);
  const auto params = model.init(1);
  const Batches b = make_batches(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(params, b.src.images).ref_probs.value().data());
  }
}
BENCHMARK(BM_ModelForward)->Unit(benchmark::kMillisecond);

void BM_SupervisedStep(benchmark::State& state) {
  const RunConfig cfg;
  const auto model = adapt::make_model(cfg);
  const auto params = model.init(1);
  const Batches b = make_batches(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(adapt::supervised_step(model, params, b.src, cfg.weights).losses.total);
  }
}
BENCHMARK(BM_SupervisedStep)->Unit(benchmark::kMillisecond);

void BM_AdversarialStep(benchmark::State& state) {
  const RunConfig cfg;
  const auto model = adapt::make_model(cfg);
  const auto disc = adapt::make_discriminator(cfg);
  const auto params = model.init(1);
  const auto disc_params = disc.init(2);
  const Batches b = make_batches(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(adapt::adversarial_step(model, params, disc, disc_params, b.src, b.tgt,
                                                     cfg.weights, cfg.variant)
                                 .losses.total);
  }
}
BENCHMARK(BM_AdversarialStep)->Unit(benchmark::kMillisecond);

}  // namespace
