#include <benchmark/benchmark.h>

#include <random>

#include "edgeuda/nn/autograd.hpp"
#include "edgeuda/nn/functional.hpp"
#include "edgeuda/nn/ops.hpp"

namespace {

using namespace edgeuda;

Tensor random(Shape s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  Tensor t(s);
  for (auto& v : t.values()) v = d(rng);
  return t;
}

void BM_Conv2dForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const nn::Var x = nn::Var::constant(random({4, c, 32, 64}, 1));
  const nn::Var w = nn::Var::constant(random({c, c, 3, 3}, 2));
  const nn::Var b = nn::Var::constant(Tensor({1, c, 1, 1}));
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d(x, w, b, 1, 1).value().data());
}
BENCHMARK(BM_Conv2dForward)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const Tensor xv = random({4, c, 32, 64}, 1);
  const Tensor wv = random({c, c, 3, 3}, 2);
  const Tensor zero({4, c, 32, 64});
  for (auto _ : state) {
    const nn::Var x = nn::Var::parameter(xv);
    const nn::Var w = nn::Var::parameter(wv);
    const nn::Var b = nn::Var::parameter(Tensor({1, c, 1, 1}));
    nn::backward(nn::berhu(nn::conv2d(x, w, b, 1, 1), zero));
    benchmark::DoNotOptimize(w.grad().data());
  }
}
BENCHMARK(BM_Conv2dBackward)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_EntropyMap(benchmark::State& state) {
  const Tensor p = nn::softmax(random({4, 5, 64, 128}, 3));
  for (auto _ : state) benchmark::DoNotOptimize(nn::entropy_map(p).data());
}
BENCHMARK(BM_EntropyMap)->Unit(benchmark::kMicrosecond);

}  // namespace
