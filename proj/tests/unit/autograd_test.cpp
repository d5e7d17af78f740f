#include <gtest/gtest.h>

#include <random>

#include "edgeuda/error.hpp"
#include "edgeuda/nn/ops.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

namespace edgeuda::nn {
namespace {

using edgeuda::testing::random_tensor;

// sum(x * w) for a fixed weight tensor; turns any op into a scalar probe.
Var dot(const Var& x, const Tensor& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += x.value()[i] * w[i];
  return Var::make(Tensor({1, 1, 1, 1}, s), {x}, [w](Node& node) {
    Node& in = *node.inputs[0];
    if (!in.requires_grad) return;
    Tensor& g = in.grad_buffer();
    for (std::size_t i = 0; i < w.size(); ++i) g[i] += w[i] * node.grad[0];
  });
}

void expect_ok(const gradcheck::Report& r) {
  EXPECT_GT(r.checked, 0u);
  EXPECT_EQ(r.failures, 0u) << "worst: " << r.worst;
}

class OpGrad : public ::testing::Test {
 protected:
  std::mt19937_64 rng{17};
  Tensor rnd(Shape s, double lo = -1, double hi = 1) { return random_tensor(s, rng, lo, hi); }
};

TEST_F(OpGrad, Conv2dAllGeometries) {
  for (auto [k, stride, pad] : {std::tuple{3, 1, 1}, {3, 2, 1}, {4, 2, 1}, {1, 1, 0}}) {
    const Tensor x = rnd({2, 3, 6, 6});
    const Tensor w = rnd({4, 3, k, k});
    const Tensor b = rnd({1, 4, 1, 1});
    const int ho = (6 + 2 * pad - k) / stride + 1;
    const Tensor probe = rnd({2, 4, ho, ho});
    expect_ok(gradcheck::check_inputs({x, w, b}, [&](const std::vector<Var>& v) {
      return dot(conv2d(v[0], v[1], v[2], stride, pad), probe);
    }));
  }
}

TEST_F(OpGrad, Conv2dMatchesDirectLoop) {
  const Tensor x = rnd({2, 3, 7, 5});
  const Tensor w = rnd({2, 3, 3, 3});
  const Tensor b = rnd({1, 2, 1, 1});
  const Tensor y =
      conv2d(Var::constant(x), Var::constant(w), Var::constant(b), 2, 1).value();
  ASSERT_EQ(y.shape(), (Shape{2, 2, 4, 3}));
  for (int n = 0; n < 2; ++n)
    for (int co = 0; co < 2; ++co)
      for (int oy = 0; oy < 4; ++oy)
        for (int ox = 0; ox < 3; ++ox) {
          double s = b[co];
          for (int ci = 0; ci < 3; ++ci)
            for (int ky = 0; ky < 3; ++ky)
              for (int kx = 0; kx < 3; ++kx) {
                const int iy = oy * 2 - 1 + ky, ix = ox * 2 - 1 + kx;
                if (iy >= 0 && iy < 7 && ix >= 0 && ix < 5) s += w.at(co, ci, ky, kx) * x.at(n, ci, iy, ix);
              }
          EXPECT_NEAR(y.at(n, co, oy, ox), s, 1e-12);
        }
}

TEST_F(OpGrad, Conv2dRejectsChannelMismatch) {
  EXPECT_THROW(conv2d(Var::constant(rnd({1, 2, 4, 4})), Var::constant(rnd({1, 3, 3, 3})),
                      Var::constant(rnd({1, 1, 1, 1})), 1, 1),
               ShapeError);
}

TEST_F(OpGrad, Activations) {
  Tensor x = rnd({1, 2, 3, 3});
  for (auto& v : x.values()) v += v > 0 ? 0.05 : -0.05;
  const Tensor probe = rnd(x.shape());
  expect_ok(gradcheck::check_inputs({x}, [&](const auto& v) { return dot(relu(v[0]), probe); }));
  expect_ok(gradcheck::check_inputs(
      {x}, [&](const auto& v) { return dot(leaky_relu(v[0], 0.2), probe); }));
  expect_ok(gradcheck::check_inputs({x}, [&](const auto& v) { return dot(sigmoid(v[0]), probe); }));
}

TEST_F(OpGrad, ResamplingOps) {
  const Tensor x = rnd({2, 2, 4, 4});
  const Tensor up_probe = rnd({2, 2, 8, 12});
  expect_ok(gradcheck::check_inputs(
      {x}, [&](const auto& v) { return dot(resize_bilinear(v[0], 8, 12), up_probe); }));
  const Tensor pool_probe = rnd({2, 2, 2, 2});
  expect_ok(gradcheck::check_inputs(
      {x}, [&](const auto& v) { return dot(avg_pool(v[0], 2), pool_probe); }));
}

TEST(Resize, HalfPixelCentres) {
  const Tensor x({1, 1, 1, 2}, std::vector<double>{0.0, 1.0});
  const Tensor y = resize_bilinear(x, 1, 4);
  EXPECT_NEAR(y[0], 0.0, 1e-12);
  EXPECT_NEAR(y[1], 0.25, 1e-12);
  EXPECT_NEAR(y[2], 0.75, 1e-12);
  EXPECT_NEAR(y[3], 1.0, 1e-12);
  const Tensor c = resize_bilinear(Tensor({1, 2, 3, 5}, 0.4), 7, 9);
  for (double v : c.values()) EXPECT_NEAR(v, 0.4, 1e-12);
}

TEST_F(OpGrad, ChannelOps) {
  const Tensor a = rnd({2, 2, 3, 3}), b = rnd({2, 3, 3, 3}), m = rnd({2, 1, 3, 3});
  const Tensor probe = rnd({2, 5, 3, 3}), probe2 = rnd({2, 2, 3, 3});
  expect_ok(gradcheck::check_inputs(
      {a, b}, [&](const auto& v) { return dot(concat_channels({v[0], v[1]}), probe); }));
  expect_ok(gradcheck::check_inputs(
      {a, m}, [&](const auto& v) { return dot(multiply_channelwise(v[0], v[1]), probe2); }));
}

TEST_F(OpGrad, ProbabilityOps) {
  const Tensor logits = rnd({2, 4, 3, 3}, -3, 3);
  const Tensor probe = rnd(logits.shape());
  expect_ok(gradcheck::check_inputs(
      {logits}, [&](const auto& v) { return dot(softmax(v[0]), probe); }));
  expect_ok(gradcheck::check_inputs(
      {logits}, [&](const auto& v) { return dot(entropy(softmax(v[0])), probe); }));
  const DepthBinSpec spec = sid_bins(1, 666.36, 4);
  const Tensor zprobe = rnd({2, 1, 3, 3});
  expect_ok(gradcheck::check_inputs({logits}, [&](const auto& v) {
    return dot(log_normalize_depth(depth_decode(softmax(v[0]), spec), 1, 666.36), zprobe);
  }));
}

TEST_F(OpGrad, Losses) {
  const Tensor logits = rnd({2, 3, 4, 4}, -2, 2);
  Tensor labels({2, 1, 4, 4});
  std::uniform_int_distribution<int> cls(0, 2);
  for (auto& v : labels.values()) v = cls(rng);
  labels[3] = 255;
  expect_ok(gradcheck::check_inputs(
      {logits}, [&](const auto& v) { return cross_entropy(softmax(v[0]), labels); }));

  const Tensor pred = rnd({2, 1, 4, 4}, 1, 40), target = rnd({2, 1, 4, 4}, 1, 40);
  expect_ok(gradcheck::check_inputs({pred}, [&](const auto& v) { return berhu(v[0], target); }));

  Tensor edges({2, 1, 4, 4});
  for (auto& v : edges.values()) v = cls(rng) == 0 ? 255.0 : 0.0;
  const Tensor edge_logits = rnd({2, 1, 4, 4}, -4, 4);
  expect_ok(gradcheck::check_inputs(
      {edge_logits}, [&](const auto& v) { return bce_with_logits(v[0], edges); }));

  const Tensor s = rnd({2, 1, 2, 2}, -3, 3), t = rnd({2, 1, 2, 2}, -3, 3);
  expect_ok(gradcheck::check_inputs(
      {s, t}, [&](const auto& v) { return adversarial_d_loss_logits(v[0], v[1]); }));
  expect_ok(gradcheck::check_inputs(
      {t}, [&](const auto& v) { return adversarial_g_loss_logits(v[0]); }));
  expect_ok(gradcheck::check_inputs({s, t}, [&](const auto& v) {
    return weighted_sum({{0.3, adversarial_g_loss_logits(v[0])}, {2.0, adversarial_g_loss_logits(v[1])}});
  }));
}

TEST_F(OpGrad, LogitLossesMatchProbabilityForms) {
  const Tensor logits = rnd({1, 1, 4, 4}, -5, 5);
  Tensor edges({1, 1, 4, 4});
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = i % 3 == 0 ? 255.0 : 0.0;
  const Tensor p = sigmoid(logits);
  EXPECT_NEAR(bce_with_logits(Var::constant(logits), edges).value()[0], bce_edge_loss(p, edges),
              1e-9);
  const Tensor t = rnd({1, 1, 2, 2}, -5, 5);
  EXPECT_NEAR(adversarial_d_loss_logits(Var::constant(logits), Var::constant(t)).value()[0],
              adversarial_d_loss(p, sigmoid(t)), 1e-9);
  EXPECT_NEAR(adversarial_g_loss_logits(Var::constant(t)).value()[0],
              adversarial_g_loss(sigmoid(t)), 1e-9);
  EXPECT_TRUE(std::isfinite(
      bce_with_logits(Var::constant(Tensor({1, 1, 1, 1}, 800.0)), Tensor({1, 1, 1, 1}, 0.0))
          .value()[0]));
}

TEST(Autograd, SharedSubgraphAccumulates) {
  const Var x = Var::parameter(Tensor({1, 1, 1, 1}, 3.0));
  const Var y = weighted_sum({{2.0, x}, {5.0, x}});
  backward(y);
  EXPECT_DOUBLE_EQ(x.grad()[0], 7.0);
}

TEST(Autograd, ConstantsCarryNoGraph) {
  const Var c = Var::constant(Tensor({1, 1, 1, 1}, 1.0));
  const Var y = weighted_sum({{2.0, c}});
  EXPECT_FALSE(y.requires_grad());
  EXPECT_NO_THROW(backward(y));
  EXPECT_THROW(backward(Var::parameter(Tensor({1, 2, 1, 1}))), ShapeError);
}

}  // namespace
}  // namespace edgeuda::nn
