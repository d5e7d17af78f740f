#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "edgeuda/error.hpp"
#include "edgeuda/eval/ablation.hpp"
#include "edgeuda/eval/metrics.hpp"
#include "edgeuda/eval/render.hpp"
#include "edgeuda/image_io.hpp"
#include "support.hpp"
#include "tiny.hpp"

namespace edgeuda::eval {
namespace {

using edgeuda::testing::TempDir;

LabelMap labels(int h, int w, std::vector<std::uint8_t> v) {
  LabelMap m(h, w);
  m.values = std::move(v);
  return m;
}

LabelMap random_labels(std::mt19937_64& rng, int h, int w, int classes) {
  std::uniform_int_distribution<int> d(0, classes - 1);
  LabelMap m(h, w);
  for (auto& v : m.values) v = static_cast<std::uint8_t>(d(rng));
  return m;
}

TEST(Confusion, WorkedExample) {
  ConfusionMatrix cm(2);
  cm(0, 0) = 1;
  cm(0, 1) = 1;
  cm(1, 1) = 2;
  const IouReport r = iou_from_confusion(cm);
  EXPECT_NEAR(r.iou[0], 0.5, 1e-12);
  EXPECT_NEAR(r.iou[1], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.miou, 0.5833333333333334, 1e-12);
}

TEST(Confusion, CountsPixelsAndSkipsIgnore) {
  const LabelMap gt = labels(1, 5, {0, 0, 1, 1, kIgnoreLabel});
  const LabelMap pred = labels(1, 5, {0, 1, 1, 1, 0});
  const ConfusionMatrix cm = confusion_matrix(pred, gt, 2);
  EXPECT_EQ(cm(0, 0), 1u);
  EXPECT_EQ(cm(0, 1), 1u);
  EXPECT_EQ(cm(1, 1), 2u);
  EXPECT_EQ(cm(1, 0), 0u);
  EXPECT_EQ(cm.total(), 4u);
}

TEST(Confusion, OutOfRangeIdsAndShapeMismatchThrow) {
  EXPECT_THROW(confusion_matrix(labels(1, 2, {0, 3}), labels(1, 2, {0, 1}), 2), DomainError);
  EXPECT_THROW(confusion_matrix(labels(1, 2, {0, 1}), labels(1, 2, {0, 2}), 2), DomainError);
  EXPECT_THROW(confusion_matrix(labels(1, 2, {0, 1}), labels(2, 1, {0, 1}), 2), Error);
}

TEST(Confusion, AdditiveOverImages) {
  std::mt19937_64 rng(5);
  std::vector<LabelMap> preds, gts;
  ConfusionMatrix sum(4);
  for (int i = 0; i < 6; ++i) {
    preds.push_back(random_labels(rng, 7, 9, 4));
    gts.push_back(random_labels(rng, 7, 9, 4));
    sum += confusion_matrix(preds.back(), gts.back(), 4);
  }
  EXPECT_EQ(confusion_matrix(preds, gts, 4), sum);
  EXPECT_EQ(sum.total(), 6u * 63u);
}

TEST(Iou, EquivariantUnderClassRelabelling) {
  std::mt19937_64 rng(8);
  const int C = 5;
  const LabelMap p = random_labels(rng, 12, 12, C);
  const LabelMap g = random_labels(rng, 12, 12, C);
  const std::vector<int> perm{3, 0, 4, 1, 2};
  LabelMap pp = p, gp = g;
  for (auto& v : pp.values) v = static_cast<std::uint8_t>(perm[v]);
  for (auto& v : gp.values) v = static_cast<std::uint8_t>(perm[v]);
  const IouReport a = iou_from_confusion(confusion_matrix(p, g, C));
  const IouReport b = iou_from_confusion(confusion_matrix(pp, gp, C));
  for (int c = 0; c < C; ++c) EXPECT_NEAR(a.iou[c], b.iou[perm[c]], 1e-15);
  EXPECT_NEAR(a.miou, b.miou, 1e-15);
}

TEST(Iou, PerfectPredictionAndAbsentClasses) {
  const LabelMap g = labels(2, 2, {0, 0, 2, 2});
  const IouReport r = iou_from_confusion(confusion_matrix(g, g, 3));
  EXPECT_EQ(r.iou[0], 1.0);
  EXPECT_TRUE(std::isnan(r.iou[1]));
  EXPECT_FALSE(r.present[1]);
  EXPECT_EQ(r.miou, 1.0);
  EXPECT_THROW(iou_from_confusion(ConfusionMatrix(3)), DomainError);
}

TEST(Iou, BoundedInUnitInterval) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const IouReport r =
        iou_from_confusion(confusion_matrix(random_labels(rng, 5, 5, 3), random_labels(rng, 5, 5, 3), 3));
    ASSERT_GE(r.miou, 0.0);
    ASSERT_LE(r.miou, 1.0);
  }
}

TEST(Render, LabelColoursAreInjective) {
  std::set<Rgb8> seen;
  for (int id = 0; id < 256; ++id) seen.insert(label_color(id));
  EXPECT_EQ(seen.size(), 256u);
  EXPECT_EQ(label_color(0), (Rgb8{0, 0, 0}));
  EXPECT_EQ(label_color(1), (Rgb8{128, 0, 0}));
}

TEST(Render, HeatRampEndpointsAndClamp) {
  EXPECT_EQ(heat_color(0.0), kHeatLow);
  EXPECT_EQ(heat_color(1.0), kHeatHigh);
  EXPECT_EQ(heat_color(-3.0), kHeatLow);
  EXPECT_EQ(heat_color(7.0), kHeatHigh);
}

TEST(Render, ConstantMapIsUniformLowColour) {
  TempDir dir("render");
  render_heat(Grid<float>(4, 6, 0.0f), dir / "zero.ppm");
  const RgbImage img = io::read_rgb(dir / "zero.ppm");
  ASSERT_EQ(img.values.size(), 4u * 6u * 3u);
  for (float v : img.values) ASSERT_NEAR(v, 128.0f / 255.0f, 1e-6f);
}

TEST(Render, LabelImageRoundTripsColours) {
  TempDir dir("render");
  render_labels(labels(1, 3, {0, 1, 2}), dir / "l.ppm");
  const RgbImage img = io::read_rgb(dir / "l.ppm");
  for (int x = 0; x < 3; ++x) {
    const Rgb8 want = label_color(x);
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(img.values[static_cast<std::size_t>(x) * 3 + c], want[c] / 255.0f, 1e-6f);
    }
  }
}

TEST(Render, EntropySummaryOfUniformProbabilities) {
  Tensor p({1, 4, 2, 3}, 0.25);
  const Grid<float> e = entropy_summary(p, 0);
  for (float v : e.values) EXPECT_NEAR(v, std::log(4.0), 1e-6);
  Tensor onehot({1, 2, 1, 1});
  onehot[0] = 1.0;
  EXPECT_EQ(entropy_summary(onehot, 0).values[0], 0.0f);
}

TEST(Ablation, FourVariantsShareTheGenerator) {
  TempDir root("ablation");
  RunConfig cfg = tiny::run_config(root / "data", root / "abl");
  cfg.epochs = 1;
  tiny::generate(cfg);
  const auto rows = run_ablation(cfg, {nn::kAllVariants.begin(), nn::kAllVariants.end()});
  ASSERT_EQ(rows.size(), 4u);
  std::set<std::size_t> disc_sizes;
  for (const auto& r : rows) {
    EXPECT_EQ(r.param_count, rows[0].param_count);
    EXPECT_GE(r.miou, 0.0);
    EXPECT_LE(r.miou, 1.0);
    disc_sizes.insert(r.disc_param_count);
    EXPECT_TRUE(std::filesystem::exists(root / "abl" / nn::to_string(r.variant) / "final.ckpt"));
  }
  EXPECT_EQ(disc_sizes.size(), 3u);  // entropy_only and fusion share a width
  std::ifstream in(root / "abl/ablation.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kAblationHeader);
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 4);
}

TEST(Ablation, ReferenceOrdering) {
  using nn::AblationVariant;
  std::vector<AblationRow> rows{{AblationVariant::kConcat, 0.5},
                                {AblationVariant::kEntropyOnly, 0.4},
                                {AblationVariant::kFusion, 0.3}};
  EXPECT_TRUE(matches_reference_ordering(rows));
  rows[2].miou = 0.45;
  EXPECT_FALSE(matches_reference_ordering(rows));
  rows.pop_back();
  EXPECT_FALSE(matches_reference_ordering(rows));
}

}  // namespace
}  // namespace edgeuda::eval
