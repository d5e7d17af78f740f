#include <gtest/gtest.h>

#include <fstream>

#include "edgeuda/config.hpp"
#include "edgeuda/error.hpp"
#include "support.hpp"

namespace edgeuda {
namespace {

using json = nlohmann::json;
using testing::TempDir;

std::string error_of(const json& j) {
  try {
    run_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(RunConfig, EmptyObjectGivesDefaults) {
  const RunConfig c = run_config_from_json(json::object());
  EXPECT_EQ(to_json(c), to_json(RunConfig{}));
  EXPECT_EQ(c.optim.gen_lr, 2.5e-4);
  EXPECT_EQ(c.optim.disc_lr, 1e-4);
  EXPECT_EQ(c.optim.disc_beta2, 0.99);
  EXPECT_EQ(c.selftrain.lambda_conf, 0.8);
  EXPECT_EQ(c.weights.adv, 0.001);
  EXPECT_EQ(c.scene.depth_max, 666.36);
  EXPECT_EQ(c.variant, nn::AblationVariant::kConcat);
}

TEST(RunConfig, UnknownKeysAreNamed) {
  EXPECT_NE(error_of({{"selftrain", {{"lamda_conf", 0.7}}}}).find("selftrain.lamda_conf"),
            std::string::npos);
  EXPECT_NE(error_of({{"trian", json::object()}}).find("trian"), std::string::npos);
}

TEST(RunConfig, TypeAndRangeErrors) {
  EXPECT_FALSE(error_of({{"train", {{"epochs", "ten"}}}}).empty());
  EXPECT_FALSE(error_of({{"selftrain", {{"lambda_conf", 1.0}}}}).empty());
  EXPECT_FALSE(error_of({{"optim", {{"gen_lr", 0.0}}}}).empty());
  EXPECT_FALSE(error_of({{"weights", {{"adv", -1.0}}}}).empty());
  EXPECT_FALSE(error_of({{"scene", {{"height", 40}}}}).empty());
  EXPECT_FALSE(error_of({{"train", {{"variant", "sum"}}}}).empty());
  EXPECT_FALSE(error_of({{"train", {{"eval_head", "depth"}}}}).empty());
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.variant = nn::AblationVariant::kEdgeToEach;
  c.shift.hue_rotation = 0.4;
  c.scene.class_palette = scenegen::default_palette(5);
  c.eval_head = EvalHead::kSemantic;
  c.seed = 0xFFFFFFFFFFull;
  EXPECT_EQ(to_json(run_config_from_json(to_json(c))), to_json(c));
}

TEST(LoadConfig, PrecedenceDefaultsFileOverrides) {
  TempDir dir;
  std::ofstream(dir / "c.json") << R"({"selftrain": {"lambda_conf": 0.6}, "train": {"epochs": 3}})";
  const RunConfig file_only = load_config(dir / "c.json");
  EXPECT_EQ(file_only.selftrain.lambda_conf, 0.6);
  EXPECT_EQ(file_only.epochs, 3);
  EXPECT_EQ(file_only.batch_size, 4);
  const RunConfig over =
      load_config(dir / "c.json", {"selftrain.lambda_conf=0.7", "paths.out_dir=runs/x"});
  EXPECT_EQ(over.selftrain.lambda_conf, 0.7);
  EXPECT_EQ(over.out_dir, "runs/x");
  EXPECT_EQ(over.epochs, 3);
  EXPECT_EQ(load_config("", {"train.variant=fusion"}).variant, nn::AblationVariant::kFusion);
}

TEST(LoadConfig, BadInputs) {
  TempDir dir;
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
  EXPECT_THROW(load_config("", {"novalue"}), ConfigError);
  EXPECT_THROW(load_config("", {"train.epoch=3"}), ConfigError);
}

TEST(SaveConfig, EchoReloadsIdentically) {
  TempDir dir;
  RunConfig c;
  c.shift.noise_stddev = 0.03;
  c.weights.dep = 0.001;
  save_config(c, dir / "config.json");
  EXPECT_EQ(to_json(load_config(dir / "config.json")), to_json(c));
}

}  // namespace
}  // namespace edgeuda
