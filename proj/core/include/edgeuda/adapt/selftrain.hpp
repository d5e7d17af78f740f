#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "edgeuda/adapt/dataset.hpp"
#include "edgeuda/adapt/types.hpp"
#include "edgeuda/config.hpp"
#include "edgeuda/nn/model.hpp"

namespace edgeuda::adapt {

struct PseudoLabels {
  std::vector<LabelMap> labels;  // kIgnoreLabel below the threshold
  double coverage = 0.0;         // fraction of labelled pixels over all images
};

// Refined-head argmax where its softmax maximum is >= lambda_conf.
PseudoLabels generate_pseudo_labels(const nn::SegmentationModel& model,
                                    const nn::ParamSet& params,
                                    std::span<const RgbImage> images, double lambda_conf,
                                    int batch_size);

struct RoundReport {
  int round = 0;
  double coverage = 0.0;
  long steps = 0;          // batches trained; all-ignored batches are skipped
  double mean_loss = 0.0;  // weighted semantic loss over trained batches
};

struct RoundSettings {
  OptimSpec optim;
  LossWeights weights;  // only seg and ref are used
  int epochs = 1;
  int batch_size = 4;
  std::uint64_t seed = 1;
  int round = 0;
};

// One pseudo-label refresh followed by `settings.epochs` epochs of semantic
// and refined-semantic training on the pseudo-labelled target images, with
// a fresh optimiser. Throws DegeneratePseudoLabelError at zero coverage.
nn::ParamSet self_train_round(const nn::SegmentationModel& model, nn::ParamSet params,
                              const UnlabeledSet& target, double lambda_conf,
                              const RoundSettings& settings, RoundReport* report = nullptr);

struct SelfTrainResult {
  nn::ParamSet params;
  std::vector<RoundReport> rounds;
  double miou_before = 0.0;
  double miou_after = 0.0;
};

// Runs cfg.selftrain.rounds rounds starting from the generator in
// `checkpoint` and writes selftrain.csv, selftrain.ckpt and config.json to
// cfg.out_dir.
SelfTrainResult self_train(const RunConfig& cfg, const std::filesystem::path& checkpoint);

}  // namespace edgeuda::adapt
