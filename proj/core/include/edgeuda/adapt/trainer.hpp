#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "edgeuda/adapt/dataset.hpp"
#include "edgeuda/adapt/types.hpp"
#include "edgeuda/config.hpp"
#include "edgeuda/eval/metrics.hpp"
#include "edgeuda/nn/checkpoint.hpp"
#include "edgeuda/nn/model.hpp"
#include "edgeuda/nn/unified_map.hpp"

namespace edgeuda::adapt {

struct SourceBatch {
  Tensor images;  // N x 3 x H x W
  Tensor labels;  // N x 1 x H x W
  Tensor depth;   // N x 1 x H x W
  Tensor edges;   // N x 1 x H x W in {0, 255}
};

struct TargetBatch {
  Tensor images;
};

struct LossBreakdown {
  double seg = 0.0;
  double ref = 0.0;
  double dep = 0.0;
  double edge = 0.0;
  double adv_g = 0.0;
  double adv_d = 0.0;
  double total = 0.0;  // weighted generator objective
};

struct StepResult {
  LossBreakdown losses;
  nn::Gradients generator;
  nn::Gradients discriminator;  // empty for supervised steps
};

// Weighted supervised objective of already computed head outputs; fills
// the per-term values of `losses`.
nn::Var supervised_objective(const nn::ModelOutputs& out, const SourceBatch& batch,
                             const LossWeights& weights, LossBreakdown& losses);

// Weighted supervised objective on a labelled source batch. Throws
// ProtocolError when labels, depth or edge targets are missing.
StepResult supervised_step(const nn::SegmentationModel& model, const nn::ParamSet& params,
                           const SourceBatch& batch, const LossWeights& weights);

// Generator gradients of the supervised objective plus w_adv times the
// generator adversarial loss on the target unified map (discriminator
// frozen), then discriminator gradients on detached source and target maps.
// With w_adv == 0 the generator gradients equal those of supervised_step.
StepResult adversarial_step(const nn::SegmentationModel& model, const nn::ParamSet& params,
                            const nn::Discriminator& disc, const nn::ParamSet& disc_params,
                            const SourceBatch& src, const TargetBatch& tgt,
                            const LossWeights& weights, nn::AblationVariant variant);

// Unified map of one batch, computed without gradients.
Tensor unified_map(const nn::SegmentationModel& model, const nn::ParamSet& params,
                   const Tensor& images, nn::AblationVariant variant);

nn::SegmentationModel make_model(const RunConfig& cfg);
nn::Discriminator make_discriminator(const RunConfig& cfg);

// Argmax of the chosen head, evaluated `batch_size` images at a time.
std::vector<LabelMap> predict_labels(const nn::SegmentationModel& model,
                                     const nn::ParamSet& params, std::span<const RgbImage> images,
                                     EvalHead head, int batch_size);

eval::ConfusionMatrix evaluate(const nn::SegmentationModel& model, const nn::ParamSet& params,
                               const LabeledSet& set, EvalHead head, int batch_size);

inline constexpr const char* kMetricsHeader =
    "step,epoch,phase,loss_seg,loss_ref,loss_dep,loss_edge,loss_adv_g,loss_adv_d,lr_gen,lr_disc,"
    "eval_miou";

struct FitResult {
  nn::Checkpoint final_checkpoint;
  nn::Checkpoint best_checkpoint;
  double initial_miou = 0.0;  // target-eval mIoU of the initialisation
  std::vector<double> epoch_miou;
  double best_miou = 0.0;
  long steps = 0;
};

// Trains on cfg.data_dir and writes metrics.csv, final.ckpt, best.ckpt and
// config.json into cfg.out_dir. The first floor(warmup_fraction * epochs)
// epochs are supervised only. Deterministic given the config.
FitResult fit(const RunConfig& cfg);

}  // namespace edgeuda::adapt
