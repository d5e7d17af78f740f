#pragma once

#include <cstdint>
#include <vector>

#include "edgeuda/nn/autograd.hpp"
#include "edgeuda/nn/functional.hpp"
#include "edgeuda/nn/params.hpp"

namespace edgeuda::nn {

struct ArchConfig {
  // Four stride-2 encoder stages.
  std::vector<int> encoder_channels{16, 32, 64, 128};
  int decoder_channels = 64;
  int head_channels = 32;
  int depth_bins = 8;
  // Widths of the first three discriminator convolutions; the fourth maps to 1.
  std::vector<int> disc_channels{16, 32, 64};
  double disc_leaky_slope = 0.2;

  void validate() const;
};

// Every head tensor is upsampled to input resolution.
struct ModelOutputs {
  Var sem_logits;    // N x C
  Var ref_logits;    // N x C
  Var depth_logits;  // N x K
  Var edge_logit;    // N x 1
  Var sem_probs;
  Var ref_probs;
  Var depth_probs;
  Var depth;      // decoded continuous depth, N x 1
  Var edge_prob;  // sigmoid(edge_logit)
};

// Shared encoder with semantic, depth-bin, edge and depth-modulated refined
// semantic heads. Features live at 1/8 input resolution.
class SegmentationModel {
 public:
  static constexpr int kTotalStride = 16;
  static constexpr int kFeatureStride = 8;

  SegmentationModel(const ArchConfig& arch, int num_classes, DepthBinSpec bins);

  // He-normal hidden layers; final head layers N(0, 0.01^2), or all zero
  // when `zero_final_layers`.
  ParamSet init(std::uint64_t seed, bool zero_final_layers = false) const;

  // `images`: N x 3 x H x W with H, W divisible by kTotalStride.
  ModelOutputs forward(const ParamVars& params, const Var& images) const;
  ModelOutputs forward(const ParamSet& params, const Tensor& images) const;

  int num_classes() const noexcept { return num_classes_; }
  const DepthBinSpec& bins() const noexcept { return bins_; }
  const ArchConfig& arch() const noexcept { return arch_; }
  const ParamSet& layout() const noexcept { return layout_; }

 private:
  struct Head {
    ConvLayer hidden;
    ConvLayer out;
  };

  Var head(const Head& h, const ParamVars& params, const Var& features) const;

  ArchConfig arch_;
  int num_classes_;
  DepthBinSpec bins_;
  ParamSet layout_;
  std::vector<ConvLayer> encoder_;
  ConvLayer decoder_up_;
  ConvLayer decoder_fuse_;
  Head sem_, depth_, edge_, ref_;
};

// Four 4x4 stride-2 convolutions with leaky-ReLU between them; returns
// patch logits at 1/16 input resolution.
class Discriminator {
 public:
  static constexpr int kTotalStride = 16;

  Discriminator(int in_channels, const ArchConfig& arch);

  // DC-GAN style N(0, 0.02^2) weights.
  ParamSet init(std::uint64_t seed) const;

  Var logits(const ParamVars& params, const Var& unified) const;
  // Patch scores in (0, 1).
  Tensor forward(const ParamSet& params, const Tensor& unified) const;

  int in_channels() const noexcept { return in_channels_; }
  const ParamSet& layout() const noexcept { return layout_; }

 private:
  int in_channels_;
  double slope_;
  ParamSet layout_;
  std::vector<ConvLayer> layers_;
};

}  // namespace edgeuda::nn
