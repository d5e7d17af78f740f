#pragma once

#include <vector>

#include "edgeuda/tensor.hpp"

// Forward-only tensor functions. Probability, entropy and logit tensors are
// N x K x H x W with the class/bin axis on channels; label, depth and edge
// maps are N x 1 x H x W.
namespace edgeuda::nn {

inline constexpr double kLogEpsilon = 1e-12;

// Channel softmax, max-subtracted. Throws NumericError on NaN input.
Tensor softmax(const Tensor& logits);

// -p ln p per entry with 0 ln 0 := 0.
Tensor entropy_map(const Tensor& probs);
double entropy_term(double p);

// Mean over non-ignored pixels of -ln p(label). Labels are stored as
// doubles holding class ids or `ignore_index`.
double cross_entropy_loss(const Tensor& probs, const Tensor& labels, int ignore_index = 255);

// Reverse Huber loss with cutoff c = 0.2 * max|r| over the whole batch.
double berhu_loss(const Tensor& pred, const Tensor& target);
inline constexpr double kBerhuCutoffFraction = 0.2;

double sigmoid(double x);
Tensor sigmoid(const Tensor& x);

// Mean binary cross-entropy. `pred` must lie strictly inside (0, 1);
// `target` holds edge ground truth in {0, 255}.
double bce_edge_loss(const Tensor& pred, const Tensor& target);

// Log-spaced depth discretisation.
struct DepthBinSpec {
  std::vector<double> thresholds;  // K + 1 values, t_0 = z_min, t_K = z_max
  std::vector<double> centers;     // K geometric means of adjacent thresholds

  int bins() const noexcept { return static_cast<int>(centers.size()); }
  double z_min() const { return thresholds.front(); }
  double z_max() const { return thresholds.back(); }
};

DepthBinSpec sid_bins(double z_min, double z_max, int bins);

// Expected bin centre under `bin_probs`, clamped to [z_min, z_max].
Tensor depth_decode(const Tensor& bin_probs, const DepthBinSpec& spec);

// Discriminator BCE with source labelled 1 and target labelled 0:
// mean(-ln s_src) + mean(-ln(1 - s_tgt)); scores are clamped to
// [1e-12, 1 - 1e-12] before the logs.
double adversarial_d_loss(const Tensor& score_src, const Tensor& score_tgt);
// Non-saturating generator objective mean(-ln s_tgt).
double adversarial_g_loss(const Tensor& score_tgt);

}  // namespace edgeuda::nn
