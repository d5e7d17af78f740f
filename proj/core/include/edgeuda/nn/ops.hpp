#pragma once

#include <utility>
#include <vector>

#include "edgeuda/nn/autograd.hpp"
#include "edgeuda/nn/functional.hpp"

// Differentiable counterparts of the functional layer plus the layers the
// networks need. Every op computes its forward value eagerly.
namespace edgeuda::nn {

// weight: Cout x Cin x k x k, bias: 1 x Cout x 1 x 1 (square kernels).
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);

Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope);

// Bilinear resampling with half-pixel centres (align_corners = false).
Var resize_bilinear(const Var& x, int out_h, int out_w);
Tensor resize_bilinear(const Tensor& x, int out_h, int out_w);

// Mean over non-overlapping factor x factor windows.
Var avg_pool(const Var& x, int factor);

Var concat_channels(const std::vector<Var>& parts);

// x: N x C x H x W scaled by a single-channel map N x 1 x H x W.
Var multiply_channelwise(const Var& x, const Var& map);

Var softmax(const Var& logits);
Var sigmoid(const Var& x);
Var entropy(const Var& probs);
Var depth_decode(const Var& bin_probs, const DepthBinSpec& spec);

// (ln z - ln z_min) / (ln z_max - ln z_min), i.e. depth mapped onto [0, 1]
// uniformly in log space.
Var log_normalize_depth(const Var& depth, double z_min, double z_max);

Var cross_entropy(const Var& probs, const Tensor& labels, int ignore_index = 255);
Var berhu(const Var& pred, const Tensor& target);

// BCE of sigmoid(logits) against edge ground truth in {0, 255}, evaluated
// in the log-sum-exp stable form so saturated logits stay finite.
Var bce_with_logits(const Var& logits, const Tensor& target);

// Discriminator and generator objectives on discriminator logits; equal to
// adversarial_d_loss / adversarial_g_loss applied to sigmoid(logits).
Var adversarial_d_loss_logits(const Var& src_logits, const Var& tgt_logits);
Var adversarial_g_loss_logits(const Var& tgt_logits);

// sum_i w_i * t_i over scalar terms.
Var weighted_sum(const std::vector<std::pair<double, Var>>& terms);

}  // namespace edgeuda::nn
