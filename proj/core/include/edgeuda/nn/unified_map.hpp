#pragma once

#include <array>
#include <string>

#include "edgeuda/nn/autograd.hpp"
#include "edgeuda/tensor.hpp"

namespace edgeuda::nn {

// How entropy maps and the predicted edge probability are combined before
// the discriminator.
enum class AblationVariant {
  kEntropyOnly,  // [E_s | E_z | E_r]
  kFusion,       // [E_s | E_z | E_r] * e, element-wise
  kEdgeToEach,   // [E_s | e | E_z | e | E_r | e]
  kConcat,       // [E_s | E_z | E_r | e]
};

inline constexpr std::array<AblationVariant, 4> kAllVariants{
    AblationVariant::kEntropyOnly, AblationVariant::kFusion, AblationVariant::kEdgeToEach,
    AblationVariant::kConcat};

std::string to_string(AblationVariant v);
AblationVariant variant_from_string(const std::string& s);  // throws ConfigError

int unified_channels(AblationVariant v, int num_classes, int depth_bins);

// Entropy maps are N x C, N x K, N x C; `edge_prob` is N x 1.
Var concat_unified_map(const Var& sem_entropy, const Var& depth_entropy,
                       const Var& ref_entropy, const Var& edge_prob, AblationVariant v);
Tensor concat_unified_map(const Tensor& sem_entropy, const Tensor& depth_entropy,
                          const Tensor& ref_entropy, const Tensor& edge_prob, AblationVariant v);

}  // namespace edgeuda::nn
