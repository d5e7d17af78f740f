#include "edgeuda/nn/unified_map.hpp"

#include "edgeuda/error.hpp"
#include "edgeuda/nn/ops.hpp"

namespace edgeuda::nn {

std::string to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::kEntropyOnly: return "entropy_only";
    case AblationVariant::kFusion: return "fusion";
    case AblationVariant::kEdgeToEach: return "edge_to_each";
    case AblationVariant::kConcat: return "concat";
  }
  return "concat";
}

AblationVariant variant_from_string(const std::string& s) {
  for (auto v : kAllVariants) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown ablation variant '" + s +
                    "' (expected entropy_only, fusion, edge_to_each or concat)");
}

int unified_channels(AblationVariant v, int num_classes, int depth_bins) {
  const int entropy = 2 * num_classes + depth_bins;
  switch (v) {
    case AblationVariant::kEntropyOnly:
    case AblationVariant::kFusion: return entropy;
    case AblationVariant::kEdgeToEach: return entropy + 3;
    case AblationVariant::kConcat: return entropy + 1;
  }
  return entropy + 1;
}

Var concat_unified_map(const Var& sem_entropy, const Var& depth_entropy,
                       const Var& ref_entropy, const Var& edge_prob, AblationVariant v) {
  if (edge_prob.shape().c != 1) throw ShapeError("unified map: edge map must have 1 channel");
  switch (v) {
    case AblationVariant::kEntropyOnly:
      return concat_channels({sem_entropy, depth_entropy, ref_entropy});
    case AblationVariant::kFusion:
      return multiply_channelwise(concat_channels({sem_entropy, depth_entropy, ref_entropy}),
                                  edge_prob);
    case AblationVariant::kEdgeToEach:
      return concat_channels(
          {sem_entropy, edge_prob, depth_entropy, edge_prob, ref_entropy, edge_prob});
    case AblationVariant::kConcat:
      return concat_channels({sem_entropy, depth_entropy, ref_entropy, edge_prob});
  }
  throw ConfigError("unhandled ablation variant");
}

Tensor concat_unified_map(const Tensor& sem_entropy, const Tensor& depth_entropy,
                          const Tensor& ref_entropy, const Tensor& edge_prob, AblationVariant v) {
  return concat_unified_map(Var::constant(sem_entropy), Var::constant(depth_entropy),
                            Var::constant(ref_entropy), Var::constant(edge_prob), v)
      .value();
}

}  // namespace edgeuda::nn
