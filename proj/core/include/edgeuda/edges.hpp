#pragma once

#include <vector>

#include "edgeuda/grid.hpp"

namespace edgeuda::edges {

struct CannyParams {
  double gaussian_sigma = 1.0;
  // Hysteresis thresholds as fractions of the largest gradient magnitude.
  double low_threshold = 0.1;
  double high_threshold = 0.3;

  void validate() const;
  int kernel_radius() const;
};

// 255 where any 4-neighbour carries a different label, 0 elsewhere.
// Throws DomainError if the map contains the ignore label.
EdgeMap boundary_oracle(const LabelMap& labels);

// Gaussian smoothing, Sobel gradients, non-maximum suppression and
// 8-connected double-threshold hysteresis. Borders replicate. Throws
// InputSizeError when the image is smaller than the Gaussian kernel.
EdgeMap canny(const GrayImage& gray, const CannyParams& params);

enum class EdgeMode { kUnion, kPerClassStack };

// Runs canny on the binary mask of every class. kUnion returns one map (the
// pixel-wise max); kPerClassStack returns num_classes maps.
std::vector<EdgeMap> extract_edge_gt(const LabelMap& labels, int num_classes,
                                     const CannyParams& params, EdgeMode mode);
EdgeMap edge_union(const LabelMap& labels, int num_classes, const CannyParams& params);

// Square (Chebyshev) dilation of the non-zero pixels by `radius`.
EdgeMap dilate(const EdgeMap& edges, int radius);

}  // namespace edgeuda::edges
