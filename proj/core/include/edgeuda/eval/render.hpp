#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "edgeuda/grid.hpp"
#include "edgeuda/tensor.hpp"

namespace edgeuda::eval {

using Rgb8 = std::array<std::uint8_t, 3>;

// PASCAL VOC colour map: bit-interleaved, distinct for every id in [0, 255].
Rgb8 label_color(int id);

// Linear ramp from grey (128, 128, 128) at t = 0 to red (255, 0, 0) at t = 1.
Rgb8 heat_color(double t);
inline constexpr Rgb8 kHeatLow{128, 128, 128};
inline constexpr Rgb8 kHeatHigh{255, 0, 0};

void render_labels(const LabelMap& labels, const std::filesystem::path& path);

// Scalar map normalised to its own [min, max]; a constant map renders as
// the lowest ramp colour.
void render_heat(const Grid<float>& map, const std::filesystem::path& path);
void render_heat(const EdgeMap& map, const std::filesystem::path& path);

// Channel sum of -p ln p for sample `n` of an N x K x H x W probability map.
Grid<float> entropy_summary(const Tensor& probs, int n);
// Channel `c` of sample `n`.
Grid<float> channel_map(const Tensor& t, int n, int c);

}  // namespace edgeuda::eval
