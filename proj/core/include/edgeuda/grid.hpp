#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace edgeuda {

// Row-major 2-D raster.
template <typename T>
struct Grid {
  int height = 0;
  int width = 0;
  std::vector<T> values;

  Grid() = default;
  Grid(int h, int w, T fill = T{})
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  T& operator()(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  const T& operator()(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const Grid&, const Grid&) = default;
};

inline constexpr std::uint8_t kIgnoreLabel = 255;

using LabelMap = Grid<std::uint8_t>;
using DepthMap = Grid<float>;
using GrayImage = Grid<float>;
// Binary edge map in {0, 255}.
using EdgeMap = Grid<std::uint8_t>;

// Interleaved RGB raster, values in [0, 1].
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  RgbImage() = default;
  RgbImage(int h, int w, float fill = 0.0f)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w * 3, fill) {}

  float& operator()(int y, int x, int ch) {
    return values[(static_cast<std::size_t>(y) * width + x) * 3 + ch];
  }
  float operator()(int y, int x, int ch) const {
    return values[(static_cast<std::size_t>(y) * width + x) * 3 + ch];
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

}  // namespace edgeuda
