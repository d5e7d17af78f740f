#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edgeuda/grid.hpp"
#include "edgeuda/manifest.hpp"

namespace edgeuda::scenegen {

using Color = std::array<float, 3>;

struct SceneConfig {
  int height = 64;
  int width = 128;
  int num_classes = 5;
  int shapes_min = 2;
  int shapes_max = 5;
  double depth_min = 1.0;
  double depth_max = 666.36;
  // One base colour per class; empty means default_palette(num_classes).
  std::vector<Color> class_palette;
  // Uniform per-shape, per-channel colour perturbation amplitude.
  double color_jitter = 0.06;
  std::uint64_t seed = 7;

  // Throws ConfigError when the configuration is unusable.
  void validate() const;
  Color class_color(int cls) const;
};

// Class 0 is a neutral grey background; foreground classes get evenly
// spaced hues.
std::vector<Color> default_palette(int num_classes);

struct DomainShift {
  double brightness_offset = 0.0;
  double contrast_gain = 1.0;
  double hue_rotation = 0.0;  // radians around the grey axis
  double noise_stddev = 0.0;
  double texture_frequency = 0.0;  // cycles per pixel of a 0.08-amplitude grating

  bool is_identity() const noexcept;
};

struct Sample {
  RgbImage image;
  LabelMap labels;  // empty for unlabeled target-train samples
  DepthMap depth;   // empty when unavailable
  Domain domain = Domain::kSource;

  bool has_labels() const noexcept { return !labels.values.empty(); }
  bool has_depth() const noexcept { return !depth.values.empty(); }
};

enum class ShapeKind { kRectangle, kEllipse };

struct ShapeSpec {
  ShapeKind kind = ShapeKind::kRectangle;
  int cls = 1;
  // Centre and half-extents in pixel units; pixel (y, x) is sampled at its
  // centre (y + 0.5, x + 0.5).
  double cy = 0.0;
  double cx = 0.0;
  double half_h = 0.0;
  double half_w = 0.0;
  double depth = 0.0;
  Color color{};

  bool covers(int y, int x) const noexcept;
};

// Shapes of scene `index`, in generation order.
std::vector<ShapeSpec> scene_layout(const SceneConfig& cfg, std::uint64_t index);

// Deterministic in (cfg, index). Pixels take the nearest covering shape;
// uncovered pixels are background (class 0) at depth_max.
Sample generate_scene(const SceneConfig& cfg, std::uint64_t index);

// Applies contrast (about 0.5), brightness, hue rotation, texture grating
// and Gaussian noise, in that order, then clamps to [0, 1]. Identity
// components are skipped so the identity shift is bit-exact.
RgbImage apply_domain_shift(const RgbImage& image, const DomainShift& shift,
                            std::uint64_t seed);

struct DatasetCounts {
  int n_source = 0;
  int n_target = 0;       // unlabeled target-train samples
  int n_target_eval = 0;  // held-out labeled target samples
};

// Writes the dataset and its manifest under `out_dir` and returns the
// manifest. Target-train samples are written without labels or depth; the
// held-out target-eval split keeps them.
Manifest generate_dataset(const SceneConfig& cfg, const DomainShift& shift,
                          const DatasetCounts& counts, const std::filesystem::path& out_dir);

}  // namespace edgeuda::scenegen
