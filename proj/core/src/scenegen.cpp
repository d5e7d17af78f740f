#include "edgeuda/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "edgeuda/config.hpp"
#include "edgeuda/error.hpp"
#include "edgeuda/image_io.hpp"

namespace edgeuda::scenegen {
namespace fs = std::filesystem;

namespace {

std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t index, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    stream};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kLayoutStream = 1;
constexpr std::uint32_t kShiftStream = 2;

Color hsv_to_rgb(double h, double s, double v) {
  const double hh = std::fmod(h, 1.0) * 6.0;
  const int sector = static_cast<int>(hh);
  const double f = hh - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double r = v, g = t, b = p;
  switch (sector % 6) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  return {static_cast<float>(r), static_cast<float>(g), static_cast<float>(b)};
}

std::string sample_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", i);
  return buf;
}

}  // namespace

void SceneConfig::validate() const {
  if (height <= 0 || width <= 0) throw ConfigError("scene: height and width must be positive");
  if (num_classes < 2) throw ConfigError("scene: num_classes must be >= 2");
  if (num_classes > 255) throw ConfigError("scene: num_classes must be < 255");
  if (shapes_min < 0 || shapes_max < shapes_min) {
    throw ConfigError("scene: require 0 <= shapes_min <= shapes_max");
  }
  if (!(depth_min > 0.0)) throw ConfigError("scene: depth_min must be > 0");
  if (!(depth_max > depth_min)) throw ConfigError("scene: depth_max must exceed depth_min");
  if (!class_palette.empty()) {
    if (static_cast<int>(class_palette.size()) != num_classes) {
      throw ConfigError("scene: class_palette needs one colour per class");
    }
    for (const auto& c : class_palette) {
      for (float v : c) {
        if (!(v >= 0.0f && v <= 1.0f)) throw ConfigError("scene: palette values must be in [0,1]");
      }
    }
  }
  if (color_jitter < 0.0) throw ConfigError("scene: color_jitter must be >= 0");
}

Color SceneConfig::class_color(int cls) const {
  if (!class_palette.empty()) return class_palette.at(cls);
  return default_palette(num_classes).at(cls);
}

std::vector<Color> default_palette(int num_classes) {
  std::vector<Color> palette;
  palette.push_back({0.5f, 0.5f, 0.5f});
  const int fg = num_classes - 1;
  for (int i = 0; i < fg; ++i) {
    palette.push_back(hsv_to_rgb(static_cast<double>(i) / fg, 0.75, 0.9));
  }
  return palette;
}

bool DomainShift::is_identity() const noexcept {
  return brightness_offset == 0.0 && contrast_gain == 1.0 && hue_rotation == 0.0 &&
         noise_stddev == 0.0 && texture_frequency == 0.0;
}

bool ShapeSpec::covers(int y, int x) const noexcept {
  const double dy = (y + 0.5 - cy) / half_h;
  const double dx = (x + 0.5 - cx) / half_w;
  if (kind == ShapeKind::kRectangle) return std::abs(dy) <= 1.0 && std::abs(dx) <= 1.0;
  return dy * dy + dx * dx <= 1.0;
}

std::vector<ShapeSpec> scene_layout(const SceneConfig& cfg, std::uint64_t index) {
  cfg.validate();
  auto rng = rng_for(cfg.seed, index, kLayoutStream);
  std::uniform_int_distribution<int> count_dist(cfg.shapes_min, cfg.shapes_max);
  std::uniform_int_distribution<int> class_dist(1, cfg.num_classes - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-cfg.color_jitter, cfg.color_jitter);
  const double log_min = std::log(cfg.depth_min);
  const double log_span = std::log(cfg.depth_max) - log_min;

  const int count = count_dist(rng);
  std::vector<ShapeSpec> shapes(count);
  for (auto& s : shapes) {
    s.kind = unit(rng) < 0.5 ? ShapeKind::kRectangle : ShapeKind::kEllipse;
    s.cls = class_dist(rng);
    s.half_h = (0.08 + 0.22 * unit(rng)) * cfg.height;
    s.half_w = (0.06 + 0.18 * unit(rng)) * cfg.width;
    s.cy = unit(rng) * cfg.height;
    s.cx = unit(rng) * cfg.width;
    s.depth = std::clamp(std::exp(log_min + unit(rng) * log_span), cfg.depth_min, cfg.depth_max);
    const Color base = cfg.class_color(s.cls);
    for (int ch = 0; ch < 3; ++ch) {
      s.color[ch] = static_cast<float>(std::clamp(base[ch] + jitter(rng), 0.0, 1.0));
    }
  }
  return shapes;
}

Sample generate_scene(const SceneConfig& cfg, std::uint64_t index) {
  const std::vector<ShapeSpec> shapes = scene_layout(cfg, index);
  Sample sample;
  sample.domain = Domain::kSource;
  sample.image = RgbImage(cfg.height, cfg.width);
  sample.labels = LabelMap(cfg.height, cfg.width, 0);
  sample.depth = DepthMap(cfg.height, cfg.width, static_cast<float>(cfg.depth_max));

  const Color bg = cfg.class_color(0);
  std::vector<double> zbuffer(static_cast<std::size_t>(cfg.height) * cfg.width,
                              std::numeric_limits<double>::infinity());
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      for (int ch = 0; ch < 3; ++ch) sample.image(y, x, ch) = bg[ch];
    }
  }
  for (const auto& s : shapes) {
    const int y0 = std::max(0, static_cast<int>(std::floor(s.cy - s.half_h)));
    const int y1 = std::min(cfg.height - 1, static_cast<int>(std::ceil(s.cy + s.half_h)));
    const int x0 = std::max(0, static_cast<int>(std::floor(s.cx - s.half_w)));
    const int x1 = std::min(cfg.width - 1, static_cast<int>(std::ceil(s.cx + s.half_w)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * cfg.width + x;
        if (!s.covers(y, x) || !(s.depth < zbuffer[i])) continue;
        zbuffer[i] = s.depth;
        sample.labels(y, x) = static_cast<std::uint8_t>(s.cls);
        sample.depth(y, x) = static_cast<float>(s.depth);
        for (int ch = 0; ch < 3; ++ch) sample.image(y, x, ch) = s.color[ch];
      }
    }
  }
  return sample;
}

RgbImage apply_domain_shift(const RgbImage& image, const DomainShift& shift,
                            std::uint64_t seed) {
  RgbImage out = image;
  if (shift.is_identity()) return out;

  std::vector<double> v(out.values.begin(), out.values.end());
  if (shift.contrast_gain != 1.0) {
    for (double& x : v) x = (x - 0.5) * shift.contrast_gain + 0.5;
  }
  if (shift.brightness_offset != 0.0) {
    for (double& x : v) x += shift.brightness_offset;
  }
  if (shift.hue_rotation != 0.0) {
    const double c = std::cos(shift.hue_rotation);
    const double s = std::sin(shift.hue_rotation);
    const double a = (1.0 - c) / 3.0;
    const double b = std::sqrt(1.0 / 3.0) * s;
    const double m[3][3] = {{c + a, a - b, a + b}, {a + b, c + a, a - b}, {a - b, a + b, c + a}};
    for (std::size_t i = 0; i < v.size(); i += 3) {
      const double r = v[i], g = v[i + 1], bl = v[i + 2];
      for (int row = 0; row < 3; ++row) v[i + row] = m[row][0] * r + m[row][1] * g + m[row][2] * bl;
    }
  }
  if (shift.texture_frequency != 0.0) {
    constexpr double kAmplitude = 0.08;
    const double w = 2.0 * std::numbers::pi * shift.texture_frequency;
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        const double t = kAmplitude * std::sin(w * x) * std::sin(w * y);
        for (int ch = 0; ch < 3; ++ch) v[(static_cast<std::size_t>(y) * out.width + x) * 3 + ch] += t;
      }
    }
  }
  if (shift.noise_stddev != 0.0) {
    auto rng = rng_for(seed, 0, kShiftStream);
    std::normal_distribution<double> noise(0.0, std::abs(shift.noise_stddev));
    for (double& x : v) x += noise(rng);
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.values[i] = static_cast<float>(std::clamp(v[i], 0.0, 1.0));
  }
  return out;
}

Manifest generate_dataset(const SceneConfig& cfg, const DomainShift& shift,
                          const DatasetCounts& counts, const fs::path& out_dir) {
  cfg.validate();
  if (counts.n_source < 0 || counts.n_target < 0 || counts.n_target_eval < 0) {
    throw ConfigError("dataset counts must be non-negative");
  }
  std::error_code ec;
  for (const char* sub : {"source/train", "target/train", "target/eval"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw DatasetError("cannot create dataset directory", (out_dir / sub).string());
  }

  SceneConfig resolved = cfg;
  if (resolved.class_palette.empty()) resolved.class_palette = default_palette(cfg.num_classes);
  const int quantum = io::depth_quantum_mm(cfg.depth_max);

  Manifest manifest;
  manifest.config = {{"scene", to_json(resolved)},
                     {"shift", to_json(shift)},
                     {"counts",
                      {{"n_source", counts.n_source},
                       {"n_target", counts.n_target},
                       {"n_target_eval", counts.n_target_eval}}},
                     {"depth_quantum_mm", quantum}};

  auto emit = [&](Domain domain, const std::string& split, int local, std::uint64_t index) {
    Sample s = generate_scene(resolved, index);
    if (domain == Domain::kTarget) {
      s.image = apply_domain_shift(s.image, shift, resolved.seed ^ (index * 0x9E3779B97F4A7C15ull));
    }
    const std::string dir = to_string(domain) + "/" + split + "/";
    const std::string stem = dir + sample_name(local);
    ManifestEntry e;
    e.id = to_string(domain) + "-" + split + "-" + sample_name(local);
    e.domain = domain;
    e.split = split;
    e.image = stem + "_image.ppm";
    io::write_rgb(out_dir / e.image, s.image);
    const bool labeled = !(domain == Domain::kTarget && split == "train");
    if (labeled) {
      e.labels = stem + "_labels.pgm";
      e.depth = stem + "_depth.pgm";
      io::write_labels(out_dir / e.labels, s.labels);
      io::write_depth(out_dir / e.depth, s.depth, quantum);
    }
    manifest.samples.push_back(std::move(e));
  };

  std::uint64_t index = 0;
  for (int i = 0; i < counts.n_source; ++i) emit(Domain::kSource, "train", i, index++);
  for (int i = 0; i < counts.n_target; ++i) emit(Domain::kTarget, "train", i, index++);
  for (int i = 0; i < counts.n_target_eval; ++i) emit(Domain::kTarget, "eval", i, index++);

  save_manifest(manifest, out_dir);
  return manifest;
}

}  // namespace edgeuda::scenegen
