#include "edgeuda/eval/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "edgeuda/error.hpp"
#include "edgeuda/image_io.hpp"
#include "edgeuda/nn/functional.hpp"

namespace edgeuda::eval {

Rgb8 label_color(int id) {
  if (id < 0 || id > 255) throw DomainError("label id out of range: " + std::to_string(id));
  int r = 0, g = 0, b = 0;
  int c = id;
  for (int j = 0; j < 8; ++j) {
    r |= ((c >> 0) & 1) << (7 - j);
    g |= ((c >> 1) & 1) << (7 - j);
    b |= ((c >> 2) & 1) << (7 - j);
    c >>= 3;
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
          static_cast<std::uint8_t>(b)};
}

Rgb8 heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  Rgb8 out{};
  for (int ch = 0; ch < 3; ++ch) {
    out[ch] = static_cast<std::uint8_t>(
        std::lround(kHeatLow[ch] + t * (static_cast<double>(kHeatHigh[ch]) - kHeatLow[ch])));
  }
  return out;
}

void render_labels(const LabelMap& labels, const std::filesystem::path& path) {
  std::vector<std::uint8_t> rgb;
  rgb.reserve(labels.size() * 3);
  for (std::uint8_t v : labels.values) {
    const Rgb8 c = label_color(v);
    rgb.insert(rgb.end(), c.begin(), c.end());
  }
  io::write_ppm(path, labels.width, labels.height, rgb);
}

void render_heat(const Grid<float>& map, const std::filesystem::path& path) {
  if (map.values.empty()) throw ShapeError("render_heat: empty map");
  const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<std::uint8_t> rgb;
  rgb.reserve(map.size() * 3);
  for (float v : map.values) {
    if (!std::isfinite(v)) throw NumericError("render_heat: non-finite value");
    const Rgb8 c = heat_color(hi > lo ? (v - lo) / (hi - lo) : 0.0);
    rgb.insert(rgb.end(), c.begin(), c.end());
  }
  io::write_ppm(path, map.width, map.height, rgb);
}

void render_heat(const EdgeMap& map, const std::filesystem::path& path) {
  Grid<float> f(map.height, map.width);
  std::copy(map.values.begin(), map.values.end(), f.values.begin());
  render_heat(f, path);
}

Grid<float> entropy_summary(const Tensor& probs, int n) {
  const Shape s = probs.shape();
  Grid<float> out(s.h, s.w);
  for (std::size_t p = 0; p < s.plane(); ++p) {
    double e = 0.0;
    for (int c = 0; c < s.c; ++c) e += nn::entropy_term(probs.channel(n, c)[p]);
    out.values[p] = static_cast<float>(e);
  }
  return out;
}

Grid<float> channel_map(const Tensor& t, int n, int c) {
  Grid<float> out(t.h(), t.w());
  const double* src = t.channel(n, c);
  for (std::size_t p = 0; p < out.size(); ++p) out.values[p] = static_cast<float>(src[p]);
  return out;
}

}  // namespace edgeuda::eval
