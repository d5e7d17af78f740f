#include "edgeuda/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgeuda/error.hpp"

namespace edgeuda::edges {
namespace {

using Field = Grid<double>;

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

Field gaussian_blur(const GrayImage& img, double sigma, int radius) {
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += kernel[i + radius];
  }
  for (double& k : kernel) k /= total;

  // Subtracting the minimum first makes the result independent of a
  // constant offset in the input.
  const float lo = *std::min_element(img.values.begin(), img.values.end());
  Field tmp(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * (img(y, clamp_index(x + k, img.width)) - lo);
      }
      tmp(y, x) = acc;
    }
  }
  Field out(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp(clamp_index(y + k, img.height), x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

void CannyParams::validate() const {
  if (!(gaussian_sigma > 0.0)) throw ConfigError("canny: gaussian_sigma must be > 0");
  if (!(low_threshold > 0.0) || !(high_threshold >= low_threshold) || high_threshold > 1.0) {
    throw ConfigError("canny: require 0 < low <= high <= 1");
  }
}

int CannyParams::kernel_radius() const {
  return std::max(1, static_cast<int>(std::ceil(3.0 * gaussian_sigma)));
}

EdgeMap boundary_oracle(const LabelMap& labels) {
  EdgeMap out(labels.height, labels.width, 0);
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      const std::uint8_t v = labels(y, x);
      if (v == kIgnoreLabel) throw DomainError("boundary_oracle: ignore label present");
      const bool differs = (y > 0 && labels(y - 1, x) != v) ||
                           (y + 1 < labels.height && labels(y + 1, x) != v) ||
                           (x > 0 && labels(y, x - 1) != v) ||
                           (x + 1 < labels.width && labels(y, x + 1) != v);
      if (differs) out(y, x) = 255;
    }
  }
  return out;
}

EdgeMap canny(const GrayImage& gray, const CannyParams& params) {
  params.validate();
  const int radius = params.kernel_radius();
  const int ksize = 2 * radius + 1;
  if (gray.height < ksize || gray.width < ksize) {
    throw InputSizeError("canny: image " + std::to_string(gray.height) + "x" +
                         std::to_string(gray.width) + " smaller than the " +
                         std::to_string(ksize) + "x" + std::to_string(ksize) + " Gaussian kernel");
  }
  const int h = gray.height;
  const int w = gray.width;
  const Field smooth = gaussian_blur(gray, params.gaussian_sigma, radius);

  Field gx(h, w), gy(h, w), mag(h, w);
  double max_mag = 0.0;
  for (int y = 0; y < h; ++y) {
    const int ym = clamp_index(y - 1, h), yp = clamp_index(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = clamp_index(x - 1, w), xp = clamp_index(x + 1, w);
      const double sx = (smooth(ym, xp) + 2.0 * smooth(y, xp) + smooth(yp, xp)) -
                        (smooth(ym, xm) + 2.0 * smooth(y, xm) + smooth(yp, xm));
      const double sy = (smooth(yp, xm) + 2.0 * smooth(yp, x) + smooth(yp, xp)) -
                        (smooth(ym, xm) + 2.0 * smooth(ym, x) + smooth(ym, xp));
      gx(y, x) = sx;
      gy(y, x) = sy;
      mag(y, x) = std::hypot(sx, sy);
      max_mag = std::max(max_mag, mag(y, x));
    }
  }
  EdgeMap out(h, w, 0);
  if (max_mag == 0.0) return out;

  // Non-maximum suppression along the quantised gradient direction. Ties
  // within a relative 1e-9 count as maxima so symmetric step edges keep both
  // sides.
  const double tie = 1e-9 * max_mag;
  Field thin(h, w, 0.0);
  auto at = [&](int y, int x) { return (y < 0 || y >= h || x < 0 || x >= w) ? 0.0 : mag(y, x); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mag(y, x);
      if (m == 0.0) continue;
      double angle = std::atan2(gy(y, x), gx(y, x)) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      int dy = 0, dx = 0;
      if (angle < 22.5 || angle >= 157.5) {
        dx = 1;
      } else if (angle < 67.5) {
        dy = 1;
        dx = 1;
      } else if (angle < 112.5) {
        dy = 1;
      } else {
        dy = 1;
        dx = -1;
      }
      if (m + tie >= at(y + dy, x + dx) && m + tie >= at(y - dy, x - dx)) thin(y, x) = m;
    }
  }

  const double high = params.high_threshold * max_mag;
  const double low = params.low_threshold * max_mag;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (thin(y, x) >= high - tie && out(y, x) == 0) {
        out(y, x) = 255;
        stack.emplace_back(y, x);
      }
    }
  }
  while (!stack.empty()) {
    const auto [y, x] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int ny = y + dy, nx = x + dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w || out(ny, nx) != 0) continue;
        if (thin(ny, nx) > 0.0 && thin(ny, nx) >= low - tie) {
          out(ny, nx) = 255;
          stack.emplace_back(ny, nx);
        }
      }
    }
  }
  return out;
}

std::vector<EdgeMap> extract_edge_gt(const LabelMap& labels, int num_classes,
                                     const CannyParams& params, EdgeMode mode) {
  std::vector<EdgeMap> stack;
  EdgeMap merged(labels.height, labels.width, 0);
  for (int c = 0; c < num_classes; ++c) {
    GrayImage mask(labels.height, labels.width, 0.0f);
    bool present = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels.values[i] == c) {
        mask.values[i] = 1.0f;
        present = true;
      }
    }
    // A constant mask yields no edges but still validates the input size.
    EdgeMap e = present ? canny(mask, params) : canny(GrayImage(labels.height, labels.width), params);
    if (mode == EdgeMode::kUnion) {
      for (std::size_t i = 0; i < e.size(); ++i) merged.values[i] |= e.values[i];
    } else {
      stack.push_back(std::move(e));
    }
  }
  if (mode == EdgeMode::kUnion) stack.push_back(std::move(merged));
  return stack;
}

EdgeMap edge_union(const LabelMap& labels, int num_classes, const CannyParams& params) {
  return std::move(extract_edge_gt(labels, num_classes, params, EdgeMode::kUnion).front());
}

EdgeMap dilate(const EdgeMap& edges, int radius) {
  EdgeMap out(edges.height, edges.width, 0);
  for (int y = 0; y < edges.height; ++y) {
    for (int x = 0; x < edges.width; ++x) {
      if (edges(y, x) == 0) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int ny = y + dy, nx = x + dx;
          if (ny >= 0 && ny < edges.height && nx >= 0 && nx < edges.width) out(ny, nx) = 255;
        }
      }
    }
  }
  return out;
}

}  // namespace edgeuda::edges
