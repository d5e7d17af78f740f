#include "edgeuda/nn/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgeuda/error.hpp"

namespace edgeuda::nn {
namespace {

double clamp_prob(double p) { return std::clamp(p, kLogEpsilon, 1.0 - kLogEpsilon); }

double mean_of(const Tensor& t, double (*f)(double)) {
  double acc = 0.0;
  for (double v : t.values()) acc += f(v);
  return acc / static_cast<double>(t.size());
}

}  // namespace

Tensor softmax(const Tensor& logits) {
  const Shape s = logits.shape();
  Tensor out(s);
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    const double* in = logits.sample(n);
    double* o = out.sample(n);
    for (std::size_t i = 0; i < plane; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < s.c; ++c) {
        const double v = in[c * plane + i];
        if (std::isnan(v)) throw NumericError("softmax: NaN logit");
        mx = std::max(mx, v);
      }
      double z = 0.0;
      for (int c = 0; c < s.c; ++c) {
        const double e = std::exp(in[c * plane + i] - mx);
        o[c * plane + i] = e;
        z += e;
      }
      for (int c = 0; c < s.c; ++c) o[c * plane + i] /= z;
    }
  }
  return out;
}

double entropy_term(double p) {
  if (p <= 0.0) return 0.0;
  return -p * std::log(std::max(p, kLogEpsilon));
}

Tensor entropy_map(const Tensor& probs) {
  Tensor out(probs.shape());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = entropy_term(probs[i]);
  return out;
}

double cross_entropy_loss(const Tensor& probs, const Tensor& labels, int ignore_index) {
  const Shape s = probs.shape();
  const Shape ls = labels.shape();
  if (ls.n != s.n || ls.c != 1 || ls.h != s.h || ls.w != s.w) {
    throw ShapeError("cross_entropy_loss: labels " + ls.str() + " vs probs " + s.str());
  }
  const std::size_t plane = s.plane();
  double acc = 0.0;
  std::size_t counted = 0;
  for (int n = 0; n < s.n; ++n) {
    const double* y = labels.sample(n);
    const double* p = probs.sample(n);
    for (std::size_t i = 0; i < plane; ++i) {
      const int cls = static_cast<int>(y[i]);
      if (cls == ignore_index) continue;
      if (cls < 0 || cls >= s.c) {
        throw DomainError("cross_entropy_loss: label " + std::to_string(cls) + " out of range");
      }
      acc -= std::log(std::max(p[cls * plane + i], kLogEpsilon));
      ++counted;
    }
  }
  if (counted == 0) throw EmptyTargetError("cross_entropy_loss: every pixel is ignored");
  return acc / static_cast<double>(counted);
}

double berhu_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred.shape(), target.shape(), "berhu_loss");
  double max_abs = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(pred[i] - target[i]));
  }
  if (max_abs == 0.0) return 0.0;
  const double c = kBerhuCutoffFraction * max_abs;
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = std::abs(pred[i] - target[i]);
    acc += r <= c ? r : (r * r + c * c) / (2.0 * c);
  }
  return acc / static_cast<double>(pred.size());
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
  return out;
}

double bce_edge_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred.shape(), target.shape(), "bce_edge_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("bce_edge_loss: prediction outside (0,1); pass post-sigmoid values");
    }
    const double e = target[i] / 255.0;
    acc -= e * std::log(std::max(p, kLogEpsilon)) +
           (1.0 - e) * std::log(std::max(1.0 - p, kLogEpsilon));
  }
  return acc / static_cast<double>(pred.size());
}

DepthBinSpec sid_bins(double z_min, double z_max, int bins) {
  if (!(z_min > 0.0) || !(z_max > z_min)) {
    throw ConfigError("sid_bins: require 0 < z_min < z_max");
  }
  if (bins < 2) throw ConfigError("sid_bins: require at least 2 bins");
  DepthBinSpec spec;
  spec.thresholds.resize(bins + 1);
  const double log_min = std::log(z_min);
  const double log_ratio = std::log(z_max / z_min);
  for (int i = 0; i <= bins; ++i) {
    spec.thresholds[i] = std::exp(log_min + (static_cast<double>(i) / bins) * log_ratio);
  }
  // Pin the endpoints so they survive the exp/log round trip exactly.
  spec.thresholds.front() = z_min;
  spec.thresholds.back() = z_max;
  spec.centers.resize(bins);
  for (int i = 0; i < bins; ++i) {
    spec.centers[i] = std::sqrt(spec.thresholds[i] * spec.thresholds[i + 1]);
  }
  return spec;
}

Tensor depth_decode(const Tensor& bin_probs, const DepthBinSpec& spec) {
  const Shape s = bin_probs.shape();
  if (s.c != spec.bins()) {
    throw ShapeError("depth_decode: " + std::to_string(s.c) + " channels for " +
                     std::to_string(spec.bins()) + " bins");
  }
  Tensor out({s.n, 1, s.h, s.w});
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    const double* p = bin_probs.sample(n);
    double* z = out.sample(n);
    for (std::size_t i = 0; i < plane; ++i) {
      double acc = 0.0;
      for (int k = 0; k < s.c; ++k) acc += p[k * plane + i] * spec.centers[k];
      z[i] = std::clamp(acc, spec.z_min(), spec.z_max());
    }
  }
  return out;
}

double adversarial_d_loss(const Tensor& score_src, const Tensor& score_tgt) {
  const double src = mean_of(score_src, [](double s) { return -std::log(clamp_prob(s)); });
  const double tgt =
      mean_of(score_tgt, [](double s) { return -std::log(1.0 - clamp_prob(s)); });
  return src + tgt;
}

double adversarial_g_loss(const Tensor& score_tgt) {
  return mean_of(score_tgt, [](double s) { return -std::log(clamp_prob(s)); });
}

}  // namespace edgeuda::nn
