#pragma once

// Scalar-loop reference implementations written independently of the
// library, used to cross-check the vectorised tensor code.

#include <algorithm>
#include <cmath>
#include <vector>

#include "edgeuda/tensor.hpp"

namespace edgeuda::oracle {

inline double xlogx_neg(double p) { return p <= 0.0 ? 0.0 : -p * std::log(p); }
inline double safe_log(double p) { return std::log(std::max(p, 1e-12)); }

inline Tensor softmax(const Tensor& x) {
  Tensor out(x.shape());
  for (int n = 0; n < x.n(); ++n) {
    for (int h = 0; h < x.h(); ++h) {
      for (int w = 0; w < x.w(); ++w) {
        double m = -INFINITY;
        for (int c = 0; c < x.c(); ++c) m = std::max(m, x.at(n, c, h, w));
        double z = 0.0;
        for (int c = 0; c < x.c(); ++c) z += std::exp(x.at(n, c, h, w) - m);
        for (int c = 0; c < x.c(); ++c) out.at(n, c, h, w) = std::exp(x.at(n, c, h, w) - m) / z;
      }
    }
  }
  return out;
}

inline Tensor entropy(const Tensor& p) {
  Tensor out(p.shape());
  for (int n = 0; n < p.n(); ++n)
    for (int c = 0; c < p.c(); ++c)
      for (int h = 0; h < p.h(); ++h)
        for (int w = 0; w < p.w(); ++w) out.at(n, c, h, w) = xlogx_neg(p.at(n, c, h, w));
  return out;
}

inline double cross_entropy(const Tensor& p, const Tensor& y, int ignore = 255) {
  double sum = 0.0;
  long count = 0;
  for (int n = 0; n < p.n(); ++n)
    for (int h = 0; h < p.h(); ++h)
      for (int w = 0; w < p.w(); ++w) {
        const int label = static_cast<int>(y.at(n, 0, h, w));
        if (label == ignore) continue;
        sum += -safe_log(p.at(n, label, h, w));
        ++count;
      }
  return sum / static_cast<double>(count);
}

inline double berhu(const Tensor& pred, const Tensor& gt) {
  double maxr = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) maxr = std::max(maxr, std::abs(pred[i] - gt[i]));
  if (maxr == 0.0) return 0.0;
  const double c = 0.2 * maxr;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = std::abs(pred[i] - gt[i]);
    sum += r <= c ? r : (r * r + c * c) / (2.0 * c);
  }
  return sum / static_cast<double>(pred.size());
}

inline double bce(const Tensor& pred, const Tensor& gt255) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = gt255[i] / 255.0;
    sum += -(e * safe_log(pred[i]) + (1.0 - e) * safe_log(1.0 - pred[i]));
  }
  return sum / static_cast<double>(pred.size());
}

inline std::vector<double> sid_thresholds(double zmin, double zmax, int k) {
  std::vector<double> t;
  for (int i = 0; i <= k; ++i) {
    t.push_back(std::exp(std::log(zmin) + (static_cast<double>(i) / k) * std::log(zmax / zmin)));
  }
  return t;
}

inline Tensor depth_decode(const Tensor& probs, double zmin, double zmax) {
  const int k = probs.c();
  const auto t = sid_thresholds(zmin, zmax, k);
  Tensor out({probs.n(), 1, probs.h(), probs.w()});
  for (int n = 0; n < probs.n(); ++n)
    for (int h = 0; h < probs.h(); ++h)
      for (int w = 0; w < probs.w(); ++w) {
        double z = 0.0;
        for (int b = 0; b < k; ++b) z += probs.at(n, b, h, w) * std::sqrt(t[b] * t[b + 1]);
        out.at(n, 0, h, w) = std::clamp(z, zmin, zmax);
      }
  return out;
}

inline double mean_neg_log(const Tensor& s, bool complement) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = std::clamp(s[i], 1e-12, 1.0 - 1e-12);
    sum += -std::log(complement ? 1.0 - v : v);
  }
  return sum / static_cast<double>(s.size());
}

inline double adversarial_d(const Tensor& src, const Tensor& tgt) {
  return mean_neg_log(src, false) + mean_neg_log(tgt, true);
}

inline double adversarial_g(const Tensor& tgt) { return mean_neg_log(tgt, false); }

}  // namespace edgeuda::oracle
