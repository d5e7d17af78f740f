#include "edgeuda/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "edgeuda/error.hpp"
#include "edgeuda/parallel.hpp"

namespace edgeuda::nn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

// Gradient buffer of input `i`, or nullptr when that input is a constant.
Tensor* input_grad(Node& node, std::size_t i) {
  Node& in = *node.inputs[i];
  return in.requires_grad ? &in.grad_buffer() : nullptr;
}

const Tensor& input_value(const Node& node, std::size_t i) { return node.inputs[i]->value; }

Tensor scalar(double v) { return Tensor({1, 1, 1, 1}, v); }

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

struct ConvGeometry {
  int cin, h, w, k, stride, pad, ho, wo;
  int rows() const { return cin * k * k; }
  int cols() const { return ho * wo; }
  bool is_pointwise() const { return k == 1 && stride == 1 && pad == 0; }
};

void im2col(const double* x, const ConvGeometry& g, double* cols) {
  const int p = g.cols();
  for (int ci = 0; ci < g.cin; ++ci) {
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        double* row = cols + static_cast<std::size_t>((ci * g.k + ky) * g.k + kx) * p;
        for (int oy = 0; oy < g.ho; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          double* dst = row + oy * g.wo;
          if (iy < 0 || iy >= g.h) {
            std::fill(dst, dst + g.wo, 0.0);
            continue;
          }
          const double* src = x + (static_cast<std::size_t>(ci) * g.h + iy) * g.w;
          for (int ox = 0; ox < g.wo; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            dst[ox] = (ix >= 0 && ix < g.w) ? src[ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im_add(const double* cols, const ConvGeometry& g, double* dx) {
  const int p = g.cols();
  for (int ci = 0; ci < g.cin; ++ci) {
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        const double* row = cols + static_cast<std::size_t>((ci * g.k + ky) * g.k + kx) * p;
        for (int oy = 0; oy < g.ho; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.h) continue;
          double* dst = dx + (static_cast<std::size_t>(ci) * g.h + iy) * g.w;
          const double* src = row + oy * g.wo;
          for (int ox = 0; ox < g.wo; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            if (ix >= 0 && ix < g.w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

// Per-axis interpolation table for half-pixel bilinear resampling.
struct Lerp {
  std::vector<int> lo, hi;
  std::vector<double> w_lo, w_hi;
};

Lerp lerp_table(int in, int out) {
  Lerp t;
  t.lo.resize(out);
  t.hi.resize(out);
  t.w_lo.resize(out);
  t.w_hi.resize(out);
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double src = std::max(0.0, (i + 0.5) * scale - 0.5);
    const int lo = std::min(static_cast<int>(src), in - 1);
    const int hi = std::min(lo + 1, in - 1);
    const double frac = src - lo;
    t.lo[i] = lo;
    t.hi[i] = hi;
    t.w_hi[i] = frac;
    t.w_lo[i] = 1.0 - frac;
  }
  return t;
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad) {
  const Shape xs = x.shape();
  const Shape ws = weight.shape();
  if (ws.c != xs.c) {
    throw ShapeError("conv2d: input has " + std::to_string(xs.c) + " channels, weight expects " +
                     std::to_string(ws.c));
  }
  if (ws.h != ws.w) throw ShapeError("conv2d: kernels must be square");
  if (bias.shape() != Shape{1, ws.n, 1, 1}) throw ShapeError("conv2d: bias shape");
  ConvGeometry g{xs.c, xs.h, xs.w, ws.h, stride, pad, 0, 0};
  g.ho = (xs.h + 2 * pad - g.k) / stride + 1;
  g.wo = (xs.w + 2 * pad - g.k) / stride + 1;
  if (g.ho <= 0 || g.wo <= 0) throw ShapeError("conv2d: input smaller than kernel");
  const int cout = ws.n;

  Tensor out({xs.n, cout, g.ho, g.wo});
  const ConstMatMap w(weight.value().data(), cout, g.rows());
  const Eigen::Map<const Eigen::VectorXd> b(bias.value().data(), cout);
  parallel_for(xs.n, [&](std::size_t n) {
    std::vector<double> scratch;
    const double* cols = x.value().sample(static_cast<int>(n));
    if (!g.is_pointwise()) {
      scratch.resize(static_cast<std::size_t>(g.rows()) * g.cols());
      im2col(cols, g, scratch.data());
      cols = scratch.data();
    }
    MatMap o(out.sample(static_cast<int>(n)), cout, g.cols());
    o.noalias() = w * ConstMatMap(cols, g.rows(), g.cols());
    o.colwise() += b;
  });

  return Var::make(std::move(out), {x, weight, bias}, [g, cout](Node& node) {
    const Tensor& xv = input_value(node, 0);
    const Tensor& wv = input_value(node, 1);
    Tensor* dx = input_grad(node, 0);
    Tensor* dw = input_grad(node, 1);
    Tensor* db = input_grad(node, 2);
    const int batch = xv.n();
    const std::size_t wsize = static_cast<std::size_t>(cout) * g.rows();
    std::vector<double> dw_per_sample(dw ? wsize * batch : 0);
    std::vector<double> db_per_sample(db ? static_cast<std::size_t>(cout) * batch : 0);
    const ConstMatMap w(wv.data(), cout, g.rows());

    parallel_for(batch, [&](std::size_t n) {
      const ConstMatMap go(node.grad.sample(static_cast<int>(n)), cout, g.cols());
      std::vector<double> scratch;
      const double* cols = xv.sample(static_cast<int>(n));
      if (dw && !g.is_pointwise()) {
        scratch.resize(static_cast<std::size_t>(g.rows()) * g.cols());
        im2col(cols, g, scratch.data());
        cols = scratch.data();
      }
      if (dw) {
        MatMap dwn(dw_per_sample.data() + n * wsize, cout, g.rows());
        dwn.noalias() = go * ConstMatMap(cols, g.rows(), g.cols()).transpose();
      }
      if (db) {
        Eigen::Map<Eigen::VectorXd> dbn(db_per_sample.data() + n * cout, cout);
        dbn = go.rowwise().sum();
      }
      if (dx) {
        double* dxn = dx->sample(static_cast<int>(n));
        if (g.is_pointwise()) {
          MatMap(dxn, g.rows(), g.cols()).noalias() += w.transpose() * go;
        } else {
          std::vector<double> dcols(static_cast<std::size_t>(g.rows()) * g.cols());
          MatMap(dcols.data(), g.rows(), g.cols()).noalias() = w.transpose() * go;
          col2im_add(dcols.data(), g, dxn);
        }
      }
    });

    // Reduce per-sample contributions in sample order.
    for (int n = 0; n < batch; ++n) {
      if (dw) {
        const double* src = dw_per_sample.data() + n * wsize;
        for (std::size_t i = 0; i < wsize; ++i) (*dw)[i] += src[i];
      }
      if (db) {
        const double* src = db_per_sample.data() + static_cast<std::size_t>(n) * cout;
        for (int i = 0; i < cout; ++i) (*db)[i] += src[i];
      }
    }
  });
}

Var relu(const Var& x) { return leaky_relu(x, 0.0); }

Var leaky_relu(const Var& x, double slope) {
  Tensor out(x.shape());
  const Tensor& v = x.value();
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : slope * v[i];
  return Var::make(std::move(out), {x}, [slope](Node& node) {
    const Tensor& v = input_value(node, 0);
    Tensor& dx = *input_grad(node, 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      dx[i] += v[i] > 0.0 ? node.grad[i] : slope * node.grad[i];
    }
  });
}

Tensor resize_bilinear(const Tensor& x, int out_h, int out_w) {
  const Shape s = x.shape();
  const Lerp ty = lerp_table(s.h, out_h);
  const Lerp tx = lerp_table(s.w, out_w);
  Tensor out({s.n, s.c, out_h, out_w});
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* in = x.channel(n, c);
      double* o = out.channel(n, c);
      for (int y = 0; y < out_h; ++y) {
        const double* r0 = in + static_cast<std::size_t>(ty.lo[y]) * s.w;
        const double* r1 = in + static_cast<std::size_t>(ty.hi[y]) * s.w;
        for (int xo = 0; xo < out_w; ++xo) {
          const double top = tx.w_lo[xo] * r0[tx.lo[xo]] + tx.w_hi[xo] * r0[tx.hi[xo]];
          const double bot = tx.w_lo[xo] * r1[tx.lo[xo]] + tx.w_hi[xo] * r1[tx.hi[xo]];
          o[static_cast<std::size_t>(y) * out_w + xo] = ty.w_lo[y] * top + ty.w_hi[y] * bot;
        }
      }
    }
  }
  return out;
}

Var resize_bilinear(const Var& x, int out_h, int out_w) {
  const Shape s = x.shape();
  if (s.h == out_h && s.w == out_w) return x;
  return Var::make(resize_bilinear(x.value(), out_h, out_w), {x},
                   [s, out_h, out_w](Node& node) {
                     const Lerp ty = lerp_table(s.h, out_h);
                     const Lerp tx = lerp_table(s.w, out_w);
                     Tensor& dx = *input_grad(node, 0);
                     for (int n = 0; n < s.n; ++n) {
                       for (int c = 0; c < s.c; ++c) {
                         double* d = dx.channel(n, c);
                         const double* g = node.grad.channel(n, c);
                         for (int y = 0; y < out_h; ++y) {
                           double* r0 = d + static_cast<std::size_t>(ty.lo[y]) * s.w;
                           double* r1 = d + static_cast<std::size_t>(ty.hi[y]) * s.w;
                           for (int xo = 0; xo < out_w; ++xo) {
                             const double gv = g[static_cast<std::size_t>(y) * out_w + xo];
                             const double top = ty.w_lo[y] * gv;
                             const double bot = ty.w_hi[y] * gv;
                             r0[tx.lo[xo]] += tx.w_lo[xo] * top;
                             r0[tx.hi[xo]] += tx.w_hi[xo] * top;
                             r1[tx.lo[xo]] += tx.w_lo[xo] * bot;
                             r1[tx.hi[xo]] += tx.w_hi[xo] * bot;
                           }
                         }
                       }
                     }
                   });
}

Var avg_pool(const Var& x, int factor) {
  const Shape s = x.shape();
  if (factor < 1 || s.h % factor != 0 || s.w % factor != 0) {
    throw ShapeError("avg_pool: " + s.str() + " not divisible by " + std::to_string(factor));
  }
  const int oh = s.h / factor;
  const int ow = s.w / factor;
  const double inv = 1.0 / (factor * factor);
  Tensor out({s.n, s.c, oh, ow});
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const double* in = x.value().channel(n, c);
      double* o = out.channel(n, c);
      for (int y = 0; y < s.h; ++y) {
        for (int xi = 0; xi < s.w; ++xi) {
          o[(y / factor) * ow + xi / factor] += in[static_cast<std::size_t>(y) * s.w + xi] * inv;
        }
      }
    }
  }
  return Var::make(std::move(out), {x}, [s, factor, ow, inv](Node& node) {
    Tensor& dx = *input_grad(node, 0);
    for (int n = 0; n < s.n; ++n) {
      for (int c = 0; c < s.c; ++c) {
        double* d = dx.channel(n, c);
        const double* g = node.grad.channel(n, c);
        for (int y = 0; y < s.h; ++y) {
          for (int xi = 0; xi < s.w; ++xi) {
            d[static_cast<std::size_t>(y) * s.w + xi] += g[(y / factor) * ow + xi / factor] * inv;
          }
        }
      }
    }
  });
}

Var concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no inputs");
  const Shape first = parts.front().shape();
  int channels = 0;
  for (const auto& p : parts) {
    const Shape s = p.shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ShapeError("concat_channels: spatial mismatch " + s.str() + " vs " + first.str());
    }
    channels += s.c;
  }
  Tensor out({first.n, channels, first.h, first.w});
  for (int n = 0; n < first.n; ++n) {
    double* dst = out.sample(n);
    for (const auto& p : parts) {
      const std::size_t len = p.shape().sample();
      std::copy_n(p.value().sample(n), len, dst);
      dst += len;
    }
  }
  return Var::make(std::move(out), parts, [](Node& node) {
    const int batch = node.value.n();
    for (int n = 0; n < batch; ++n) {
      const double* src = node.grad.sample(n);
      for (std::size_t i = 0; i < node.inputs.size(); ++i) {
        const std::size_t len = node.inputs[i]->value.shape().sample();
        if (Tensor* d = input_grad(node, i)) {
          double* dst = d->sample(n);
          for (std::size_t j = 0; j < len; ++j) dst[j] += src[j];
        }
        src += len;
      }
    }
  });
}

Var multiply_channelwise(const Var& x, const Var& map) {
  const Shape s = x.shape();
  const Shape ms = map.shape();
  if (ms.n != s.n || ms.c != 1 || ms.h != s.h || ms.w != s.w) {
    throw ShapeError("multiply_channelwise: map " + ms.str() + " vs input " + s.str());
  }
  Tensor out(s);
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    const double* m = map.value().sample(n);
    for (int c = 0; c < s.c; ++c) {
      const double* in = x.value().channel(n, c);
      double* o = out.channel(n, c);
      for (std::size_t i = 0; i < plane; ++i) o[i] = in[i] * m[i];
    }
  }
  return Var::make(std::move(out), {x, map}, [s, plane](Node& node) {
    const Tensor& xv = input_value(node, 0);
    const Tensor& mv = input_value(node, 1);
    Tensor* dx = input_grad(node, 0);
    Tensor* dm = input_grad(node, 1);
    for (int n = 0; n < s.n; ++n) {
      const double* m = mv.sample(n);
      for (int c = 0; c < s.c; ++c) {
        const double* g = node.grad.channel(n, c);
        if (dx) {
          double* d = dx->channel(n, c);
          for (std::size_t i = 0; i < plane; ++i) d[i] += g[i] * m[i];
        }
        if (dm) {
          const double* in = xv.channel(n, c);
          double* d = dm->sample(n);
          for (std::size_t i = 0; i < plane; ++i) d[i] += g[i] * in[i];
        }
      }
    }
  });
}

Var softmax(const Var& logits) {
  return Var::make(softmax(logits.value()), {logits}, [](Node& node) {
    const Shape s = node.value.shape();
    const std::size_t plane = s.plane();
    Tensor& dx = *input_grad(node, 0);
    for (int n = 0; n < s.n; ++n) {
      const double* p = node.value.sample(n);
      const double* g = node.grad.sample(n);
      double* d = dx.sample(n);
      for (std::size_t i = 0; i < plane; ++i) {
        double dot = 0.0;
        for (int c = 0; c < s.c; ++c) dot += p[c * plane + i] * g[c * plane + i];
        for (int c = 0; c < s.c; ++c) {
          d[c * plane + i] += p[c * plane + i] * (g[c * plane + i] - dot);
        }
      }
    }
  });
}

Var sigmoid(const Var& x) {
  return Var::make(sigmoid(x.value()), {x}, [](Node& node) {
    Tensor& dx = *input_grad(node, 0);
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const double s = node.value[i];
      dx[i] += s * (1.0 - s) * node.grad[i];
    }
  });
}

Var entropy(const Var& probs) {
  return Var::make(entropy_map(probs.value()), {probs}, [](Node& node) {
    const Tensor& p = input_value(node, 0);
    Tensor& dx = *input_grad(node, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = p[i] > kLogEpsilon ? -std::log(p[i]) - 1.0 : -std::log(kLogEpsilon);
      dx[i] += d * node.grad[i];
    }
  });
}

Var depth_decode(const Var& bin_probs, const DepthBinSpec& spec) {
  return Var::make(depth_decode(bin_probs.value(), spec), {bin_probs},
                   [centers = spec.centers](Node& node) {
                     Tensor& dx = *input_grad(node, 0);
                     const Shape s = dx.shape();
                     const std::size_t plane = s.plane();
                     for (int n = 0; n < s.n; ++n) {
                       const double* g = node.grad.sample(n);
                       double* d = dx.sample(n);
                       for (int k = 0; k < s.c; ++k) {
                         for (std::size_t i = 0; i < plane; ++i) d[k * plane + i] += centers[k] * g[i];
                       }
                     }
                   });
}

Var log_normalize_depth(const Var& depth, double z_min, double z_max) {
  const double lo = std::log(z_min);
  const double span = std::log(z_max) - lo;
  Tensor out(depth.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (std::log(depth.value()[i]) - lo) / span;
  return Var::make(std::move(out), {depth}, [span](Node& node) {
    const Tensor& z = input_value(node, 0);
    Tensor& dx = *input_grad(node, 0);
    for (std::size_t i = 0; i < z.size(); ++i) dx[i] += node.grad[i] / (z[i] * span);
  });
}

Var cross_entropy(const Var& probs, const Tensor& labels, int ignore_index) {
  const double loss = cross_entropy_loss(probs.value(), labels, ignore_index);
  return Var::make(scalar(loss), {probs}, [labels, ignore_index](Node& node) {
    const Tensor& p = input_value(node, 0);
    Tensor& dx = *input_grad(node, 0);
    const Shape s = p.shape();
    const std::size_t plane = s.plane();
    std::size_t counted = 0;
    for (double y : labels.values()) counted += static_cast<int>(y) != ignore_index;
    const double scale = node.grad[0] / static_cast<double>(counted);
    for (int n = 0; n < s.n; ++n) {
      const double* y = labels.sample(n);
      for (std::size_t i = 0; i < plane; ++i) {
        const int cls = static_cast<int>(y[i]);
        if (cls == ignore_index) continue;
        const double pv = p.sample(n)[cls * plane + i];
        if (pv > kLogEpsilon) dx.sample(n)[cls * plane + i] -= scale / pv;
      }
    }
  });
}

Var berhu(const Var& pred, const Tensor& target) {
  const double loss = berhu_loss(pred.value(), target);
  return Var::make(scalar(loss), {pred}, [target](Node& node) {
    const Tensor& p = input_value(node, 0);
    Tensor& dx = *input_grad(node, 0);
    std::size_t arg = 0;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double r = std::abs(p[i] - target[i]);
      if (r > max_abs) {
        max_abs = r;
        arg = i;
      }
    }
    if (max_abs == 0.0) return;
    const double c = kBerhuCutoffFraction * max_abs;
    const double scale = node.grad[0] / static_cast<double>(p.size());
    double dloss_dc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double r = p[i] - target[i];
      const double a = std::abs(r);
      if (a <= c) {
        dx[i] += scale * (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0));
      } else {
        dx[i] += scale * r / c;
        dloss_dc += (c * c - r * r) / (2.0 * c * c);
      }
    }
    // The cutoff itself moves with the largest residual.
    const double r_arg = p[arg] - target[arg];
    dx[arg] += scale * dloss_dc * kBerhuCutoffFraction * (r_arg > 0.0 ? 1.0 : -1.0);
  });
}

Var bce_with_logits(const Var& logits, const Tensor& target) {
  require_same_shape(logits.shape(), target.shape(), "bce_with_logits");
  const Tensor& l = logits.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double e = target[i] / 255.0;
    acc += softplus(l[i]) - l[i] * e;
  }
  const double loss = acc / static_cast<double>(l.size());
  return Var::make(scalar(loss), {logits}, [target](Node& node) {
    const Tensor& l = input_value(node, 0);
    Tensor& dx = *input_grad(node, 0);
    const double scale = node.grad[0] / static_cast<double>(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
      dx[i] += scale * (sigmoid(l[i]) - target[i] / 255.0);
    }
  });
}

Var adversarial_d_loss_logits(const Var& src_logits, const Var& tgt_logits) {
  const Tensor& ls = src_logits.value();
  const Tensor& lt = tgt_logits.value();
  double src = 0.0;
  double tgt = 0.0;
  for (double v : ls.values()) src += softplus(-v);
  for (double v : lt.values()) tgt += softplus(v);
  const double loss = src / ls.size() + tgt / lt.size();
  return Var::make(scalar(loss), {src_logits, tgt_logits}, [](Node& node) {
    if (Tensor* d = input_grad(node, 0)) {
      const Tensor& l = input_value(node, 0);
      const double scale = node.grad[0] / static_cast<double>(l.size());
      for (std::size_t i = 0; i < l.size(); ++i) (*d)[i] += scale * (sigmoid(l[i]) - 1.0);
    }
    if (Tensor* d = input_grad(node, 1)) {
      const Tensor& l = input_value(node, 1);
      const double scale = node.grad[0] / static_cast<double>(l.size());
      for (std::size_t i = 0; i < l.size(); ++i) (*d)[i] += scale * sigmoid(l[i]);
    }
  });
}

Var adversarial_g_loss_logits(const Var& tgt_logits) {
  const Tensor& l = tgt_logits.value();
  double acc = 0.0;
  for (double v : l.values()) acc += softplus(-v);
  return Var::make(scalar(acc / l.size()), {tgt_logits}, [](Node& node) {
    const Tensor& l = input_value(node, 0);
    Tensor& d = *input_grad(node, 0);
    const double scale = node.grad[0] / static_cast<double>(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) d[i] += scale * (sigmoid(l[i]) - 1.0);
  });
}

Var weighted_sum(const std::vector<std::pair<double, Var>>& terms) {
  double total = 0.0;
  std::vector<Var> inputs;
  std::vector<double> weights;
  for (const auto& [w, t] : terms) {
    if (t.value().size() != 1) throw ShapeError("weighted_sum: terms must be scalars");
    total += w * t.value()[0];
    inputs.push_back(t);
    weights.push_back(w);
  }
  return Var::make(scalar(total), std::move(inputs), [weights](Node& node) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (Tensor* d = input_grad(node, i)) (*d)[0] += weights[i] * node.grad[0];
    }
  });
}

}  // namespace edgeuda::nn
