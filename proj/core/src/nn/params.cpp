#include "edgeuda/nn/params.hpp"

#include <algorithm>
#include <cmath>

#include "edgeuda/error.hpp"
#include "edgeuda/nn/ops.hpp"

namespace edgeuda::nn {

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

std::size_t ParamSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ConfigError("unknown parameter '" + name + "'");
}

std::size_t ParamSet::add(std::string name, Tensor value) {
  names.push_back(std::move(name));
  tensors.push_back(std::move(value));
  return tensors.size() - 1;
}

bool ParamSet::all_finite() const {
  for (const auto& t : tensors) {
    if (!t.all_finite()) return false;
  }
  return true;
}

bool operator==(const ParamSet& a, const ParamSet& b) {
  if (a.names != b.names) return false;
  for (std::size_t i = 0; i < a.tensors.size(); ++i) {
    if (!(a.tensors[i].shape() == b.tensors[i].shape())) return false;
    if (!std::equal(a.tensors[i].values().begin(), a.tensors[i].values().end(),
                    b.tensors[i].values().begin())) {
      return false;
    }
  }
  return true;
}

ParamVars::ParamVars(const ParamSet& params, bool requires_grad) {
  vars_.reserve(params.size());
  for (const auto& t : params.tensors) {
    vars_.push_back(requires_grad ? Var::parameter(t) : Var::constant(t));
  }
}

std::vector<Tensor> ParamVars::grads() const {
  std::vector<Tensor> out;
  out.reserve(vars_.size());
  for (const auto& v : vars_) out.push_back(v.grad());
  return out;
}

ConvLayer add_conv(ParamSet& params, const std::string& name, int in_channels,
                   int out_channels, int kernel, int stride, int pad) {
  ConvLayer layer;
  layer.weight = params.add(name + ".weight", Tensor({out_channels, in_channels, kernel, kernel}));
  layer.bias = params.add(name + ".bias", Tensor({1, out_channels, 1, 1}));
  layer.stride = stride;
  layer.pad = pad;
  return layer;
}

Var apply(const ConvLayer& layer, const ParamVars& params, const Var& x) {
  return conv2d(x, params[layer.weight], params[layer.bias], layer.stride, layer.pad);
}

void init_normal(ParamSet& params, const ConvLayer& layer, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : params.tensors[layer.weight].values()) v = stddev > 0.0 ? dist(rng) : 0.0;
  params.tensors[layer.bias].fill(0.0);
}

double he_stddev(const ParamSet& params, const ConvLayer& layer) {
  const Shape s = params.tensors[layer.weight].shape();
  return std::sqrt(2.0 / static_cast<double>(s.c * s.h * s.w));
}

}  // namespace edgeuda::nn
