#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edgeuda/nn/autograd.hpp"
#include "edgeuda/tensor.hpp"

namespace edgeuda::nn {

// Ordered, named parameter tensors of one network.
struct ParamSet {
  std::vector<std::string> names;
  std::vector<Tensor> tensors;

  std::size_t size() const noexcept { return tensors.size(); }
  std::size_t scalar_count() const;
  std::size_t index_of(const std::string& name) const;  // throws ConfigError
  std::size_t add(std::string name, Tensor value);
  bool all_finite() const;
  friend bool operator==(const ParamSet&, const ParamSet&);
};

// Graph leaves for one forward pass over a ParamSet.
class ParamVars {
 public:
  ParamVars(const ParamSet& params, bool requires_grad);
  const Var& operator[](std::size_t i) const { return vars_[i]; }
  std::size_t size() const noexcept { return vars_.size(); }
  // Gradients in ParamSet order; zero tensors for untouched leaves.
  std::vector<Tensor> grads() const;

 private:
  std::vector<Var> vars_;
};

using Gradients = std::vector<Tensor>;

// Layer of a network: indices of its weight and bias in the owning ParamSet.
struct ConvLayer {
  std::size_t weight = 0;
  std::size_t bias = 0;
  int stride = 1;
  int pad = 0;
};

ConvLayer add_conv(ParamSet& params, const std::string& name, int in_channels,
                   int out_channels, int kernel, int stride, int pad);

Var apply(const ConvLayer& layer, const ParamVars& params, const Var& x);

// Fills weights with N(0, stddev^2) and zeroes biases.
void init_normal(ParamSet& params, const ConvLayer& layer, double stddev, std::mt19937_64& rng);
// sqrt(2 / fan_in).
double he_stddev(const ParamSet& params, const ConvLayer& layer);

}  // namespace edgeuda::nn
