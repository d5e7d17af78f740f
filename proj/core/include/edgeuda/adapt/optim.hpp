#pragma once

#include <vector>

#include "edgeuda/nn/params.hpp"

namespace edgeuda::adapt {

// lr0 * (1 - step / total)^power, clamped at zero; lr0 when total == 0.
double poly_lr(double base_lr, long step, long total, double power);

// PyTorch-style momentum SGD: v <- mu v + g; w <- w - lr v.
class SgdMomentum {
 public:
  explicit SgdMomentum(double momentum) : momentum_(momentum) {}
  void step(nn::ParamSet& params, const nn::Gradients& grads, double lr);

 private:
  double momentum_;
  std::vector<Tensor> velocity_;
};

class Adam {
 public:
  Adam(double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(nn::ParamSet& params, const nn::Gradients& grads, double lr);

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace edgeuda::adapt
