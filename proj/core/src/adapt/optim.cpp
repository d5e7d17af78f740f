#include "edgeuda/adapt/optim.hpp"

#include <algorithm>
#include <cmath>

#include "edgeuda/adapt/types.hpp"
#include "edgeuda/error.hpp"

namespace edgeuda::adapt {
namespace {

void check_grads(const nn::ParamSet& params, const nn::Gradients& grads) {
  if (grads.size() != params.size()) throw ShapeError("optimizer: gradient count mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    require_same_shape(params.tensors[i].shape(), grads[i].shape(), "optimizer");
  }
}

std::vector<Tensor> zeros_like(const nn::ParamSet& params) {
  std::vector<Tensor> out;
  for (const auto& t : params.tensors) out.emplace_back(t.shape());
  return out;
}

}  // namespace

void OptimSpec::validate() const {
  if (!(gen_lr > 0.0) || !(disc_lr > 0.0)) throw ConfigError("optim: learning rates must be > 0");
  if (gen_momentum < 0.0 || gen_momentum >= 1.0) throw ConfigError("optim: momentum in [0,1)");
  if (poly_power < 0.0) throw ConfigError("optim: poly_power must be >= 0");
  if (disc_beta1 < 0.0 || disc_beta1 >= 1.0 || disc_beta2 < 0.0 || disc_beta2 >= 1.0) {
    throw ConfigError("optim: Adam betas must be in [0,1)");
  }
  if (!(disc_eps > 0.0)) throw ConfigError("optim: disc_eps must be > 0");
}

void LossWeights::validate() const {
  for (double w : {seg, ref, dep, edge, adv}) {
    if (!(w >= 0.0)) throw ConfigError("weights: every loss weight must be >= 0");
  }
}

void SelfTrainConfig::validate() const {
  if (!(lambda_conf > 0.0 && lambda_conf < 1.0)) {
    throw ConfigError("selftrain: lambda_conf must be in (0,1)");
  }
  if (rounds < 1) throw ConfigError("selftrain: rounds must be >= 1");
  if (epochs_per_round < 0) throw ConfigError("selftrain: epochs_per_round must be >= 0");
}

double poly_lr(double base_lr, long step, long total, double power) {
  if (total <= 0) return base_lr;
  const double frac = std::clamp(1.0 - static_cast<double>(step) / total, 0.0, 1.0);
  return base_lr * std::pow(frac, power);
}

void SgdMomentum::step(nn::ParamSet& params, const nn::Gradients& grads, double lr) {
  check_grads(params, grads);
  if (velocity_.empty()) velocity_ = zeros_like(params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& w = params.tensors[i];
    Tensor& v = velocity_[i];
    const Tensor& g = grads[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      v[j] = momentum_ * v[j] + g[j];
      w[j] -= lr * v[j];
    }
  }
}

void Adam::step(nn::ParamSet& params, const nn::Gradients& grads, double lr) {
  check_grads(params, grads);
  if (m_.empty()) {
    m_ = zeros_like(params);
    v_ = zeros_like(params);
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& w = params.tensors[i];
    const Tensor& g = grads[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g[j];
      v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g[j] * g[j];
      const double mhat = m_[i][j] / bc1;
      const double vhat = v_[i][j] / bc2;
      w[j] -= lr * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

}  // namespace edgeuda::adapt
