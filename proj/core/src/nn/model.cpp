#include "edgeuda/nn/model.hpp"

#include <string>

#include "edgeuda/error.hpp"
#include "edgeuda/nn/ops.hpp"

namespace edgeuda::nn {

void ArchConfig::validate() const {
  if (encoder_channels.size() != 4) throw ConfigError("arch.encoder_channels needs 4 entries");
  if (disc_channels.size() != 3) throw ConfigError("arch.disc_channels needs 3 entries");
  for (int c : encoder_channels) {
    if (c <= 0) throw ConfigError("arch.encoder_channels must be positive");
  }
  for (int c : disc_channels) {
    if (c <= 0) throw ConfigError("arch.disc_channels must be positive");
  }
  if (decoder_channels <= 0 || head_channels <= 0) {
    throw ConfigError("arch decoder/head widths must be positive");
  }
  if (depth_bins < 2) throw ConfigError("arch.depth_bins must be at least 2");
  if (disc_leaky_slope < 0.0) throw ConfigError("arch.disc_leaky_slope must be >= 0");
}

SegmentationModel::SegmentationModel(const ArchConfig& arch, int num_classes, DepthBinSpec bins)
    : arch_(arch), num_classes_(num_classes), bins_(std::move(bins)) {
  arch_.validate();
  if (num_classes_ < 2) throw ConfigError("model needs at least 2 classes");
  if (bins_.bins() != arch_.depth_bins) {
    throw ConfigError("depth bin spec does not match arch.depth_bins");
  }

  int in = 3;
  for (std::size_t i = 0; i < arch_.encoder_channels.size(); ++i) {
    const int out = arch_.encoder_channels[i];
    encoder_.push_back(add_conv(layout_, "backbone.enc" + std::to_string(i), in, out, 3, 2, 1));
    in = out;
  }
  const int dec = arch_.decoder_channels;
  decoder_up_ = add_conv(layout_, "backbone.dec_up", in, dec, 3, 1, 1);
  decoder_fuse_ =
      add_conv(layout_, "backbone.dec_fuse", dec + arch_.encoder_channels[2], dec, 3, 1, 1);

  auto make_head = [&](const std::string& name, int out_channels) {
    Head h;
    h.hidden = add_conv(layout_, name + ".hidden", dec, arch_.head_channels, 3, 1, 1);
    h.out = add_conv(layout_, name + ".out", arch_.head_channels, out_channels, 1, 1, 0);
    return h;
  };
  sem_ = make_head("head_sem", num_classes_);
  depth_ = make_head("head_depth", arch_.depth_bins);
  edge_ = make_head("head_edge", 1);
  ref_ = make_head("head_ref", num_classes_);
}

ParamSet SegmentationModel::init(std::uint64_t seed, bool zero_final_layers) const {
  ParamSet params = layout_;
  std::mt19937_64 rng(seed);
  for (const auto& layer : encoder_) init_normal(params, layer, he_stddev(params, layer), rng);
  for (const auto* layer : {&decoder_up_, &decoder_fuse_}) {
    init_normal(params, *layer, he_stddev(params, *layer), rng);
  }
  for (const auto* h : {&sem_, &depth_, &edge_, &ref_}) {
    init_normal(params, h->hidden, he_stddev(params, h->hidden), rng);
    init_normal(params, h->out, zero_final_layers ? 0.0 : 0.01, rng);
  }
  return params;
}

Var SegmentationModel::head(const Head& h, const ParamVars& params, const Var& features) const {
  return apply(h.out, params, relu(apply(h.hidden, params, features)));
}

ModelOutputs SegmentationModel::forward(const ParamVars& params, const Var& images) const {
  const Shape s = images.shape();
  if (s.c != 3) throw ShapeError("model_forward: expected 3 input channels, got " + s.str());
  if (s.h % kTotalStride != 0 || s.w % kTotalStride != 0) {
    throw ShapeError("model_forward: input " + std::to_string(s.h) + "x" + std::to_string(s.w) +
                     " not divisible by " + std::to_string(kTotalStride));
  }
  if (params.size() != layout_.size()) throw ShapeError("model_forward: parameter count");

  Var f = images;
  Var skip;
  for (std::size_t i = 0; i < encoder_.size(); ++i) {
    f = relu(apply(encoder_[i], params, f));
    if (i == 2) skip = f;
  }
  const int fh = s.h / kFeatureStride;
  const int fw = s.w / kFeatureStride;
  f = relu(apply(decoder_up_, params, resize_bilinear(f, fh, fw)));
  f = relu(apply(decoder_fuse_, params, concat_channels({f, skip})));

  ModelOutputs out;
  out.sem_logits = resize_bilinear(head(sem_, params, f), s.h, s.w);
  out.depth_logits = resize_bilinear(head(depth_, params, f), s.h, s.w);
  out.edge_logit = resize_bilinear(head(edge_, params, f), s.h, s.w);
  out.sem_probs = softmax(out.sem_logits);
  out.depth_probs = softmax(out.depth_logits);
  out.depth = depth_decode(out.depth_probs, bins_);
  out.edge_prob = sigmoid(out.edge_logit);

  const Var depth_weight =
      log_normalize_depth(avg_pool(out.depth, kFeatureStride), bins_.z_min(), bins_.z_max());
  out.ref_logits =
      resize_bilinear(head(ref_, params, multiply_channelwise(f, depth_weight)), s.h, s.w);
  out.ref_probs = softmax(out.ref_logits);
  return out;
}

ModelOutputs SegmentationModel::forward(const ParamSet& params, const Tensor& images) const {
  return forward(ParamVars(params, false), Var::constant(images));
}

Discriminator::Discriminator(int in_channels, const ArchConfig& arch)
    : in_channels_(in_channels), slope_(arch.disc_leaky_slope) {
  arch.validate();
  if (in_channels <= 0) throw ConfigError("discriminator needs a positive input width");
  int in = in_channels;
  for (std::size_t i = 0; i < 4; ++i) {
    const int out = i < 3 ? arch.disc_channels[i] : 1;
    layers_.push_back(add_conv(layout_, "disc.conv" + std::to_string(i), in, out, 4, 2, 1));
    in = out;
  }
}

ParamSet Discriminator::init(std::uint64_t seed) const {
  ParamSet params = layout_;
  std::mt19937_64 rng(seed);
  for (const auto& layer : layers_) init_normal(params, layer, 0.02, rng);
  return params;
}

Var Discriminator::logits(const ParamVars& params, const Var& unified) const {
  const Shape s = unified.shape();
  if (s.c != in_channels_) {
    throw ShapeError("discriminator: expected " + std::to_string(in_channels_) +
                     " input channels, got " + std::to_string(s.c));
  }
  if (s.h % kTotalStride != 0 || s.w % kTotalStride != 0) {
    throw ShapeError("discriminator: input " + s.str() + " not divisible by 16");
  }
  Var x = unified;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = apply(layers_[i], params, x);
    if (i + 1 < layers_.size()) x = leaky_relu(x, slope_);
  }
  return x;
}

Tensor Discriminator::forward(const ParamSet& params, const Tensor& unified) const {
  return sigmoid(logits(ParamVars(params, false), Var::constant(unified)).value());
}

}  // namespace edgeuda::nn
