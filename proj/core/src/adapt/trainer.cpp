#include "edgeuda/adapt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>

#include "edgeuda/adapt/optim.hpp"
#include "edgeuda/error.hpp"
#include "edgeuda/nn/ops.hpp"

namespace edgeuda::adapt {
namespace fs = std::filesystem;
using nn::Var;

namespace {

struct SupervisedTerms {
  Var seg, ref, dep, edge;
};

void require_source_batch(const SourceBatch& b) {
  if (b.labels.empty()) throw ProtocolError("source batch has no labels");
  if (b.depth.empty()) throw ProtocolError("source batch has no depth targets");
  if (b.edges.empty()) throw ProtocolError("source batch has no edge targets");
}

SupervisedTerms supervised_terms(const nn::ModelOutputs& out, const SourceBatch& b) {
  return {nn::cross_entropy(out.sem_probs, b.labels), nn::cross_entropy(out.ref_probs, b.labels),
          nn::berhu(out.depth, b.depth), nn::bce_with_logits(out.edge_logit, b.edges)};
}

std::vector<std::pair<double, Var>> weighted_terms(const SupervisedTerms& t,
                                                   const LossWeights& w) {
  return {{w.seg, t.seg}, {w.ref, t.ref}, {w.dep, t.dep}, {w.edge, t.edge}};
}

void record(LossBreakdown& l, const SupervisedTerms& t) {
  l.seg = t.seg.value()[0];
  l.ref = t.ref.value()[0];
  l.dep = t.dep.value()[0];
  l.edge = t.edge.value()[0];
}

Var unified(const nn::ModelOutputs& out, nn::AblationVariant variant) {
  return nn::concat_unified_map(nn::entropy(out.sem_probs), nn::entropy(out.depth_probs),
                                nn::entropy(out.ref_probs), out.edge_prob, variant);
}

void check_disc_width(const nn::SegmentationModel& model, const nn::Discriminator& disc,
                      nn::AblationVariant variant) {
  const int want = nn::unified_channels(variant, model.num_classes(), model.bins().bins());
  if (disc.in_channels() != want) {
    throw ConfigError("discriminator expects " + std::to_string(disc.in_channels()) +
                      " input channels but variant " + nn::to_string(variant) + " produces " +
                      std::to_string(want));
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

struct Row {
  long step = 0;
  int epoch = 0;
  std::string phase;
  std::optional<double> seg, ref, dep, edge, adv_g, adv_d, lr_gen, lr_disc, miou;
};

void write_row(std::ostream& os, const Row& r) {
  os << r.step << ',' << r.epoch << ',' << r.phase << ',' << opt(r.seg) << ',' << opt(r.ref)
     << ',' << opt(r.dep) << ',' << opt(r.edge) << ',' << opt(r.adv_g) << ',' << opt(r.adv_d)
     << ',' << opt(r.lr_gen) << ',' << opt(r.lr_disc) << ',' << opt(r.miou) << '\n';
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed, int epoch,
                                     std::uint64_t stream) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

SourceBatch make_source_batch(const LabeledSet& set, std::span<const std::size_t> idx) {
  return {images_to_tensor(set.images, idx), labels_to_tensor(set.labels, idx),
          depth_to_tensor(set.depth, idx), edges_to_tensor(set.edges, idx)};
}

void require_finite(const nn::ParamSet& p, const char* what, long step) {
  if (!p.all_finite()) {
    throw NumericError(std::string(what) + " parameters became non-finite at step " +
                       std::to_string(step));
  }
}

}  // namespace

Var supervised_objective(const nn::ModelOutputs& out, const SourceBatch& batch,
                         const LossWeights& weights, LossBreakdown& losses) {
  require_source_batch(batch);
  const SupervisedTerms t = supervised_terms(out, batch);
  const Var total = nn::weighted_sum(weighted_terms(t, weights));
  record(losses, t);
  losses.total = total.value()[0];
  return total;
}

StepResult supervised_step(const nn::SegmentationModel& model, const nn::ParamSet& params,
                           const SourceBatch& batch, const LossWeights& weights) {
  require_source_batch(batch);
  nn::ParamVars pv(params, true);
  const nn::ModelOutputs out = model.forward(pv, Var::constant(batch.images));
  StepResult r;
  nn::backward(supervised_objective(out, batch, weights, r.losses));
  r.generator = pv.grads();
  return r;
}

StepResult adversarial_step(const nn::SegmentationModel& model, const nn::ParamSet& params,
                            const nn::Discriminator& disc, const nn::ParamSet& disc_params,
                            const SourceBatch& src, const TargetBatch& tgt,
                            const LossWeights& weights, nn::AblationVariant variant) {
  require_source_batch(src);
  check_disc_width(model, disc, variant);
  StepResult r;
  Tensor src_map, tgt_map;

  if (weights.adv == 0.0) {
    r = supervised_step(model, params, src, weights);
    src_map = unified_map(model, params, src.images, variant);
    tgt_map = unified_map(model, params, tgt.images, variant);
    const Tensor scores = disc.forward(disc_params, tgt_map);
    r.losses.adv_g = nn::adversarial_g_loss(scores);
  } else {
    nn::ParamVars pv(params, true);
    const nn::ModelOutputs src_out = model.forward(pv, Var::constant(src.images));
    const SupervisedTerms t = supervised_terms(src_out, src);
    const nn::ModelOutputs tgt_out = model.forward(pv, Var::constant(tgt.images));
    const Var tgt_unified = unified(tgt_out, variant);
    const nn::ParamVars frozen(disc_params, false);
    const Var adv_g = nn::adversarial_g_loss_logits(disc.logits(frozen, tgt_unified));
    auto terms = weighted_terms(t, weights);
    terms.emplace_back(weights.adv, adv_g);
    const Var total = nn::weighted_sum(terms);
    nn::backward(total);
    record(r.losses, t);
    r.losses.adv_g = adv_g.value()[0];
    r.losses.total = total.value()[0];
    r.generator = pv.grads();
    src_map = unified(src_out, variant).value();
    tgt_map = tgt_unified.value();
  }

  nn::ParamVars dv(disc_params, true);
  const Var d_loss = nn::adversarial_d_loss_logits(disc.logits(dv, Var::constant(src_map)),
                                                   disc.logits(dv, Var::constant(tgt_map)));
  nn::backward(d_loss);
  r.losses.adv_d = d_loss.value()[0];
  r.discriminator = dv.grads();
  return r;
}

Tensor unified_map(const nn::SegmentationModel& model, const nn::ParamSet& params,
                   const Tensor& images, nn::AblationVariant variant) {
  return unified(model.forward(params, images), variant).value();
}

nn::SegmentationModel make_model(const RunConfig& cfg) {
  return nn::SegmentationModel(
      cfg.arch, cfg.num_classes(),
      nn::sid_bins(cfg.scene.depth_min, cfg.scene.depth_max, cfg.arch.depth_bins));
}

nn::Discriminator make_discriminator(const RunConfig& cfg) {
  return nn::Discriminator(
      nn::unified_channels(cfg.variant, cfg.num_classes(), cfg.arch.depth_bins), cfg.arch);
}

std::vector<LabelMap> predict_labels(const nn::SegmentationModel& model,
                                     const nn::ParamSet& params, std::span<const RgbImage> images,
                                     EvalHead head, int batch_size) {
  std::vector<LabelMap> out;
  out.reserve(images.size());
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(images.size(), start + batch_size); ++i) {
      idx.push_back(i);
    }
    const nn::ModelOutputs o = model.forward(params, images_to_tensor(images, idx));
    const Tensor& probs = (head == EvalHead::kRefined ? o.ref_probs : o.sem_probs).value();
    const Shape s = probs.shape();
    for (int n = 0; n < s.n; ++n) {
      LabelMap labels(s.h, s.w);
      for (std::size_t p = 0; p < s.plane(); ++p) {
        int best = 0;
        double best_p = probs.channel(n, 0)[p];
        for (int c = 1; c < s.c; ++c) {
          const double v = probs.channel(n, c)[p];
          if (v > best_p) {
            best_p = v;
            best = c;
          }
        }
        labels.values[p] = static_cast<std::uint8_t>(best);
      }
      out.push_back(std::move(labels));
    }
  }
  return out;
}

eval::ConfusionMatrix evaluate(const nn::SegmentationModel& model, const nn::ParamSet& params,
                               const LabeledSet& set, EvalHead head, int batch_size) {
  const auto preds = predict_labels(model, params, set.images, head, batch_size);
  return eval::confusion_matrix(preds, set.labels, model.num_classes());
}

FitResult fit(const RunConfig& cfg) {
  cfg.validate();
  const DatasetReader reader(cfg.data_dir);
  reader.check_compatible(cfg);
  const LabeledSet src = reader.source_train(cfg.canny, cfg.num_classes());
  const UnlabeledSet tgt = reader.target_train();
  const LabeledSet eval_set = reader.target_eval();
  if (src.size() == 0) throw DatasetError("no source training samples", cfg.data_dir);
  if (cfg.adversarial && tgt.size() == 0) {
    throw DatasetError("no target training samples", cfg.data_dir);
  }

  const nn::SegmentationModel model = make_model(cfg);
  const nn::Discriminator disc = make_discriminator(cfg);
  nn::ParamSet params = model.init(cfg.seed);
  nn::ParamSet disc_params = disc.init(cfg.seed ^ 0xD15C0000D15C0000ull);

  const fs::path out_dir = cfg.out_dir;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DatasetError("cannot create output directory: " + ec.message(), out_dir.string());
  save_config(cfg, out_dir / "config.json");
  std::ofstream csv(out_dir / "metrics.csv", std::ios::binary);
  if (!csv) throw DatasetError("cannot write metrics", (out_dir / "metrics.csv").string());
  csv << kMetricsHeader << '\n';

  auto miou_of = [&](const nn::ParamSet& p) {
    if (eval_set.size() == 0) return 0.0;
    return eval::iou_from_confusion(evaluate(model, p, eval_set, cfg.eval_head, cfg.batch_size))
        .miou;
  };

  FitResult result;
  result.initial_miou = miou_of(params);
  result.best_miou = result.initial_miou;
  result.best_checkpoint = {params, disc_params};

  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const long steps_per_epoch = static_cast<long>((src.size() + batch - 1) / batch);
  const long total_steps = steps_per_epoch * cfg.epochs;
  const int warmup = static_cast<int>(std::floor(cfg.warmup_fraction * cfg.epochs));

  SgdMomentum gen_opt(cfg.optim.gen_momentum);
  Adam disc_opt(cfg.optim.disc_beta1, cfg.optim.disc_beta2, cfg.optim.disc_eps);
  std::vector<std::size_t> tgt_order;
  std::size_t tgt_pos = 0;
  long step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const bool adversarial = cfg.adversarial && epoch >= warmup;
    const auto src_order = permutation(src.size(), cfg.seed, epoch, 1);
    if (adversarial) {
      tgt_order = permutation(tgt.size(), cfg.seed, epoch, 2);
      tgt_pos = 0;
    }
    for (std::size_t start = 0; start < src.size(); start += batch, ++step) {
      const std::span<const std::size_t> idx(src_order.data() + start,
                                             std::min(batch, src.size() - start));
      const SourceBatch sb = make_source_batch(src, idx);
      const double lr_gen =
          poly_lr(cfg.optim.gen_lr, step, total_steps, cfg.optim.poly_power);
      Row row;
      row.step = step;
      row.epoch = epoch;
      row.phase = adversarial ? "adversarial" : "supervised";
      row.lr_gen = lr_gen;
      StepResult r;
      if (adversarial) {
        std::vector<std::size_t> tidx;
        for (std::size_t i = 0; i < idx.size(); ++i) {
          tidx.push_back(tgt_order[tgt_pos]);
          tgt_pos = (tgt_pos + 1) % tgt_order.size();
        }
        const TargetBatch tb{images_to_tensor(tgt.images, tidx)};
        r = adversarial_step(model, params, disc, disc_params, sb, tb, cfg.weights, cfg.variant);
        const double lr_disc =
            poly_lr(cfg.optim.disc_lr, step, total_steps, cfg.optim.poly_power);
        disc_opt.step(disc_params, r.discriminator, lr_disc);
        require_finite(disc_params, "discriminator", step);
        row.adv_g = r.losses.adv_g;
        row.adv_d = r.losses.adv_d;
        row.lr_disc = lr_disc;
      } else {
        r = supervised_step(model, params, sb, cfg.weights);
      }
      gen_opt.step(params, r.generator, lr_gen);
      require_finite(params, "generator", step);
      row.seg = r.losses.seg;
      row.ref = r.losses.ref;
      row.dep = r.losses.dep;
      row.edge = r.losses.edge;
      write_row(csv, row);
    }
    const double miou = miou_of(params);
    result.epoch_miou.push_back(miou);
    Row eval_row;
    eval_row.step = step;
    eval_row.epoch = epoch;
    eval_row.phase = "eval";
    eval_row.miou = miou;
    write_row(csv, eval_row);
    csv.flush();
    if (miou > result.best_miou || epoch == 0) {
      result.best_miou = miou;
      result.best_checkpoint = {params, disc_params};
    }
  }

  result.steps = step;
  result.final_checkpoint = {params, disc_params};
  nn::save_checkpoint(out_dir / "final.ckpt", result.final_checkpoint);
  nn::save_checkpoint(out_dir / "best.ckpt", result.best_checkpoint);
  if (!csv) throw DatasetError("failed writing metrics", (out_dir / "metrics.csv").string());
  return result;
}

}  // namespace edgeuda::adapt
