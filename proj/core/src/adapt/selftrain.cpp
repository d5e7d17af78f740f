#include "edgeuda/adapt/selftrain.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "edgeuda/adapt/optim.hpp"
#include "edgeuda/adapt/trainer.hpp"
#include "edgeuda/error.hpp"
#include "edgeuda/nn/checkpoint.hpp"
#include "edgeuda/nn/ops.hpp"

namespace edgeuda::adapt {
namespace fs = std::filesystem;

PseudoLabels generate_pseudo_labels(const nn::SegmentationModel& model,
                                    const nn::ParamSet& params,
                                    std::span<const RgbImage> images, double lambda_conf,
                                    int batch_size) {
  if (!(lambda_conf > 0.0 && lambda_conf < 1.0)) {
    throw ConfigError("lambda_conf must lie in (0, 1)");
  }
  PseudoLabels out;
  std::size_t kept = 0, total = 0;
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(images.size(), start + batch_size); ++i) {
      idx.push_back(i);
    }
    const Tensor probs = model.forward(params, images_to_tensor(images, idx)).ref_probs.value();
    const Shape s = probs.shape();
    for (int n = 0; n < s.n; ++n) {
      LabelMap labels(s.h, s.w, kIgnoreLabel);
      for (std::size_t p = 0; p < s.plane(); ++p) {
        int best = 0;
        double best_p = probs.channel(n, 0)[p];
        for (int c = 1; c < s.c; ++c) {
          if (probs.channel(n, c)[p] > best_p) {
            best_p = probs.channel(n, c)[p];
            best = c;
          }
        }
        if (best_p >= lambda_conf) {
          labels.values[p] = static_cast<std::uint8_t>(best);
          ++kept;
        }
      }
      total += s.plane();
      out.labels.push_back(std::move(labels));
    }
  }
  out.coverage = total == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(total);
  return out;
}

nn::ParamSet self_train_round(const nn::SegmentationModel& model, nn::ParamSet params,
                              const UnlabeledSet& target, double lambda_conf,
                              const RoundSettings& settings, RoundReport* report) {
  const PseudoLabels pseudo =
      generate_pseudo_labels(model, params, target.images, lambda_conf, settings.batch_size);
  if (pseudo.coverage == 0.0) {
    throw DegeneratePseudoLabelError("no target pixel reaches confidence " +
                                     std::to_string(lambda_conf) + " in round " +
                                     std::to_string(settings.round));
  }
  const std::size_t n = target.size();
  const std::size_t batch = static_cast<std::size_t>(settings.batch_size);
  const long total_steps = static_cast<long>((n + batch - 1) / batch) * settings.epochs;
  SgdMomentum opt(settings.optim.gen_momentum);
  RoundReport rep{settings.round, pseudo.coverage};
  double loss_sum = 0.0;
  long step = 0;

  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::seed_seq seq{static_cast<std::uint32_t>(settings.seed),
                      static_cast<std::uint32_t>(settings.seed >> 32),
                      static_cast<std::uint32_t>(settings.round),
                      static_cast<std::uint32_t>(epoch), 3u};
    std::mt19937_64 rng(seq);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    for (std::size_t start = 0; start < n; start += batch, ++step) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(batch, n - start));
      bool any = false;
      for (std::size_t i : idx) {
        for (std::uint8_t v : pseudo.labels[i].values) any = any || v != kIgnoreLabel;
      }
      if (!any) continue;
      nn::ParamVars pv(params, true);
      const nn::ModelOutputs out =
          model.forward(pv, nn::Var::constant(images_to_tensor(target.images, idx)));
      const Tensor labels = labels_to_tensor(pseudo.labels, idx);
      const nn::Var loss =
          nn::weighted_sum({{settings.weights.seg, nn::cross_entropy(out.sem_probs, labels)},
                            {settings.weights.ref, nn::cross_entropy(out.ref_probs, labels)}});
      nn::backward(loss);
      opt.step(params, pv.grads(),
               poly_lr(settings.optim.gen_lr, step, total_steps, settings.optim.poly_power));
      if (!params.all_finite()) throw NumericError("self-training produced non-finite parameters");
      loss_sum += loss.value()[0];
      ++rep.steps;
    }
  }
  rep.mean_loss = rep.steps == 0 ? 0.0 : loss_sum / static_cast<double>(rep.steps);
  if (report) *report = rep;
  return params;
}

SelfTrainResult self_train(const RunConfig& cfg, const fs::path& checkpoint) {
  cfg.validate();
  const DatasetReader reader(cfg.data_dir);
  reader.check_compatible(cfg);
  const UnlabeledSet target = reader.target_train();
  if (target.size() == 0) throw DatasetError("no target training samples", cfg.data_dir);
  const LabeledSet eval_set = reader.target_eval();

  const nn::SegmentationModel model = make_model(cfg);
  SelfTrainResult result;
  const nn::Checkpoint ckpt = nn::load_checkpoint(checkpoint);
  result.params = nn::conform(model.layout(), ckpt.generator, "generator");

  auto miou_of = [&](const nn::ParamSet& p) {
    if (eval_set.size() == 0) return 0.0;
    return eval::iou_from_confusion(evaluate(model, p, eval_set, cfg.eval_head, cfg.batch_size))
        .miou;
  };
  result.miou_before = miou_of(result.params);

  const fs::path out_dir = cfg.out_dir;
  fs::create_directories(out_dir);
  save_config(cfg, out_dir / "config.json");
  std::ofstream csv(out_dir / "selftrain.csv", std::ios::binary);
  if (!csv) throw DatasetError("cannot write self-training log", out_dir.string());
  csv << "round,coverage,steps,mean_loss,eval_miou\n";

  for (int round = 0; round < cfg.selftrain.rounds; ++round) {
    RoundSettings settings{cfg.optim, cfg.weights, cfg.selftrain.epochs_per_round,
                           cfg.batch_size, cfg.seed, round};
    RoundReport rep;
    result.params = self_train_round(model, std::move(result.params), target,
                                     cfg.selftrain.lambda_conf, settings, &rep);
    result.rounds.push_back(rep);
    const double miou = miou_of(result.params);
    char line[160];
    std::snprintf(line, sizeof line, "%d,%.9g,%ld,%.9g,%.9g\n", rep.round, rep.coverage,
                  rep.steps, rep.mean_loss, miou);
    csv << line;
    result.miou_after = miou;
  }
  if (cfg.selftrain.rounds == 0) result.miou_after = result.miou_before;
  nn::save_checkpoint(out_dir / "selftrain.ckpt",
                      {result.params, ckpt.discriminator});
  return result;
}

}  // namespace edgeuda::adapt
