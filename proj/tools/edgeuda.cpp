#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "edgeuda/adapt/dataset.hpp"
#include "edgeuda/adapt/selftrain.hpp"
#include "edgeuda/adapt/trainer.hpp"
#include "edgeuda/config.hpp"
#include "edgeuda/error.hpp"
#include "edgeuda/eval/ablation.hpp"
#include "edgeuda/eval/metrics.hpp"
#include "edgeuda/eval/render.hpp"
#include "edgeuda/image_io.hpp"
#include "edgeuda/nn/checkpoint.hpp"
#include "edgeuda/nn/ops.hpp"
#include "edgeuda/scenegen.hpp"

namespace fs = std::filesystem;
using namespace edgeuda;

namespace {

struct ConfigFlags {
  std::string config;
  std::vector<std::string> overrides;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON run configuration");
  cmd->add_option("--set", flags.overrides, "Override a config key, e.g. train.epochs=4")
      ->allow_extra_args(false);
}

RunConfig resolve(const ConfigFlags& flags, const std::string& data, const std::string& out) {
  RunConfig cfg = load_config(flags.config, flags.overrides);
  if (!data.empty()) cfg.data_dir = data;
  if (!out.empty()) cfg.out_dir = out;
  return cfg;
}

// Config for an existing checkpoint: --config when given, otherwise the
// config.json echoed next to the checkpoint.
RunConfig checkpoint_config(const ConfigFlags& flags, const fs::path& ckpt,
                            const std::string& data) {
  ConfigFlags f = flags;
  if (f.config.empty()) {
    const fs::path echoed = ckpt.parent_path() / "config.json";
    if (!fs::exists(echoed)) {
      throw ConfigError("no config.json next to " + ckpt.string() + "; pass --config");
    }
    f.config = echoed.string();
  }
  return resolve(f, data, "");
}

adapt::LabeledSet load_split(const adapt::DatasetReader& reader, const RunConfig& cfg,
                             const std::string& split) {
  if (split == "target-eval") return reader.target_eval();
  if (split == "source-train") return reader.source_train(cfg.canny, cfg.num_classes());
  if (split == "target-train") {
    throw ProtocolError("target-train carries no labels and cannot be scored");
  }
  throw ConfigError("unknown split '" + split + "' (expected target-eval or source-train)");
}

int cmd_gen_data(const ConfigFlags& flags, const std::string& out) {
  const RunConfig cfg = resolve(flags, out, "");
  const Manifest m = scenegen::generate_dataset(cfg.scene, cfg.shift, cfg.data, cfg.data_dir);
  std::cout << "wrote " << m.samples.size() << " samples to " << cfg.data_dir << '\n';
  return 0;
}

int cmd_extract_edges(const ConfigFlags& flags, const std::string& data) {
  const RunConfig cfg = resolve(flags, data, "");
  const int n = adapt::extract_dataset_edges(cfg.data_dir, cfg.canny);
  std::cout << "wrote " << n << " edge maps to " << cfg.data_dir << '\n';
  return 0;
}

int cmd_train(const ConfigFlags& flags, const std::string& data, const std::string& out) {
  const RunConfig cfg = resolve(flags, data, out);
  const adapt::FitResult r = adapt::fit(cfg);
  std::printf("initial mIoU %.4f\n", r.initial_miou);
  for (std::size_t e = 0; e < r.epoch_miou.size(); ++e) {
    std::printf("epoch %zu mIoU %.4f\n", e, r.epoch_miou[e]);
  }
  std::printf("best mIoU %.4f; outputs in %s\n", r.best_miou, cfg.out_dir.c_str());
  return 0;
}

int cmd_self_train(const ConfigFlags& flags, const std::string& ckpt, const std::string& data,
                   const std::string& out) {
  const RunConfig cfg = resolve(flags, data, out);
  const adapt::SelfTrainResult r = adapt::self_train(cfg, ckpt);
  std::printf("before mIoU %.4f\n", r.miou_before);
  for (const auto& round : r.rounds) {
    std::printf("round %d coverage %.4f steps %ld loss %.4f\n", round.round, round.coverage,
                round.steps, round.mean_loss);
  }
  std::printf("after mIoU %.4f\n", r.miou_after);
  return 0;
}

int cmd_eval(const ConfigFlags& flags, const std::string& ckpt, const std::string& data,
             const std::string& split, const std::string& head, std::string csv) {
  RunConfig cfg = checkpoint_config(flags, ckpt, data);
  if (head == "semantic") cfg.eval_head = EvalHead::kSemantic;
  else if (head == "refined") cfg.eval_head = EvalHead::kRefined;
  else if (!head.empty()) throw ConfigError("unknown head '" + head + "'");

  const adapt::DatasetReader reader(cfg.data_dir);
  reader.check_compatible(cfg);
  const adapt::LabeledSet set = load_split(reader, cfg, split);
  const nn::SegmentationModel model = adapt::make_model(cfg);
  const nn::ParamSet params =
      nn::conform(model.layout(), nn::load_checkpoint(ckpt).generator, "generator");
  const eval::IouReport rep = eval::iou_from_confusion(
      adapt::evaluate(model, params, set, cfg.eval_head, cfg.batch_size));

  if (csv.empty()) csv = (fs::path(ckpt).parent_path() / ("eval_" + split + ".csv")).string();
  std::ofstream os(csv, std::ios::binary);
  if (!os) throw DatasetError("cannot write evaluation table", csv);
  os << "class,iou,present\n";
  std::printf("%-6s %8s\n", "class", "IoU");
  char line[96];
  for (std::size_t c = 0; c < rep.iou.size(); ++c) {
    if (rep.present[c]) {
      std::printf("%-6zu %8.4f\n", c, rep.iou[c]);
      std::snprintf(line, sizeof line, "%zu,%.9g,1\n", c, rep.iou[c]);
    } else {
      std::printf("%-6zu %8s\n", c, "absent");
      std::snprintf(line, sizeof line, "%zu,,0\n", c);
    }
    os << line;
  }
  std::snprintf(line, sizeof line, "mean,%.9g,\n", rep.miou);
  os << line;
  std::printf("%-6s %8.4f\n", "mIoU", rep.miou);
  return 0;
}

int cmd_ablate(const ConfigFlags& flags, const std::string& data, const std::string& out,
               const std::vector<std::string>& names) {
  const RunConfig cfg = resolve(flags, data, out);
  std::vector<nn::AblationVariant> variants;
  for (const auto& n : names) variants.push_back(nn::variant_from_string(n));
  if (variants.empty()) variants.assign(nn::kAllVariants.begin(), nn::kAllVariants.end());
  const auto rows = eval::run_ablation(cfg, variants);
  std::printf("%-14s %8s %12s %10s\n", "variant", "mIoU", "params", "seconds");
  for (const auto& r : rows) {
    std::printf("%-14s %8.4f %12zu %10.1f\n", nn::to_string(r.variant).c_str(), r.miou,
                r.param_count, r.wall_seconds);
  }
  std::printf("ordering concat > entropy_only > fusion: %s\n",
              eval::matches_reference_ordering(rows) ? "yes" : "no");
  return 0;
}

int cmd_render(const ConfigFlags& flags, const std::string& ckpt, const std::string& data,
               const std::string& split, int index, const std::string& out) {
  const RunConfig cfg = checkpoint_config(flags, ckpt, data);
  const adapt::DatasetReader reader(cfg.data_dir);
  reader.check_compatible(cfg);
  std::vector<RgbImage> images;
  const LabelMap* gt = nullptr;
  adapt::LabeledSet labeled;
  if (split == "target-train") {
    images = reader.target_train().images;
  } else {
    labeled = load_split(reader, cfg, split);
    images = labeled.images;
  }
  if (index < 0 || static_cast<std::size_t>(index) >= images.size()) {
    throw ConfigError("index " + std::to_string(index) + " outside split of " +
                      std::to_string(images.size()) + " samples");
  }
  if (!labeled.labels.empty()) gt = &labeled.labels[index];

  const nn::SegmentationModel model = adapt::make_model(cfg);
  const nn::ParamSet params =
      nn::conform(model.layout(), nn::load_checkpoint(ckpt).generator, "generator");
  const std::vector<RgbImage> one{images[index]};
  const nn::ModelOutputs o = model.forward(params, adapt::images_to_tensor(one, {{0}}));
  const auto pred = adapt::predict_labels(model, params, one, cfg.eval_head, 1);

  const fs::path dir = out;
  fs::create_directories(dir);
  char stem[32];
  std::snprintf(stem, sizeof stem, "%06d_", index);
  const std::string s = stem;
  io::write_rgb(dir / (s + "image.ppm"), images[index]);
  eval::render_labels(pred[0], dir / (s + "pred.ppm"));
  if (gt) eval::render_labels(*gt, dir / (s + "gt.ppm"));
  eval::render_heat(eval::entropy_summary(o.sem_probs.value(), 0), dir / (s + "entropy_sem.ppm"));
  eval::render_heat(eval::entropy_summary(o.ref_probs.value(), 0), dir / (s + "entropy_ref.ppm"));
  eval::render_heat(eval::entropy_summary(o.depth_probs.value(), 0),
                    dir / (s + "entropy_depth.ppm"));
  eval::render_heat(eval::channel_map(o.edge_prob.value(), 0, 0), dir / (s + "edge_prob.ppm"));
  eval::render_heat(eval::channel_map(o.depth.value(), 0, 0), dir / (s + "depth.ppm"));
  std::cout << "wrote renders to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-aware entropy-adversarial domain adaptation on procedural scenes"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string data, out, ckpt, split = "target-eval", head, csv;
  std::vector<std::string> variants;
  int index = 0;

  auto* gen = app.add_subcommand("gen-data", "Generate the source/target dataset");
  add_config_flags(gen, flags);
  gen->add_option("--out", data, "Dataset directory (default paths.data_dir)");

  auto* edges = app.add_subcommand("extract-edges", "Write Canny edge ground truth");
  add_config_flags(edges, flags);
  edges->add_option("--data", data, "Dataset directory");

  auto* train = app.add_subcommand("train", "Supervised warmup then adversarial adaptation");
  add_config_flags(train, flags);
  train->add_option("--data", data, "Dataset directory");
  train->add_option("--out", out, "Run directory");

  auto* self = app.add_subcommand("self-train", "Pseudo-label self-training rounds");
  add_config_flags(self, flags);
  self->add_option("--checkpoint", ckpt, "Starting checkpoint")->required();
  self->add_option("--data", data, "Dataset directory");
  self->add_option("--out", out, "Run directory");

  auto* ev = app.add_subcommand("eval", "Per-class IoU of a checkpoint");
  add_config_flags(ev, flags);
  ev->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  ev->add_option("--data", data, "Dataset directory");
  ev->add_option("--split", split, "target-eval or source-train");
  ev->add_option("--head", head, "semantic or refined");
  ev->add_option("--csv", csv, "Output table (default next to the checkpoint)");

  auto* abl = app.add_subcommand("ablate", "Train once per unified-map variant");
  add_config_flags(abl, flags);
  abl->add_option("--data", data, "Dataset directory");
  abl->add_option("--out", out, "Directory for per-variant runs and ablation.csv");
  abl->add_option("--variants", variants, "Subset of entropy_only, fusion, edge_to_each, concat");

  auto* render = app.add_subcommand("render", "Write prediction, entropy and edge images");
  add_config_flags(render, flags);
  render->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  render->add_option("--data", data, "Dataset directory");
  render->add_option("--split", split, "target-eval, source-train or target-train");
  render->add_option("--index", index, "Sample index within the split");
  render->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen_data(flags, data);
    if (*edges) return cmd_extract_edges(flags, data);
    if (*train) return cmd_train(flags, data, out);
    if (*self) return cmd_self_train(flags, ckpt, data, out);
    if (*ev) return cmd_eval(flags, ckpt, data, split, head, csv);
    if (*abl) return cmd_ablate(flags, data, out, variants);
    if (*render) return cmd_render(flags, ckpt, data, split, index, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
