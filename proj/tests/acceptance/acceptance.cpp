// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 when any
// criterion fails. Usage: edgeuda_acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edgeuda/adapt/dataset.hpp"
#include "edgeuda/adapt/selftrain.hpp"
#include "edgeuda/adapt/trainer.hpp"
#include "edgeuda/config.hpp"
#include "edgeuda/edges.hpp"
#include "edgeuda/error.hpp"
#include "edgeuda/eval/ablation.hpp"
#include "edgeuda/eval/metrics.hpp"
#include "edgeuda/image_io.hpp"
#include "edgeuda/nn/checkpoint.hpp"
#include "edgeuda/nn/functional.hpp"
#include "edgeuda/scenegen.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "tiny.hpp"

namespace fs = std::filesystem;
using namespace edgeuda;

namespace {

// Regression bounds pinned from the first successful toy run
// (adapted 0.7099 vs source-only 0.6926; one ISL round 0.7099 -> 0.7772).
constexpr double kAdaptationMarginBound = 0.017;
constexpr double kSelfTrainDeltaBound = 0.06;
constexpr double kOracleTol = 1e-6;
constexpr double kIouTol = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Suite {
 public:
  void run(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(id, name, o, seconds_since(t0));
  }

  void report(int id, const char* name, const Outcome& o, double secs) {
    if (!o.pass) ++failures_;
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }

  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

Outcome formula_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> cls(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
  auto track_t = [&](const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("oracle shape mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) track(a[i], b[i]);
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor logits = testing::random_tensor({2, 5, 4, 4}, rng, -6, 6);
    const Tensor p = nn::softmax(logits);
    track_t(p, oracle::softmax(logits));
    track_t(nn::entropy_map(p), oracle::entropy(p));

    Tensor y({2, 1, 4, 4});
    for (auto& v : y.values()) v = unit(rng) < 0.1 ? 255.0 : cls(rng);
    y[0] = 0.0;
    track(nn::cross_entropy_loss(p, y), oracle::cross_entropy(p, y));

    const Tensor z = testing::random_tensor({2, 1, 4, 4}, rng, 1, 80);
    const Tensor zt = testing::random_tensor({2, 1, 4, 4}, rng, 1, 80);
    track(nn::berhu_loss(z, zt), oracle::berhu(z, zt));

    const Tensor e = testing::random_tensor({2, 1, 4, 4}, rng, 0.02, 0.98);
    Tensor eg({2, 1, 4, 4});
    for (auto& v : eg.values()) v = unit(rng) < 0.3 ? 255.0 : 0.0;
    track(nn::bce_edge_loss(e, eg), oracle::bce(e, eg));

    const double zmin = 0.5 + 2.0 * unit(rng);
    const double zmax = zmin * (10.0 + 500.0 * unit(rng));
    const int k = 2 + trial % 9;
    const nn::DepthBinSpec spec = nn::sid_bins(zmin, zmax, k);
    const auto thr = oracle::sid_thresholds(zmin, zmax, k);
    for (int i = 0; i <= k; ++i) track(spec.thresholds[i], thr[i]);
    const Tensor bp = nn::softmax(testing::random_tensor({2, k, 4, 4}, rng, -3, 3));
    track_t(nn::depth_decode(bp, spec), oracle::depth_decode(bp, zmin, zmax));

    const Tensor ss = testing::random_tensor({2, 1, 4, 4}, rng, 0.01, 0.99);
    const Tensor st = testing::random_tensor({2, 1, 4, 4}, rng, 0.01, 0.99);
    track(nn::adversarial_d_loss(ss, st), oracle::adversarial_d(ss, st));
    track(nn::adversarial_g_loss(st), oracle::adversarial_g(st));
  }
  // Saturated probabilities must not produce NaN entropies.
  Tensor edge({1, 2, 1, 2});
  edge[0] = 1.0;
  edge[1] = 1e-300;
  edge[2] = 0.0;
  edge[3] = 1.0 - 1e-300;
  const Tensor he = nn::entropy_map(edge);
  bool finite = true;
  for (double v : he.values()) finite = finite && std::isfinite(v);
  track_t(he, oracle::entropy(edge));
  const double secs = seconds_since(t0);
  return {worst <= kOracleTol && finite && secs < 10.0,
          fmt("max |impl - oracle| = %.3g over 50 trials (tol %.0e), boundary entropies finite: %s",
              worst, kOracleTol, finite ? "yes" : "no")};
}

nn::ParamSet with_random_biases(nn::ParamSet p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p.names[t].ends_with(".bias")) {
      for (auto& v : p.tensors[t].values()) v = u(rng);
    }
  }
  return p;
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  const auto model = tiny::model();
  const auto variant = nn::AblationVariant::kConcat;
  const nn::Discriminator disc(nn::unified_channels(variant, tiny::kClasses, tiny::arch().depth_bins),
                               tiny::arch());
  const nn::ParamSet gp = with_random_biases(model.init(5), 6);
  const nn::ParamSet dp = with_random_biases(disc.init(7), 8);
  const auto src = tiny::source_batch(0, 2);
  const auto tgt = tiny::target_batch(20, 2);
  const adapt::LossWeights w{1.0, 0.8, 0.01, 0.5, 0.3};
  const adapt::StepResult step = adapt::adversarial_step(model, gp, disc, dp, src, tgt, w, variant);

  const auto gen = gradcheck::check_params(gp, step.generator, [&](const nn::ParamSet& p) {
    adapt::LossBreakdown l;
    const double sup = adapt::supervised_objective(model.forward(p, src.images), src, w, l).value()[0];
    const Tensor scores = disc.forward(dp, adapt::unified_map(model, p, tgt.images, variant));
    return sup + w.adv * nn::adversarial_g_loss(scores);
  });
  const Tensor usrc = adapt::unified_map(model, gp, src.images, variant);
  const Tensor utgt = adapt::unified_map(model, gp, tgt.images, variant);
  const auto dis = gradcheck::check_params(dp, step.discriminator, [&](const nn::ParamSet& p) {
    return nn::adversarial_d_loss(disc.forward(p, usrc), disc.forward(p, utgt));
  });
  const std::size_t total = gp.scalar_count() + dp.scalar_count();
  const double secs = seconds_since(t0);
  const bool ok = gen.failures == 0 && dis.failures == 0 && total <= 1000 && secs < 60.0;
  std::string detail = fmt("generator %zu/%zu, discriminator %zu/%zu entries within tolerance; %zu params",
                           gen.checked - gen.failures, gen.checked, dis.checked - dis.failures,
                           dis.checked, total);
  if (gen.failures) detail += "; worst generator " + gen.worst;
  if (dis.failures) detail += "; worst discriminator " + dis.worst;
  return {ok, detail};
}

Outcome edge_correctness() {
  const auto t0 = Clock::now();
  const scenegen::SceneConfig scene;
  const edges::CannyParams params;
  std::size_t outside = 0, oracle_px = 0, covered = 0;
  double worst_cover = 1.0;
  for (int i = 0; i < 20; ++i) {
    const auto s = scenegen::generate_scene(scene, i);
    const EdgeMap e = edges::extract_edge_gt(s.labels, scene.num_classes, params,
                                             edges::EdgeMode::kUnion)
                          .front();
    const EdgeMap oracle = edges::boundary_oracle(s.labels);
    const EdgeMap oracle2 = edges::dilate(oracle, 2);
    const EdgeMap e1 = edges::dilate(e, 1);
    std::size_t o = 0, c = 0;
    for (std::size_t p = 0; p < e.size(); ++p) {
      if (e.values[p] && !oracle2.values[p]) ++outside;
      if (oracle.values[p]) {
        ++o;
        if (e1.values[p]) ++c;
      }
    }
    oracle_px += o;
    covered += c;
    if (o > 0) worst_cover = std::min(worst_cover, static_cast<double>(c) / o);
  }
  const double cover = oracle_px ? static_cast<double>(covered) / oracle_px : 0.0;
  const double secs = seconds_since(t0);
  return {outside == 0 && worst_cover >= 0.95 && secs < 30.0,
          fmt("%zu edge pixels outside the 2-px band; oracle coverage within 1 px %.4f overall, "
              "%.4f worst scene (need >= 0.95)",
              outside, cover, worst_cover)};
}

Outcome miou_oracle() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int C = 2 + trial % 5;
    std::uniform_int_distribution<int> d(0, C - 1);
    LabelMap pred(9, 11), gt(9, 11);
    for (auto& v : pred.values) v = static_cast<std::uint8_t>(d(rng));
    for (auto& v : gt.values) v = static_cast<std::uint8_t>(d(rng));
    const eval::IouReport r = eval::iou_from_confusion(eval::confusion_matrix(pred, gt, C));
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < C; ++c) {
      std::set<std::size_t> P, G, I, U;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred.values[i] == c) P.insert(i);
        if (gt.values[i] == c) G.insert(i);
      }
      std::set_intersection(P.begin(), P.end(), G.begin(), G.end(), std::inserter(I, I.end()));
      std::set_union(P.begin(), P.end(), G.begin(), G.end(), std::inserter(U, U.end()));
      if (U.empty()) {
        if (!std::isnan(r.iou[c])) worst = 1.0;
        continue;
      }
      const double iou = static_cast<double>(I.size()) / U.size();
      worst = std::max(worst, std::abs(iou - r.iou[c]));
      sum += iou;
      ++present;
    }
    worst = std::max(worst, std::abs(sum / present - r.miou));
  }
  eval::ConfusionMatrix cm(2);
  cm(0, 0) = 1;
  cm(0, 1) = 1;
  cm(1, 1) = 2;
  const double example = eval::iou_from_confusion(cm).miou;
  const bool ok = worst <= kIouTol && std::abs(example - 0.5833) < 5e-5;
  return {ok, fmt("max deviation from set-based IoU %.3g over 20 pairs; [[1,1],[0,2]] -> mIoU %.4f",
                  worst, example)};
}

bool has_target_train_label_read(const std::vector<std::string>& reads, std::size_t& image_reads) {
  bool violation = false;
  image_reads = 0;
  for (const auto& p : reads) {
    if (p.find("target/train/") == std::string::npos) continue;
    if (p.ends_with("_image.ppm")) {
      ++image_reads;
    } else {
      violation = true;
    }
  }
  return violation;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "edgeuda_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  std::printf("work dir: %s\n", work.string().c_str());

  Suite suite;
  suite.run(1, "formula oracles", formula_oracles);
  suite.run(2, "gradient checks", gradient_checks);
  suite.run(3, "edge correctness", edge_correctness);
  suite.run(4, "mIoU oracle", miou_oracle);

  RunConfig toy = load_config(EDGEUDA_TOY_CONFIG);
  toy.data_dir = (work / "toy").string();
  std::vector<std::string> protocol_reads;
  auto record = [&](const fs::path& p) { protocol_reads.push_back(p.generic_string()); };
  bool canary_planted = false;
  adapt::FitResult adapted;
  bool adapted_ok = false;

  suite.run(5, "adaptation improves", [&] {
    const auto t0 = Clock::now();
    scenegen::generate_dataset(toy.scene, toy.shift, toy.data, toy.data_dir);
    // Canary: a label file where none may be read.
    const fs::path canary = fs::path(toy.data_dir) / "target/train/000000_labels.pgm";
    io::write_labels(canary, LabelMap(toy.scene.height, toy.scene.width, 1));
    canary_planted = fs::exists(canary);

    RunConfig so = toy;
    so.adversarial = false;
    so.out_dir = (work / "source_only").string();
    RunConfig ad = toy;
    ad.out_dir = (work / "adapted").string();
    const adapt::FitResult base = [&] {
      io::ScopedReadObserver watch(record);
      return adapt::fit(so);
    }();
    {
      io::ScopedReadObserver watch(record);
      adapted = adapt::fit(ad);
    }
    adapted_ok = true;
    const double a = adapted.epoch_miou.back();
    const double b = base.epoch_miou.back();
    const double secs = seconds_since(t0);
    return Outcome{a > b && a - b >= kAdaptationMarginBound && secs <= 900.0,
                   fmt("target mIoU adapted %.4f vs source-only %.4f, margin %+.4f (bound %.3f), "
                       "%.0f s total",
                       a, b, a - b, kAdaptationMarginBound, secs)};
  });

  suite.run(6, "self-training sanity", [&] {
    if (!adapted_ok) return Outcome{false, "no adapted checkpoint"};
    const adapt::DatasetReader reader(toy.data_dir);
    const adapt::UnlabeledSet target = [&] {
      io::ScopedReadObserver watch(record);
      return reader.target_train();
    }();
    const auto model = adapt::make_model(toy);
    bool monotone = true;
    std::string cov;
    for (const nn::ParamSet* p : {&adapted.final_checkpoint.generator, &adapted.best_checkpoint.generator}) {
      double prev = 1.0;
      for (double lambda : {0.6, 0.7, 0.8, 0.9}) {
        const double c = adapt::generate_pseudo_labels(model, *p, target.images, lambda,
                                                       toy.batch_size)
                             .coverage;
        monotone = monotone && c <= prev;
        prev = c;
        if (p == &adapted.final_checkpoint.generator) cov += fmt("%s%.3f", cov.empty() ? "" : "/", c);
      }
    }
    RunConfig st = toy;
    st.out_dir = (work / "selftrain").string();
    st.selftrain.rounds = 1;
    const adapt::SelfTrainResult r = [&] {
      io::ScopedReadObserver watch(record);
      return adapt::self_train(st, work / "adapted/final.ckpt");
    }();
    const double delta = r.miou_after - r.miou_before;
    return Outcome{monotone && delta >= kSelfTrainDeltaBound,
                   fmt("coverage at lambda 0.6/0.7/0.8/0.9 = %s (non-increasing: %s); one round "
                       "mIoU %.4f -> %.4f, delta %+.4f (bound %+.2f)",
                       cov.c_str(), monotone ? "yes" : "no", r.miou_before, r.miou_after, delta,
                       kSelfTrainDeltaBound)};
  });

  suite.run(7, "ablation harness", [&] {
    RunConfig base = toy;
    base.epochs = 4;
    base.out_dir = (work / "ablation").string();
    const auto rows = eval::run_ablation(base, {nn::kAllVariants.begin(), nn::kAllVariants.end()});
    std::ifstream in(work / "ablation/ablation.csv");
    std::string line;
    std::getline(in, line);
    bool schema = line == eval::kAblationHeader;
    std::set<std::string> seen;
    std::set<std::string> params;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      if (f.size() != 4) {
        schema = false;
        continue;
      }
      nn::variant_from_string(f[0]);
      seen.insert(f[0]);
      const double miou = std::stod(f[1]);
      schema = schema && miou >= 0.0 && miou <= 1.0 && std::stod(f[3]) >= 0.0;
      params.insert(f[2]);
    }
    schema = schema && n == 4 && seen.size() == 4;
    std::string table;
    for (const auto& r : rows) table += fmt(" %s=%.4f", nn::to_string(r.variant).c_str(), r.miou);
    const bool ordering = eval::matches_reference_ordering(rows);
    return Outcome{schema && params.size() == 1,
                   fmt("schema ok: %s, generator param_count constant: %s;%s; reference ordering "
                       "concat > entropy_only > fusion %s (informational)",
                       schema ? "yes" : "no", params.size() == 1 ? "yes" : "no", table.c_str(),
                       ordering ? "reproduced" : "not reproduced")};
  });

  suite.run(8, "determinism", [&] {
    if (!adapted_ok) return Outcome{false, "no first run"};
    RunConfig again = toy;
    again.out_dir = (work / "adapted_repeat").string();
    adapt::fit(again);
    std::string diff;
    for (const char* f : {"metrics.csv", "final.ckpt", "best.ckpt"}) {
      const std::string a = slurp(work / "adapted" / f);
      if (a.empty() || a != slurp(work / "adapted_repeat" / f)) diff += std::string(" ") + f;
    }
    return Outcome{diff.empty(), diff.empty() ? "metrics.csv, final.ckpt, best.ckpt byte-identical"
                                              : "differs:" + diff};
  });

  const auto t9 = Clock::now();
  std::size_t image_reads = 0;
  const bool violation = has_target_train_label_read(protocol_reads, image_reads);
  suite.report(9, "UDA protocol",
               Outcome{canary_planted && !violation && image_reads > 0,
                       fmt("%zu file reads observed during fit and self-training, %zu target-train "
                           "image reads, target-train label/depth reads: %s, canary planted: %s",
                           protocol_reads.size(), image_reads, violation ? "YES" : "none",
                           canary_planted ? "yes" : "no")},
               seconds_since(t9));

  std::printf("%d criteria failed\n", suite.failures());
  return suite.failures() == 0 ? 0 : 1;
}
