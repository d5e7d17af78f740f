#include "edgeuda/eval/ablation.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>

#include "edgeuda/adapt/trainer.hpp"
#include "edgeuda/error.hpp"

namespace edgeuda::eval {
namespace fs = std::filesystem;

std::vector<AblationRow> run_ablation(const RunConfig& base,
                                      const std::vector<nn::AblationVariant>& variants) {
  std::vector<AblationRow> rows;
  for (nn::AblationVariant v : variants) {
    RunConfig cfg = base;
    cfg.variant = v;
    cfg.out_dir = (fs::path(base.out_dir) / nn::to_string(v)).string();
    const auto t0 = std::chrono::steady_clock::now();
    const adapt::FitResult fit = adapt::fit(cfg);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    rows.push_back({v, fit.epoch_miou.empty() ? fit.initial_miou : fit.epoch_miou.back(),
                    fit.final_checkpoint.generator.scalar_count(),
                    fit.final_checkpoint.discriminator.scalar_count(), dt.count()});
  }
  write_ablation_csv(rows, fs::path(base.out_dir) / "ablation.csv");
  return rows;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DatasetError("cannot write ablation table", path.string());
  os << kAblationHeader << '\n';
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%s,%.9g,%zu,%.3f\n", nn::to_string(r.variant).c_str(),
                  r.miou, r.param_count, r.wall_seconds);
    os << line;
  }
  if (!os) throw DatasetError("failed writing ablation table", path.string());
}

bool matches_reference_ordering(const std::vector<AblationRow>& rows) {
  auto find = [&](nn::AblationVariant v) -> std::optional<double> {
    for (const auto& r : rows) {
      if (r.variant == v) return r.miou;
    }
    return std::nullopt;
  };
  const auto concat = find(nn::AblationVariant::kConcat);
  const auto entropy = find(nn::AblationVariant::kEntropyOnly);
  const auto fusion = find(nn::AblationVariant::kFusion);
  return concat && entropy && fusion && *concat > *entropy && *entropy > *fusion;
}

}  // namespace edgeuda::eval
