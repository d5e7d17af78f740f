#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edgeuda/config.hpp"
#include "edgeuda/nn/unified_map.hpp"

namespace edgeuda::eval {

struct AblationRow {
  nn::AblationVariant variant;
  double miou = 0.0;  // target-eval mIoU of the final generator
  std::size_t param_count = 0;       // generator scalars
  std::size_t disc_param_count = 0;  // discriminator scalars
  double wall_seconds = 0.0;
};

inline constexpr const char* kAblationHeader = "variant,miou,param_count,wall_seconds";

// Trains one model per variant with otherwise identical configs. Each run
// writes into base.out_dir/<variant>; the table goes to base.out_dir/ablation.csv.
std::vector<AblationRow> run_ablation(const RunConfig& base,
                                      const std::vector<nn::AblationVariant>& variants);

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::filesystem::path& path);

// concat > entropy_only > fusion; false when a variant is missing.
bool matches_reference_ordering(const std::vector<AblationRow>& rows);

}  // namespace edgeuda::eval
