#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgeuda/adapt/types.hpp"
#include "edgeuda/edges.hpp"
#include "edgeuda/nn/model.hpp"
#include "edgeuda/nn/unified_map.hpp"
#include "edgeuda/scenegen.hpp"

namespace edgeuda {

enum class EvalHead { kSemantic, kRefined };

std::string to_string(EvalHead h);

// Full experiment description. Every field carries a default; JSON input is
// merged over the defaults and unknown keys are rejected.
struct RunConfig {
  scenegen::SceneConfig scene;
  scenegen::DomainShift shift;
  scenegen::DatasetCounts data{200, 200, 50};
  nn::ArchConfig arch;
  adapt::OptimSpec optim;
  adapt::LossWeights weights;
  adapt::SelfTrainConfig selftrain;
  edges::CannyParams canny;

  nn::AblationVariant variant = nn::AblationVariant::kConcat;
  int epochs = 10;
  double warmup_fraction = 0.2;
  int batch_size = 4;
  std::uint64_t seed = 1;
  // When false the discriminator is never updated and the adversarial term
  // is dropped: plain source-only supervised training.
  bool adversarial = true;
  EvalHead eval_head = EvalHead::kRefined;

  std::string data_dir = "data";
  std::string out_dir = "runs/default";

  void validate() const;
  int num_classes() const noexcept { return scene.num_classes; }
};

nlohmann::json to_json(const scenegen::SceneConfig& cfg);
nlohmann::json to_json(const scenegen::DomainShift& shift);
nlohmann::json to_json(const RunConfig& cfg);

scenegen::SceneConfig scene_config_from_json(const nlohmann::json& j);
scenegen::DomainShift domain_shift_from_json(const nlohmann::json& j);
// Strict: throws ConfigError naming the first unknown key.
RunConfig run_config_from_json(const nlohmann::json& j);

// Applies "dotted.key=value" overrides to a JSON document. Values parse as
// JSON when possible and fall back to plain strings.
void apply_overrides(nlohmann::json& j, const std::vector<std::string>& overrides);

// defaults <- file <- overrides. An empty path means no file.
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

void save_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace edgeuda
