#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace edgeuda {

enum class Domain { kSource, kTarget };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

// Paths are relative to the dataset directory; empty means absent.
struct ManifestEntry {
  std::string id;
  Domain domain = Domain::kSource;
  std::string split;  // "train" or "eval"
  std::string image;
  std::string labels;
  std::string depth;
  std::string edges;
};

struct Manifest {
  nlohmann::json config;
  std::vector<ManifestEntry> samples;

  std::vector<const ManifestEntry*> select(Domain domain, const std::string& split) const;
  int depth_quantum_mm() const;
};

inline constexpr const char* kManifestName = "manifest.json";

// JSON layout: {"config": {...}, "samples": [{"id", "domain", "split", "files": {...}}]}.
// Keys of "files" are only present for files that exist.
nlohmann::json to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& j);

Manifest load_manifest(const std::filesystem::path& dataset_dir);
void save_manifest(const Manifest& manifest, const std::filesystem::path& dataset_dir);

}  // namespace edgeuda
