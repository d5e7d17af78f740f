#include "edgeuda/manifest.hpp"

#include <fstream>

#include "edgeuda/error.hpp"

namespace edgeuda {
namespace fs = std::filesystem;

std::string to_string(Domain d) { return d == Domain::kSource ? "source" : "target"; }

Domain domain_from_string(const std::string& s) {
  if (s == "source") return Domain::kSource;
  if (s == "target") return Domain::kTarget;
  throw DatasetError("unknown domain tag", s);
}

std::vector<const ManifestEntry*> Manifest::select(Domain domain,
                                                   const std::string& split) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : samples) {
    if (e.domain == domain && e.split == split) out.push_back(&e);
  }
  return out;
}

int Manifest::depth_quantum_mm() const {
  return config.value("depth_quantum_mm", 1);
}

nlohmann::json to_json(const Manifest& manifest) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& e : manifest.samples) {
    nlohmann::json files = nlohmann::json::object();
    files["image"] = e.image;
    if (!e.labels.empty()) files["labels"] = e.labels;
    if (!e.depth.empty()) files["depth"] = e.depth;
    if (!e.edges.empty()) files["edges"] = e.edges;
    samples.push_back({{"id", e.id},
                       {"domain", to_string(e.domain)},
                       {"split", e.split},
                       {"files", files}});
  }
  return {{"config", manifest.config}, {"samples", samples}};
}

Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    m.config = j.at("config");
    for (const auto& s : j.at("samples")) {
      ManifestEntry e;
      e.id = s.at("id").get<std::string>();
      e.domain = domain_from_string(s.at("domain").get<std::string>());
      e.split = s.at("split").get<std::string>();
      const auto& files = s.at("files");
      e.image = files.at("image").get<std::string>();
      e.labels = files.value("labels", "");
      e.depth = files.value("depth", "");
      e.edges = files.value("edges", "");
      m.samples.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DatasetError(std::string("malformed manifest (") + ex.what() + ")", kManifestName);
  }
  return m;
}

Manifest load_manifest(const fs::path& dataset_dir) {
  const fs::path path = dataset_dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw DatasetError("dataset manifest not found", path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw DatasetError("manifest is not valid JSON", path.string());
  }
  return manifest_from_json(j);
}

void save_manifest(const Manifest& manifest, const fs::path& dataset_dir) {
  const fs::path path = dataset_dir / kManifestName;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DatasetError("cannot write manifest", path.string());
  out << to_json(manifest).dump(2) << '\n';
  if (!out) throw DatasetError("manifest write failed", path.string());
}

}  // namespace edgeuda
