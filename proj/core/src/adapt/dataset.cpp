#include "edgeuda/adapt/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "edgeuda/config.hpp"
#include "edgeuda/error.hpp"
#include "edgeuda/image_io.hpp"

namespace edgeuda::adapt {
namespace fs = std::filesystem;

namespace {

template <typename GridT>
Tensor planes_to_tensor(std::span<const GridT> grids, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ShapeError("empty batch");
  const GridT& first = grids[indices[0]];
  Tensor out({static_cast<int>(indices.size()), 1, first.height, first.width});
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const GridT& g = grids[indices[b]];
    if (g.height != first.height || g.width != first.width) throw ShapeError("ragged batch");
    double* dst = out.sample(static_cast<int>(b));
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] = static_cast<double>(g.values[i]);
  }
  return out;
}

}  // namespace

DatasetReader::DatasetReader(fs::path dir) : dir_(std::move(dir)), manifest_(load_manifest(dir_)) {
  try {
    const auto& scene = manifest_.config.at("scene");
    z_min_ = scene.at("depth_min").get<double>();
    z_max_ = scene.at("depth_max").get<double>();
  } catch (const nlohmann::json::exception&) {
    throw DatasetError("manifest lacks scene depth range", (dir_ / kManifestName).string());
  }
}

void DatasetReader::check_compatible(const RunConfig& cfg) const {
  const scenegen::SceneConfig scene = scene_config_from_json(manifest_.config.at("scene"));
  auto mismatch = [&](const std::string& what) {
    throw ConfigError("dataset " + dir_.string() + " was generated with a different " + what);
  };
  if (scene.height != cfg.scene.height || scene.width != cfg.scene.width) mismatch("image size");
  if (scene.num_classes != cfg.scene.num_classes) mismatch("class count");
  if (scene.depth_min != cfg.scene.depth_min || scene.depth_max != cfg.scene.depth_max) {
    mismatch("depth range");
  }
}

LabeledSet DatasetReader::load_labeled(Domain domain, const std::string& split,
                                       bool need_depth) const {
  LabeledSet set;
  const int quantum = manifest_.depth_quantum_mm();
  for (const ManifestEntry* e : manifest_.select(domain, split)) {
    if (e->labels.empty()) {
      throw ProtocolError("sample " + e->id + " has no labels in the manifest");
    }
    set.ids.push_back(e->id);
    set.images.push_back(io::read_rgb(dir_ / e->image));
    set.labels.push_back(io::read_labels(dir_ / e->labels));
    if (need_depth) {
      if (e->depth.empty()) throw ProtocolError("sample " + e->id + " has no depth map");
      DepthMap d = io::read_depth(dir_ / e->depth, quantum);
      for (float& v : d.values) {
        v = static_cast<float>(std::clamp(static_cast<double>(v), z_min_, z_max_));
      }
      set.depth.push_back(std::move(d));
    }
    if (!e->edges.empty()) set.edges.push_back(io::read_edges(dir_ / e->edges));
  }
  return set;
}

LabeledSet DatasetReader::source_train(const edges::CannyParams& canny, int num_classes) const {
  LabeledSet set = load_labeled(Domain::kSource, "train", true);
  if (set.edges.size() != set.size()) {
    set.edges.clear();
    for (const auto& labels : set.labels) {
      set.edges.push_back(edges::edge_union(labels, num_classes, canny));
    }
  }
  return set;
}

UnlabeledSet DatasetReader::target_train() const {
  UnlabeledSet set;
  for (const ManifestEntry* e : manifest_.select(Domain::kTarget, "train")) {
    set.ids.push_back(e->id);
    set.images.push_back(io::read_rgb(dir_ / e->image));
  }
  return set;
}

LabeledSet DatasetReader::target_eval() const {
  return load_labeled(Domain::kTarget, "eval", false);
}

Tensor images_to_tensor(std::span<const RgbImage> images, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ShapeError("empty batch");
  const RgbImage& first = images[indices[0]];
  Tensor out({static_cast<int>(indices.size()), 3, first.height, first.width});
  const std::size_t plane = static_cast<std::size_t>(first.height) * first.width;
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const RgbImage& img = images[indices[b]];
    if (img.height != first.height || img.width != first.width) throw ShapeError("ragged batch");
    double* dst = out.sample(static_cast<int>(b));
    for (std::size_t i = 0; i < plane; ++i) {
      for (int ch = 0; ch < 3; ++ch) dst[ch * plane + i] = img.values[i * 3 + ch];
    }
  }
  return out;
}

Tensor labels_to_tensor(std::span<const LabelMap> labels, std::span<const std::size_t> indices) {
  return planes_to_tensor(labels, indices);
}

Tensor depth_to_tensor(std::span<const DepthMap> depth, std::span<const std::size_t> indices) {
  return planes_to_tensor(depth, indices);
}

Tensor edges_to_tensor(std::span<const EdgeMap> edges, std::span<const std::size_t> indices) {
  return planes_to_tensor(edges, indices);
}

int extract_dataset_edges(const fs::path& dir, const edges::CannyParams& canny) {
  Manifest manifest = load_manifest(dir);
  const int num_classes = manifest.config.at("scene").at("num_classes").get<int>();
  int written = 0;
  for (auto& e : manifest.samples) {
    if (e.labels.empty()) continue;
    const LabelMap labels = io::read_labels(dir / e.labels);
    const std::string stem = e.labels.substr(0, e.labels.rfind("_labels.pgm"));
    e.edges = stem + "_edges.pgm";
    io::write_edges(dir / e.edges, edges::edge_union(labels, num_classes, canny));
    ++written;
  }
  save_manifest(manifest, dir);
  return written;
}

}  // namespace edgeuda::adapt
