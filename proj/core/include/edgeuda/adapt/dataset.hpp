#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "edgeuda/edges.hpp"
#include "edgeuda/grid.hpp"
#include "edgeuda/manifest.hpp"
#include "edgeuda/tensor.hpp"

namespace edgeuda {
struct RunConfig;
}

namespace edgeuda::adapt {

struct LabeledSet {
  std::vector<std::string> ids;
  std::vector<RgbImage> images;
  std::vector<LabelMap> labels;
  std::vector<DepthMap> depth;
  std::vector<EdgeMap> edges;

  std::size_t size() const noexcept { return images.size(); }
};

struct UnlabeledSet {
  std::vector<std::string> ids;
  std::vector<RgbImage> images;

  std::size_t size() const noexcept { return images.size(); }
};

// Loads splits listed in a dataset manifest. Only files named by the
// manifest are opened, and target-train loading opens image files only.
class DatasetReader {
 public:
  explicit DatasetReader(std::filesystem::path dir);

  const Manifest& manifest() const noexcept { return manifest_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

  // Throws ConfigError when the dataset was generated with an incompatible
  // scene (size, class count or depth range).
  void check_compatible(const RunConfig& cfg) const;

  // Edge ground truth comes from the manifest when extracted, otherwise it is
  // derived from the labels with `canny`.
  LabeledSet source_train(const edges::CannyParams& canny, int num_classes) const;
  UnlabeledSet target_train() const;
  LabeledSet target_eval() const;

 private:
  LabeledSet load_labeled(Domain domain, const std::string& split, bool need_depth) const;

  std::filesystem::path dir_;
  Manifest manifest_;
  double z_min_ = 1.0;
  double z_max_ = 1.0;
};

// N x 3 x H x W from interleaved images selected by `indices`.
Tensor images_to_tensor(std::span<const RgbImage> images, std::span<const std::size_t> indices);
// N x 1 x H x W of class ids (ignore stays 255).
Tensor labels_to_tensor(std::span<const LabelMap> labels, std::span<const std::size_t> indices);
Tensor depth_to_tensor(std::span<const DepthMap> depth, std::span<const std::size_t> indices);
Tensor edges_to_tensor(std::span<const EdgeMap> edges, std::span<const std::size_t> indices);

// Writes edge ground truth PGMs next to every labelled sample and records
// them in the manifest. Returns the number of edge maps written.
int extract_dataset_edges(const std::filesystem::path& dir, const edges::CannyParams& canny);

}  // namespace edgeuda::adapt
