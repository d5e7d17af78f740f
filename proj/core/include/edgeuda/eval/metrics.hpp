#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edgeuda/grid.hpp"

namespace edgeuda::eval {

// Rows are ground-truth classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const noexcept { return num_classes_; }
  std::uint64_t operator()(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * num_classes_ + pred];
  }
  std::uint64_t& operator()(int gt, int pred) {
    return counts_[static_cast<std::size_t>(gt) * num_classes_ + pred];
  }
  std::uint64_t total() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int num_classes_;
  std::vector<std::uint64_t> counts_;
};

// Pixels whose ground truth is `ignore_index` are skipped. Throws
// DomainError on any other id outside [0, num_classes).
ConfusionMatrix confusion_matrix(const LabelMap& pred, const LabelMap& gt, int num_classes,
                                 int ignore_index = kIgnoreLabel);
ConfusionMatrix confusion_matrix(std::span<const LabelMap> preds, std::span<const LabelMap> gts,
                                 int num_classes, int ignore_index = kIgnoreLabel);

struct IouReport {
  std::vector<double> iou;     // NaN for absent classes
  std::vector<bool> present;   // TP + FP + FN > 0
  double miou = 0.0;           // mean over present classes
};

// Throws DomainError when no class is present.
IouReport iou_from_confusion(const ConfusionMatrix& cm);

}  // namespace edgeuda::eval
