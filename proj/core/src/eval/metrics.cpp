#include "edgeuda/eval/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "edgeuda/error.hpp"

namespace edgeuda::eval {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {
  if (num_classes < 1) throw DomainError("confusion matrix needs at least one class");
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) throw ShapeError("confusion matrix class count");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion_matrix(const LabelMap& pred, const LabelMap& gt, int num_classes,
                                 int ignore_index) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw ShapeError("confusion_matrix: prediction and ground truth sizes differ");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const int g = gt.values[i];
    if (g == ignore_index) continue;
    const int p = pred.values[i];
    if (g >= num_classes || p >= num_classes) {
      throw DomainError("confusion_matrix: label id " + std::to_string(std::max(g, p)) +
                        " out of range for " + std::to_string(num_classes) + " classes");
    }
    ++cm(g, p);
  }
  return cm;
}

ConfusionMatrix confusion_matrix(std::span<const LabelMap> preds, std::span<const LabelMap> gts,
                                 int num_classes, int ignore_index) {
  if (preds.size() != gts.size()) throw ShapeError("confusion_matrix: image count differs");
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    cm += confusion_matrix(preds[i], gts[i], num_classes, ignore_index);
  }
  return cm;
}

IouReport iou_from_confusion(const ConfusionMatrix& cm) {
  const int c = cm.num_classes();
  IouReport r;
  r.iou.assign(c, std::numeric_limits<double>::quiet_NaN());
  r.present.assign(c, false);
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < c; ++k) {
    std::uint64_t row = 0, col = 0;
    for (int j = 0; j < c; ++j) {
      row += cm(k, j);
      col += cm(j, k);
    }
    const std::uint64_t tp = cm(k, k);
    const std::uint64_t denom = row + col - tp;
    if (denom == 0) continue;
    r.present[k] = true;
    r.iou[k] = static_cast<double>(tp) / static_cast<double>(denom);
    sum += r.iou[k];
    ++present;
  }
  if (present == 0) throw DomainError("iou_from_confusion: every class is absent");
  r.miou = sum / present;
  return r;
}

}  // namespace edgeuda::eval
