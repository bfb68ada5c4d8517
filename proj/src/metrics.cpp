#include "roisub/metrics.hpp"

#include <stdexcept>

namespace roisub {

std::vector<double> threshold_grid() {
  std::vector<double> grid(kThresholdCount);
  for (int i = 0; i < kThresholdCount; ++i) grid[static_cast<std::size_t>(i)] = i / 20.0;
  return grid;
}

double precision_at(std::span<const double> ious, double threshold) {
  if (ious.empty()) throw std::invalid_argument("precision_at: empty iou list");
  std::size_t count = 0;
  for (double v : ious)
    if (v > threshold) ++count;
  return static_cast<double>(count) / static_cast<double>(ious.size());
}

SuccessCurve success_curve(std::span<const double> ious) {
  SuccessCurve curve;
  curve.thresholds = threshold_grid();
  curve.precision.reserve(kThresholdCount);
  for (double t : curve.thresholds) curve.precision.push_back(precision_at(ious, t));
  return curve;
}

double auc(const SuccessCurve& curve) {
  if (curve.precision.empty()) throw std::invalid_argument("auc: empty curve");
  double sum = 0.0;
  for (double p : curve.precision) sum += p;
  return sum / static_cast<double>(curve.precision.size());
}

double sequence_auc(std::span<const double> ious) {
  if (ious.empty()) throw std::invalid_argument("sequence_auc: empty iou list");
  const auto grid = threshold_grid();
  std::size_t total = 0;
  for (double t : grid)
    for (double v : ious)
      if (v > t) ++total;
  return static_cast<double>(total) /
         (static_cast<double>(ious.size()) * static_cast<double>(kThresholdCount));
}

double dataset_auc(const std::vector<std::vector<double>>& per_sequence_ious) {
  if (per_sequence_ious.empty()) throw std::invalid_argument("dataset_auc: no sequences");
  double sum = 0.0;
  for (const auto& ious : per_sequence_ious) sum += sequence_auc(ious);
  return sum / static_cast<double>(per_sequence_ious.size());
}

}  // namespace roisub
