// Success plots and AUC scoring over IoU thresholds.
//
// Precision counts frames with iou strictly greater than the threshold (the
// convention OTB toolkits disagree on); a perfect tracker therefore tops out
// at AUC 20/21, since iou <= 1 can never exceed the threshold 1.0.

#pragma once

#include <span>
#include <vector>

namespace roisub {

/// 21 thresholds 0.00, 0.05, ..., 1.00.
inline constexpr int kThresholdCount = 21;

std::vector<double> threshold_grid();

/// Fraction of frames with iou > threshold. Throws std::invalid_argument on
/// an empty list.
double precision_at(std::span<const double> ious, double threshold);

struct SuccessCurve {
  std::vector<double> thresholds;
  std::vector<double> precision;  // non-increasing in threshold
};

SuccessCurve success_curve(std::span<const double> ious);

/// Arithmetic mean of the 21 precision values.
double auc(const SuccessCurve& curve);

/// AUC straight from an iou list in exact counting form,
/// sum(counts) / (21 * n). Agrees with auc(success_curve(ious)) to roundoff;
/// this form matches a (frame x threshold) counting oracle bit for bit, so it
/// is what the harness and dataset aggregation use.
double sequence_auc(std::span<const double> ious);

/// Per-sequence AUC averaged uniformly over sequences (OTB convention).
/// Throws std::invalid_argument on empty input.
double dataset_auc(const std::vector<std::vector<double>>& per_sequence_ious);

}  // namespace roisub
