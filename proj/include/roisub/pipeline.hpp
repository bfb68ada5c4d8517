// Per-frame orchestration: keyframe scheduling, detector invocation, Kalman
// update/predict, mask generation, memoization and detector-chain modes.
//
// Timeline convention: frame t is a scheduled keyframe iff t mod (k+1) == 0,
// so k subsampled frames sit between consecutive keyframes and frame 0 is
// always a keyframe. The user-facing "keyframing interval" i maps to
// k = max(i-1, 0) predicted frames (interval 1 = detector on every frame).

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roisub/dataset_io.hpp"
#include "roisub/detectors.hpp"
#include "roisub/geometry.hpp"
#include "roisub/kalman_roi.hpp"

namespace roisub {

struct FrameSchedule {
  int keyframe_interval = 0;  // k: predicted frames between keyframes, >= 0

  bool is_keyframe(int t) const { return t % (keyframe_interval + 1) == 0; }

  int keyframe_count(int n_frames) const {
    const int period = keyframe_interval + 1;
    return (n_frames + period - 1) / period;
  }

  /// User-facing interval i -> k = max(i-1, 0).
  static FrameSchedule from_interval(int interval) {
    return {std::max(interval - 1, 0)};
  }
};

enum class PredictorMode { kalman, memoization, detector_chain };

std::string to_string(PredictorMode mode);

/// Per-stage cost accounting in milliseconds. User-calibrated constants; no
/// wall-clock measurement is involved.
struct LatencyModel {
  double capture_ms = 0.0;
  double preprocess_ms = 0.0;
  double detect_ms = 0.0;
  double postprocess_ms = 0.0;
  double kf_update_ms = 0.0;
  double kf_predict_ms = 0.0;

  double keyframe_cost_ms() const {
    return capture_ms + preprocess_ms + detect_ms + postprocess_ms + kf_update_ms;
  }
  double predict_cost_ms() const { return kf_predict_ms; }

  bool configured() const { return keyframe_cost_ms() > 0.0 || kf_predict_ms > 0.0; }
};

enum class FramePhase { update, prediction };

std::string to_string(FramePhase phase);

struct FrameRecord {
  int frame_index = 0;
  FramePhase phase = FramePhase::update;
  BoundingBox predicted_box;              // the box the run is scored on
  std::optional<Detection> detection;     // present when the detector ran
  std::int64_t active_pixels = 0;         // full resolution on keyframes
  double iou_vs_gt = 0.0;
  bool gt_valid = true;                   // false = absent annotation, excluded from metrics
  bool mask_empty = false;                // degenerate/out-of-frame prediction diagnostic
  double latency_ms = 0.0;                // algorithm cost of this frame
};

struct RunConfig {
  PredictorMode mode = PredictorMode::kalman;
  FrameSchedule schedule;
  ReadoutMode readout = ReadoutMode::window;
  KalmanParams kf_params = KalmanParams::constant_velocity();
  std::array<double, kStateDim> p0_diag = kDefaultP0Diag;
  LatencyModel latency;
};

/// Runs one sequence through the loop. Frame 0 seeds the detector and filter
/// from the first-frame annotation (which must be non-degenerate). Invalid
/// detections on a keyframe promote the next frame to a keyframe; the filter
/// keeps predicting in the meantime. Throws on frame/annotation mismatches,
/// with the frame index attached to detector errors.
std::vector<FrameRecord> run_sequence(const Sequence& sequence, Detector& detector,
                                      const RunConfig& config);

/// IoU samples usable for metrics: one per frame with a valid annotation.
std::vector<double> collect_ious(const std::vector<FrameRecord>& records);

struct FpsEstimate {
  double algorithm_fps = 0.0;
  double system_fps = 0.0;
};

/// algorithm: keyframes cost capture+preprocess+detect+postprocess+kf_update,
/// predicted frames cost kf_predict. system: capture charged on every frame.
/// Throws std::invalid_argument when the total latency is zero.
FpsEstimate fps_estimate(const std::vector<FrameRecord>& records, const LatencyModel& latency);

}  // namespace roisub
