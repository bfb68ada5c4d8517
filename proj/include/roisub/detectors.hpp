// Pluggable detectors producing measurement boxes for the Kalman filter.
//
// Deep detectors are out of scope; the trace detector replays boxes exported
// from any external model, and the noisy oracle perturbs ground truth, so the
// pipeline composition (detector -> b_t -> filter) stays faithful. Mean shift
// is implemented natively on color histograms.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roisub/geometry.hpp"
#include "roisub/image.hpp"
#include "roisub/rng.hpp"

namespace roisub {

struct Detection {
  BoundingBox box;
  bool valid = false;  // consumers ignore box when false
};

struct MeanShiftConfig {
  int bins_per_channel = 16;  // in [2, 256]
  int max_iters = 20;
  double epsilon = 1.0;  // pixels
};

/// Normalized joint color histogram of the seeded target region.
struct MeanShiftModel {
  MeanShiftConfig config;
  int channels = 0;
  std::vector<double> histogram;  // bins_per_channel^channels entries, sums to 1
};

/// Builds the target model from pixels inside seed_box. Throws
/// std::invalid_argument when the seed region is empty or out of frame.
MeanShiftModel init_mean_shift(const Image& frame, const BoundingBox& seed_box,
                               const MeanShiftConfig& config);

/// One tracking step: back-projection weights w(p) = sqrt(model[bin]/candidate[bin])
/// inside the current window, window center shifts to the weighted centroid,
/// until the shift drops below epsilon or max_iters is hit. The window size is
/// fixed. Returns an invalid Detection when the target color is absent.
Detection mean_shift_track(const MeanShiftModel& model, const Image& frame,
                           const BoundingBox& prev_box);

/// Detector selection plus per-variant parameters, JSON-configurable.
struct DetectorKind {
  enum class Type { oracle, trace, mean_shift };
  Type type = Type::oracle;

  // oracle
  double noise_sigma = 0.0;   // pixels, i.i.d. per coordinate
  double drop_rate = 0.0;     // probability of an invalid frame
  double box_scale = 1.0;     // ROI footprint emulation: gt scaled about its center
  std::uint64_t rng_seed = 0;

  // trace
  std::string trace_path;

  // mean_shift
  MeanShiftConfig mean_shift;
};

class Detector {
 public:
  virtual ~Detector() = default;

  /// True when detect() reads pixels (the pipeline must supply frames).
  virtual bool needs_frames() const { return false; }

  /// True when detect() cannot run without an annotation; the pipeline then
  /// treats absent-target frames as detector gaps instead of calling in.
  virtual bool requires_ground_truth() const { return false; }

  /// Called once with the first-frame annotation before any detect().
  virtual void seed(const Image* /*first_frame*/, const BoundingBox& /*first_box*/) {}

  /// frame may be null for detectors that do not read pixels; ground_truth is
  /// null when no annotation exists for the frame.
  virtual Detection detect(const Image* frame, int frame_index,
                           const BoundingBox* ground_truth) = 0;
};

/// Ground truth plus i.i.d. Gaussian noise, invalid with probability drop_rate.
/// Same seed, same detection stream.
class OracleDetector final : public Detector {
 public:
  OracleDetector(double noise_sigma, double drop_rate, std::uint64_t seed, double box_scale = 1.0);
  bool requires_ground_truth() const override { return true; }
  Detection detect(const Image* frame, int frame_index, const BoundingBox* ground_truth) override;

 private:
  double sigma_;
  double drop_rate_;
  double box_scale_;
  Rng rng_;
};

/// Replays a stored box per frame; degenerate entries are invalid frames.
class TraceDetector final : public Detector {
 public:
  explicit TraceDetector(std::vector<BoundingBox> trace);
  static TraceDetector from_file(const std::filesystem::path& path);
  Detection detect(const Image* frame, int frame_index, const BoundingBox* ground_truth) override;

 private:
  std::vector<BoundingBox> trace_;
};

class MeanShiftDetector final : public Detector {
 public:
  explicit MeanShiftDetector(const MeanShiftConfig& config) : config_(config) {}
  bool needs_frames() const override { return true; }
  void seed(const Image* first_frame, const BoundingBox& first_box) override;
  Detection detect(const Image* frame, int frame_index, const BoundingBox* ground_truth) override;

 private:
  MeanShiftConfig config_;
  std::optional<MeanShiftModel> model_;
  BoundingBox window_;  // last confirmed location
};

std::unique_ptr<Detector> make_detector(const DetectorKind& kind, std::uint64_t stream_seed);

}  // namespace roisub
