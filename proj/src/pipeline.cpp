#include "roisub/pipeline.hpp"

#include <stdexcept>

namespace roisub {

std::string to_string(PredictorMode mode) {
  switch (mode) {
    case PredictorMode::kalman: return "kalman";
    case PredictorMode::memoization: return "memoization";
    case PredictorMode::detector_chain: return "detector_chain";
  }
  return "?";
}

std::string to_string(FramePhase phase) {
  return phase == FramePhase::update ? "update" : "prediction";
}

namespace {

Image fetch_frame(const Sequence& seq, int t, bool needed) {
  if (!needed) return {};
  if (!seq.frames)
    throw std::runtime_error("sequence " + seq.id + " has no pixel frames but the detector needs them");
  return seq.frames->frame(t);
}

}  // namespace

std::vector<FrameRecord> run_sequence(const Sequence& seq, Detector& detector,
                                      const RunConfig& config) {
  const int n = seq.frame_count();
  if (n == 0) throw std::invalid_argument("run_sequence: empty sequence");
  if (seq.frames && seq.frames->count() != n)
    throw std::invalid_argument("run_sequence: frame/annotation count mismatch in " + seq.id);
  const BoundingBox& first = seq.ground_truth.front();
  if (first.degenerate())
    throw std::invalid_argument("run_sequence: degenerate first-frame annotation in " + seq.id);

  const bool needs_pixels = detector.needs_frames();
  const bool needs_gt = detector.requires_ground_truth();
  const std::int64_t full_pixels = seq.dims.pixel_count();

  // Frame 0: seed everything from the first-frame annotation, full readout.
  {
    const Image frame0 = fetch_frame(seq, 0, needs_pixels);
    detector.seed(needs_pixels ? &frame0 : nullptr, first);
  }
  std::optional<RoiKalmanFilter> filter;
  if (config.mode == PredictorMode::kalman)
    filter.emplace(first, config.kf_params, config.p0_diag);
  BoundingBox held_box = first;  // memoization latch / detector-chain output

  std::vector<FrameRecord> records;
  records.reserve(static_cast<std::size_t>(n));

  FrameRecord rec0;
  rec0.frame_index = 0;
  rec0.phase = FramePhase::update;
  rec0.predicted_box = first;
  rec0.active_pixels = full_pixels;
  rec0.gt_valid = true;
  rec0.iou_vs_gt = 1.0;
  rec0.latency_ms = config.latency.keyframe_cost_ms();
  records.push_back(rec0);

  bool force_keyframe = false;
  for (int t = 1; t < n; ++t) {
    const BoundingBox& gt = seq.ground_truth[static_cast<std::size_t>(t)];
    const bool gt_valid = !gt.degenerate();
    const bool keyframe = config.schedule.is_keyframe(t) || force_keyframe;

    FrameRecord rec;
    rec.frame_index = t;
    rec.gt_valid = gt_valid;

    if (keyframe) {
      rec.phase = FramePhase::update;
      rec.active_pixels = full_pixels;
      rec.latency_ms = config.latency.keyframe_cost_ms();

      Image frame;
      if (needs_pixels) frame = fetch_frame(seq, t, true);
      Detection det;
      if (!needs_gt || gt_valid) {
        try {
          det = detector.detect(needs_pixels ? &frame : nullptr, t, gt_valid ? &gt : nullptr);
        } catch (const std::exception& e) {
          throw std::runtime_error("detector failed at frame " + std::to_string(t) + " of " +
                                   seq.id + ": " + e.what());
        }
      }
      rec.detection = det;

      if (config.mode == PredictorMode::kalman) filter->predict();
      if (det.valid) {
        force_keyframe = false;
        switch (config.mode) {
          case PredictorMode::kalman:
            filter->update(det.box);
            break;
          case PredictorMode::memoization:
          case PredictorMode::detector_chain:
            held_box = det.box;
            break;
        }
        rec.predicted_box = det.box;
      } else {
        // Detector gap: keep the current estimate, retry next frame.
        force_keyframe = true;
        rec.predicted_box =
            config.mode == PredictorMode::kalman ? filter->box() : held_box;
      }
    } else {
      rec.phase = FramePhase::prediction;
      rec.latency_ms = config.latency.predict_cost_ms();

      switch (config.mode) {
        case PredictorMode::kalman: {
          rec.predicted_box = filter->predict();
          const SensorMask mask = rasterize_mask(rec.predicted_box, seq.dims, config.readout);
          rec.active_pixels = active_pixel_count(mask);
          rec.mask_empty = mask.empty();
          break;
        }
        case PredictorMode::memoization: {
          rec.predicted_box = held_box;  // latched keyframe ROI, no state evolution
          const SensorMask mask = rasterize_mask(held_box, seq.dims, config.readout);
          rec.active_pixels = active_pixel_count(mask);
          rec.mask_empty = mask.empty();
          rec.latency_ms = 0.0;  // reuse costs nothing
          break;
        }
        case PredictorMode::detector_chain: {
          // The previous output masks this frame; the detector then runs on
          // the subsampled image and its output masks the next frame.
          const SensorMask mask = rasterize_mask(held_box, seq.dims, config.readout);
          rec.active_pixels = active_pixel_count(mask);
          rec.mask_empty = mask.empty();
          Detection det;
          if (!needs_gt || gt_valid) {
            try {
              if (needs_pixels) {
                const Image masked = subsample(fetch_frame(seq, t, true), mask);
                det = detector.detect(&masked, t, gt_valid ? &gt : nullptr);
              } else {
                det = detector.detect(nullptr, t, gt_valid ? &gt : nullptr);
              }
            } catch (const std::exception& e) {
              throw std::runtime_error("detector failed at frame " + std::to_string(t) + " of " +
                                       seq.id + ": " + e.what());
            }
          }
          rec.detection = det;
          if (det.valid) held_box = det.box;
          rec.predicted_box = held_box;
          // The chain runs the full detector path on every frame.
          rec.latency_ms = config.latency.preprocess_ms + config.latency.detect_ms +
                           config.latency.postprocess_ms;
          break;
        }
      }
    }

    rec.iou_vs_gt = gt_valid ? iou(rec.predicted_box, gt) : 0.0;
    records.push_back(rec);
  }
  return records;
}

std::vector<double> collect_ious(const std::vector<FrameRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records)
    if (r.gt_valid) out.push_back(r.iou_vs_gt);
  return out;
}

FpsEstimate fps_estimate(const std::vector<FrameRecord>& records, const LatencyModel& latency) {
  if (records.empty()) throw std::invalid_argument("fps_estimate: no records");
  double algorithm_ms = 0.0;
  double system_ms = 0.0;
  for (const auto& r : records) {
    const double cost = r.phase == FramePhase::update ? latency.keyframe_cost_ms()
                                                      : latency.predict_cost_ms();
    algorithm_ms += cost;
    // System adds the capture delay on every frame; keyframes already carry it.
    system_ms += cost + (r.phase == FramePhase::prediction ? latency.capture_ms : 0.0);
  }
  if (algorithm_ms <= 0.0)
    throw std::invalid_argument("fps_estimate: total latency is zero");
  const double n = static_cast<double>(records.size());
  return {n * 1000.0 / algorithm_ms, n * 1000.0 / system_ms};
}

}  // namespace roisub
