#include "roisub/detectors.hpp"

#include <cmath>
#include <stdexcept>

#include "roisub/dataset_io.hpp"

namespace roisub {

namespace {

void validate(const MeanShiftConfig& config) {
  if (config.bins_per_channel < 2 || config.bins_per_channel > 256)
    throw std::invalid_argument("mean shift: bins_per_channel must be in [2, 256]");
  if (config.max_iters < 1)
    throw std::invalid_argument("mean shift: max_iters must be >= 1");
}

std::size_t bin_index(const Image& img, int x, int y, int bins) {
  std::size_t idx = 0;
  for (int c = 0; c < img.channels; ++c)
    idx = idx * static_cast<std::size_t>(bins) + img.at(x, y, c) * bins / 256;
  return idx;
}

}  // namespace

MeanShiftModel init_mean_shift(const Image& frame, const BoundingBox& seed_box,
                               const MeanShiftConfig& config) {
  validate(config);
  if (seed_box.degenerate())
    throw std::invalid_argument("mean shift: degenerate seed box");
  const SensorMask region = rasterize_mask(seed_box, frame.dims(), ReadoutMode::window);
  if (region.empty())
    throw std::invalid_argument("mean shift: seed box outside frame");

  MeanShiftModel model;
  model.config = config;
  model.channels = frame.channels;
  std::size_t size = 1;
  for (int c = 0; c < frame.channels; ++c) size *= static_cast<std::size_t>(config.bins_per_channel);
  model.histogram.assign(size, 0.0);

  std::int64_t n = 0;
  for (int y = region.y0; y < region.y1; ++y)
    for (int x = region.x0; x < region.x1; ++x) {
      model.histogram[bin_index(frame, x, y, config.bins_per_channel)] += 1.0;
      ++n;
    }
  for (double& v : model.histogram) v /= static_cast<double>(n);
  return model;
}

Detection mean_shift_track(const MeanShiftModel& model, const Image& frame,
                           const BoundingBox& prev_box) {
  double cx = prev_box.cx();
  double cy = prev_box.cy();
  const double w = prev_box.w;
  const double h = prev_box.h;
  std::vector<double> candidate(model.histogram.size());

  for (int iter = 0; iter < model.config.max_iters; ++iter) {
    const BoundingBox window{cx - w / 2.0, cy - h / 2.0, w, h};
    const SensorMask region = rasterize_mask(window, frame.dims(), ReadoutMode::window);
    if (region.empty()) return {};

    std::fill(candidate.begin(), candidate.end(), 0.0);
    std::int64_t n = 0;
    for (int y = region.y0; y < region.y1; ++y)
      for (int x = region.x0; x < region.x1; ++x) {
        candidate[bin_index(frame, x, y, model.config.bins_per_channel)] += 1.0;
        ++n;
      }
    for (double& v : candidate) v /= static_cast<double>(n);

    double wsum = 0.0, wx = 0.0, wy = 0.0;
    for (int y = region.y0; y < region.y1; ++y)
      for (int x = region.x0; x < region.x1; ++x) {
        const std::size_t b = bin_index(frame, x, y, model.config.bins_per_channel);
        if (model.histogram[b] <= 0.0 || candidate[b] <= 0.0) continue;
        const double weight = std::sqrt(model.histogram[b] / candidate[b]);
        wsum += weight;
        wx += weight * (x + 0.5);
        wy += weight * (y + 0.5);
      }
    if (wsum <= 0.0) return {};  // target color absent in the window

    const double nx = wx / wsum;
    const double ny = wy / wsum;
    const double shift = std::hypot(nx - cx, ny - cy);
    cx = nx;
    cy = ny;
    if (shift < model.config.epsilon) break;
  }
  return {{cx - w / 2.0, cy - h / 2.0, w, h}, true};
}

OracleDetector::OracleDetector(double noise_sigma, double drop_rate, std::uint64_t seed,
                               double box_scale)
    : sigma_(noise_sigma), drop_rate_(drop_rate), box_scale_(box_scale), rng_(seed) {
  if (noise_sigma < 0.0) throw std::invalid_argument("oracle: noise_sigma must be >= 0");
  if (drop_rate < 0.0 || drop_rate > 1.0)
    throw std::invalid_argument("oracle: drop_rate must be in [0, 1]");
}

Detection OracleDetector::detect(const Image*, int, const BoundingBox* ground_truth) {
  if (ground_truth == nullptr)
    throw std::runtime_error("oracle detector requires ground truth");
  if (drop_rate_ > 0.0 && rng_.uniform() < drop_rate_) return {};
  BoundingBox box = box_scale_ == 1.0 ? *ground_truth : ground_truth->scaled(box_scale_);
  if (sigma_ > 0.0) {
    box.x += sigma_ * rng_.gaussian();
    box.y += sigma_ * rng_.gaussian();
    box.w = std::max(0.0, box.w + sigma_ * rng_.gaussian());
    box.h = std::max(0.0, box.h + sigma_ * rng_.gaussian());
  }
  return {box, true};
}

TraceDetector::TraceDetector(std::vector<BoundingBox> trace) : trace_(std::move(trace)) {}

TraceDetector TraceDetector::from_file(const std::filesystem::path& path) {
  return TraceDetector(load_box_file(path));
}

Detection TraceDetector::detect(const Image*, int frame_index, const BoundingBox*) {
  if (frame_index < 0 || static_cast<std::size_t>(frame_index) >= trace_.size())
    throw std::out_of_range("trace detector: frame " + std::to_string(frame_index) +
                            " outside trace of " + std::to_string(trace_.size()) + " frames");
  const BoundingBox& box = trace_[static_cast<std::size_t>(frame_index)];
  if (box.degenerate()) return {};
  return {box, true};
}

void MeanShiftDetector::seed(const Image* first_frame, const BoundingBox& first_box) {
  if (first_frame == nullptr)
    throw std::runtime_error("mean shift detector needs pixel frames");
  model_ = init_mean_shift(*first_frame, first_box, config_);
  window_ = first_box;
}

Detection MeanShiftDetector::detect(const Image* frame, int, const BoundingBox*) {
  if (!model_) throw std::runtime_error("mean shift detector was not seeded");
  if (frame == nullptr) throw std::runtime_error("mean shift detector needs pixel frames");
  Detection det = mean_shift_track(*model_, *frame, window_);
  if (det.valid) window_ = det.box;
  return det;
}

std::unique_ptr<Detector> make_detector(const DetectorKind& kind, std::uint64_t stream_seed) {
  switch (kind.type) {
    case DetectorKind::Type::oracle:
      return std::make_unique<OracleDetector>(kind.noise_sigma, kind.drop_rate,
                                              mix_seed(kind.rng_seed, stream_seed), kind.box_scale);
    case DetectorKind::Type::trace:
      return std::make_unique<TraceDetector>(TraceDetector::from_file(kind.trace_path));
    case DetectorKind::Type::mean_shift:
      return std::make_unique<MeanShiftDetector>(kind.mean_shift);
  }
  throw std::logic_error("unknown detector kind");
}

}  // namespace roisub
