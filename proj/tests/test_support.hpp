// Shared helpers for the unit and acceptance suites.

#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "roisub/dataset_io.hpp"
#include "roisub/experiment.hpp"
#include "roisub/rng.hpp"

namespace roisub::testing {

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("roisub_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Constant-velocity suite on a frame large enough that no trajectory clamps:
/// speeds and headings vary per sequence, deterministically from `seed`.
inline std::vector<SyntheticSpec> cv_suite(int n_sequences, int n_frames, std::uint64_t seed,
                                           double min_speed = 1.5, double max_speed = 2.5) {
  std::vector<SyntheticSpec> specs;
  Rng rng(seed);
  for (int i = 0; i < n_sequences; ++i) {
    SyntheticSpec spec;
    spec.id = "cv" + std::to_string(i);
    spec.dims = {1024, 1024};
    spec.n_frames = n_frames;
    spec.box_w = 24;
    spec.box_h = 24;
    const double speed = min_speed + (max_speed - min_speed) * rng.uniform();
    const double heading = rng.uniform() * 6.283185307179586;
    spec.motion.type = MotionType::constant_velocity;
    spec.motion.vx = speed * std::cos(heading);
    spec.motion.vy = speed * std::sin(heading);
    // start in the middle so |v| * n_frames stays inside the frame
    spec.start_x = 500.0;
    spec.start_y = 500.0;
    spec.rng_seed = seed + static_cast<std::uint64_t>(i) + 1;
    specs.push_back(spec);
  }
  return specs;
}

inline std::vector<SyntheticSpec> static_suite(int n_sequences, int n_frames, std::uint64_t seed) {
  auto specs = cv_suite(n_sequences, n_frames, seed);
  for (auto& spec : specs) {
    spec.id = "static" + spec.id;
    spec.motion.vx = 0.0;
    spec.motion.vy = 0.0;
  }
  return specs;
}

inline double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace roisub::testing
