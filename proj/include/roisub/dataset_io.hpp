// OTB/LaSOT-style sequence ingestion, the ground-truth/trace text grammar,
// minimal PPM/PGM image I/O, and the synthetic sequence generator.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roisub/geometry.hpp"
#include "roisub/image.hpp"

namespace roisub {

/// Lazy per-frame pixel source. Sequences without pixel data (annotation-only
/// runs with oracle or trace detectors) simply have no source attached.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual int count() const = 0;
  virtual Image frame(int index) const = 0;
};

struct Sequence {
  std::string id;
  FrameDims dims;
  std::vector<BoundingBox> ground_truth;  // one per frame; degenerate = target absent
  std::shared_ptr<const FrameSource> frames;  // may be null
  double fps = 30.0;

  int frame_count() const { return static_cast<int>(ground_truth.size()); }
  bool gt_valid(int t) const { return !ground_truth[static_cast<std::size_t>(t)].degenerate(); }
};

// --- ground-truth / trace grammar ------------------------------------------
// UTF-8 text, one frame per line, 4 numbers separated by "," or whitespace.
// "NaN" tokens mark an invalid frame and load as the degenerate box
// (0,0,0,0); all-zero lines already are degenerate. Detector dumps and
// annotations interchange.

/// Throws std::runtime_error naming the 1-based line number on malformed input.
std::vector<BoundingBox> load_box_file(const std::filesystem::path& path);

/// Writes boxes with round-trip precision (17 significant digits).
void write_box_file(const std::filesystem::path& path, const std::vector<BoundingBox>& boxes);

/// Same grammar, invalid frames written as "NaN,NaN,NaN,NaN".
void write_detection_trace(const std::filesystem::path& path,
                           const std::vector<std::pair<BoundingBox, bool>>& detections);

// --- image files ------------------------------------------------------------

/// Binary PPM (P6) / PGM (P5) reader. Throws on malformed headers.
Image read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const Image& img);

/// Headerless interleaved RGB8; the file must hold exactly width*height*3 bytes.
Image read_raw_rgb(const std::filesystem::path& path, FrameDims dims);

// --- dataset loading ---------------------------------------------------------

/// Loads one sequence. If frames_dir is given, image count must match the
/// annotation count and dims come from the first frame; otherwise dims come
/// from the `dims` argument or, failing that, the ceiling envelope of the
/// annotations.
Sequence load_sequence(const std::filesystem::path& annotation_path,
                       const std::optional<std::filesystem::path>& frames_dir = std::nullopt,
                       std::optional<FrameDims> dims = std::nullopt,
                       const std::string& id = "");

/// Sequence ids under a dataset root in deterministic lexicographic order.
/// Both flat OTB-style (root/seq/groundtruth_rect.txt) and nested LaSOT-style
/// (root/class/class-1/groundtruth.txt) layouts are recognized; nested
/// layouts flatten to the sequence directory name.
std::vector<std::string> list_dataset(const std::filesystem::path& root);

/// Resolves a sequence id from list_dataset back to its annotation file and
/// frame directory (an "img"/"frames" subdirectory when present).
Sequence load_dataset_sequence(const std::filesystem::path& root, const std::string& id,
                               bool want_frames, std::optional<FrameDims> dims = std::nullopt);

// --- synthetic sequences ------------------------------------------------------

enum class MotionType { constant_velocity, sinusoidal, random_walk };

struct MotionSpec {
  MotionType type = MotionType::constant_velocity;
  double vx = 0.0, vy = 0.0;        // constant_velocity
  double amplitude = 0.0, period = 60.0;  // sinusoidal
  double step_sigma = 1.0;          // random_walk
};

struct SyntheticSpec {
  std::string id = "synthetic";
  FrameDims dims{64, 64};
  int n_frames = 100;
  MotionSpec motion;
  double box_w = 10.0, box_h = 10.0;
  std::optional<double> start_x, start_y;  // top-left; defaults to centered
  std::array<std::uint8_t, 3> target_color{200, 60, 60};
  std::array<std::uint8_t, 3> background_color{30, 30, 120};
  std::uint64_t rng_seed = 0;
};

/// Deterministic given rng_seed; the trajectory is clamped so the box never
/// leaves the frame. Throws std::invalid_argument when the box exceeds the
/// frame. Rendered frames are a solid target-color rectangle on background.
Sequence generate_synthetic(const SyntheticSpec& spec);

/// Writes frames (PPM) plus groundtruth.txt under dir/<spec.id>/.
void write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticSpec& spec);

}  // namespace roisub
