#include "roisub/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roisub/rng.hpp"

namespace roisub {

namespace fs = std::filesystem;

namespace {

bool is_nan_token(std::string_view tok) {
  if (tok.size() != 3) return false;
  return (tok[0] == 'n' || tok[0] == 'N') && (tok[1] == 'a' || tok[1] == 'A') &&
         (tok[2] == 'n' || tok[2] == 'N');
}

// Splits on commas, tabs, and spaces; empty fields from runs of separators
// are skipped so "1, 2" and "1\t2" both parse.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ',' || line[i] == '\t' || line[i] == ' ' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ',' && line[j] != '\t' && line[j] != ' ' && line[j] != '\r')
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view tok, int line_no) {
  if (is_nan_token(tok)) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto* begin = tok.data();
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw std::runtime_error("malformed annotation at line " + std::to_string(line_no) +
                             ": bad number '" + std::string(tok) + "'");
  return value;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_raw_rgb(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".rgb" || ext == ".RGB";
}

bool has_image_extension(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".ppm" || ext == ".pgm" || ext == ".PPM" || ext == ".PGM" || is_raw_rgb(p);
}

class DirectoryFrameSource final : public FrameSource {
 public:
  DirectoryFrameSource(std::vector<fs::path> files, std::optional<FrameDims> raw_dims)
      : files_(std::move(files)), raw_dims_(raw_dims) {}
  int count() const override { return static_cast<int>(files_.size()); }
  Image frame(int index) const override {
    if (index < 0 || index >= count())
      throw std::out_of_range("frame index out of range");
    const fs::path& path = files_[static_cast<std::size_t>(index)];
    if (is_raw_rgb(path)) return read_raw_rgb(path, *raw_dims_);
    return read_pnm(path);
  }

 private:
  std::vector<fs::path> files_;
  std::optional<FrameDims> raw_dims_;
};

class SyntheticFrameSource final : public FrameSource {
 public:
  SyntheticFrameSource(SyntheticSpec spec, std::vector<BoundingBox> trajectory)
      : spec_(std::move(spec)), trajectory_(std::move(trajectory)) {}
  int count() const override { return static_cast<int>(trajectory_.size()); }
  Image frame(int index) const override {
    Image img = Image::filled(spec_.dims.width, spec_.dims.height, 3, 0);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        for (int c = 0; c < 3; ++c)
          img.at(x, y, c) = spec_.background_color[static_cast<std::size_t>(c)];
    img.fill_rect(trajectory_[static_cast<std::size_t>(index)], spec_.target_color);
    return img;
  }

 private:
  SyntheticSpec spec_;
  std::vector<BoundingBox> trajectory_;
};

}  // namespace

std::vector<BoundingBox> load_box_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path.string());
  std::vector<BoundingBox> boxes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;  // blank line
    if (fields.size() != 4)
      throw std::runtime_error("malformed annotation at line " + std::to_string(line_no) +
                               ": expected 4 fields, got " + std::to_string(fields.size()));
    double v[4];
    for (int i = 0; i < 4; ++i) v[i] = parse_number(fields[static_cast<std::size_t>(i)], line_no);
    if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3]))
      boxes.push_back({0, 0, 0, 0});  // absent target
    else
      boxes.push_back({v[0], v[1], v[2], v[3]});
  }
  return boxes;
}

void write_box_file(const fs::path& path, const std::vector<BoundingBox>& boxes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write annotation file: " + path.string());
  for (const auto& b : boxes)
    out << format_full(b.x) << ',' << format_full(b.y) << ','
        << format_full(b.w) << ',' << format_full(b.h) << '\n';
}

void write_detection_trace(const fs::path& path,
                           const std::vector<std::pair<BoundingBox, bool>>& detections) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path.string());
  for (const auto& [box, valid] : detections) {
    if (!valid)
      out << "NaN,NaN,NaN,NaN\n";
    else
      out << format_full(box.x) << ',' << format_full(box.y) << ','
          << format_full(box.w) << ',' << format_full(box.h) << '\n';
  }
}

Image read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6")
    throw std::runtime_error("unsupported image format (want binary PGM/PPM): " + path.string());
  auto next_int = [&in, &path]() {
    // skip whitespace and '#' comments between header fields
    int c = in.peek();
    while (c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '#') {
      if (c == '#') in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
      else in.get();
      c = in.peek();
    }
    int v = -1;
    in >> v;
    if (!in || v < 0) throw std::runtime_error("malformed PNM header: " + path.string());
    return v;
  };
  Image img;
  img.width = next_int();
  img.height = next_int();
  const int maxval = next_int();
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error("unsupported PNM maxval (want <= 255): " + path.string());
  in.get();  // single whitespace after maxval
  img.channels = magic == "P6" ? 3 : 1;
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.data.size())
    throw std::runtime_error("truncated PNM pixel data: " + path.string());
  return img;
}

Image read_raw_rgb(const fs::path& path, FrameDims dims) {
  if (!dims.valid()) throw std::invalid_argument("read_raw_rgb: dims must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path.string());
  Image img;
  img.width = dims.width;
  img.height = dims.height;
  img.channels = 3;
  img.data.resize(static_cast<std::size_t>(dims.width) * dims.height * 3);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.data.size() || in.peek() != EOF)
    throw std::runtime_error("raw RGB size does not match dims for " + path.string());
  return img;
}

void write_pnm(const fs::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("write_pnm: 1 or 3 channels only");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path.string());
  out << (img.channels == 3 ? "P6" : "P5") << '\n'
      << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
}

Sequence load_sequence(const fs::path& annotation_path,
                       const std::optional<fs::path>& frames_dir,
                       std::optional<FrameDims> dims, const std::string& id) {
  Sequence seq;
  seq.id = id.empty() ? annotation_path.parent_path().filename().string() : id;
  seq.ground_truth = load_box_file(annotation_path);
  if (seq.ground_truth.empty())
    throw std::runtime_error("annotation file has no frames: " + annotation_path.string());

  if (frames_dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(*frames_dir))
      if (entry.is_regular_file() && has_image_extension(entry.path()))
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.size() != seq.ground_truth.size())
      throw std::runtime_error("frame/annotation count mismatch for " + seq.id + ": " +
                               std::to_string(files.size()) + " images vs " +
                               std::to_string(seq.ground_truth.size()) + " annotations");
    if (is_raw_rgb(files.front())) {
      if (!dims)
        throw std::runtime_error("raw RGB frames need explicit dims for " + seq.id);
      seq.dims = *dims;
    } else {
      const Image first = read_pnm(files.front());
      seq.dims = {first.width, first.height};
    }
    seq.frames = std::make_shared<DirectoryFrameSource>(std::move(files), seq.dims);
  } else if (dims) {
    seq.dims = *dims;
  } else {
    // Annotation-only sequence: take the ceiling envelope of the boxes.
    double mx = 1.0, my = 1.0;
    for (const auto& b : seq.ground_truth) {
      mx = std::max(mx, b.x2());
      my = std::max(my, b.y2());
    }
    seq.dims = {static_cast<int>(std::ceil(mx)), static_cast<int>(std::ceil(my))};
  }
  if (!seq.dims.valid())
    throw std::runtime_error("sequence has non-positive dims: " + seq.id);
  return seq;
}

namespace {

std::optional<fs::path> find_annotation(const fs::path& dir) {
  for (const char* name : {"groundtruth_rect.txt", "groundtruth.txt"}) {
    fs::path p = dir / name;
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> list_dataset(const fs::path& root) {
  if (!fs::is_directory(root))
    throw std::runtime_error("dataset root is not a directory: " + root.string());
  std::vector<std::string> ids;
  std::vector<fs::path> level1;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) level1.push_back(entry.path());
  std::sort(level1.begin(), level1.end());
  for (const auto& dir : level1) {
    if (find_annotation(dir)) {
      ids.push_back(dir.filename().string());
      continue;
    }
    // LaSOT-style class directory: flatten one level.
    std::vector<fs::path> level2;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_directory() && find_annotation(entry.path())) level2.push_back(entry.path());
    std::sort(level2.begin(), level2.end());
    for (const auto& seq_dir : level2) ids.push_back(seq_dir.filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Sequence load_dataset_sequence(const fs::path& root, const std::string& id, bool want_frames,
                               std::optional<FrameDims> dims) {
  std::vector<fs::path> candidates = {root / id};
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) candidates.push_back(entry.path() / id);
  for (const auto& dir : candidates) {
    if (!fs::is_directory(dir)) continue;
    auto annotation = find_annotation(dir);
    if (!annotation) continue;
    std::optional<fs::path> frames_dir;
    if (want_frames)
      for (const char* sub : {"img", "frames"})
        if (fs::is_directory(dir / sub)) {
          frames_dir = dir / sub;
          break;
        }
    if (want_frames && !frames_dir)
      throw std::runtime_error("sequence " + id + " has no img/ or frames/ directory");
    return load_sequence(*annotation, frames_dir, dims, id);
  }
  throw std::runtime_error("sequence not found in dataset: " + id);
}

Sequence generate_synthetic(const SyntheticSpec& spec) {
  if (!spec.dims.valid()) throw std::invalid_argument("generate_synthetic: dims must be positive");
  if (spec.box_w > spec.dims.width || spec.box_h > spec.dims.height)
    throw std::invalid_argument("generate_synthetic: box larger than frame");
  if (spec.n_frames <= 0) throw std::invalid_argument("generate_synthetic: need at least one frame");

  const double max_x = spec.dims.width - spec.box_w;
  const double max_y = spec.dims.height - spec.box_h;
  const double x0 = std::clamp(spec.start_x.value_or(max_x / 2.0), 0.0, max_x);
  const double y0 = std::clamp(spec.start_y.value_or(max_y / 2.0), 0.0, max_y);

  std::vector<BoundingBox> gt;
  gt.reserve(static_cast<std::size_t>(spec.n_frames));
  Rng rng(spec.rng_seed);
  double wx = x0, wy = y0;  // random-walk cursor
  for (int t = 0; t < spec.n_frames; ++t) {
    double px = x0, py = y0;
    switch (spec.motion.type) {
      case MotionType::constant_velocity:
        px = x0 + spec.motion.vx * t;
        py = y0 + spec.motion.vy * t;
        break;
      case MotionType::sinusoidal: {
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double phase = two_pi * t / spec.motion.period;
        px = x0 + spec.motion.amplitude * std::sin(phase);
        py = y0 + spec.motion.amplitude / 2.0 * std::sin(2.0 * phase);
        break;
      }
      case MotionType::random_walk:
        if (t > 0) {
          wx += spec.motion.step_sigma * rng.gaussian();
          wy += spec.motion.step_sigma * rng.gaussian();
          wx = std::clamp(wx, 0.0, max_x);
          wy = std::clamp(wy, 0.0, max_y);
        }
        px = wx;
        py = wy;
        break;
    }
    gt.push_back({std::clamp(px, 0.0, max_x), std::clamp(py, 0.0, max_y), spec.box_w, spec.box_h});
  }

  Sequence seq;
  seq.id = spec.id;
  seq.dims = spec.dims;
  seq.ground_truth = std::move(gt);
  seq.frames = std::make_shared<SyntheticFrameSource>(spec, seq.ground_truth);
  return seq;
}

void write_synthetic_dataset(const fs::path& dir, const SyntheticSpec& spec) {
  const Sequence seq = generate_synthetic(spec);
  const fs::path seq_dir = dir / spec.id;
  const fs::path img_dir = seq_dir / "img";
  fs::create_directories(img_dir);
  write_box_file(seq_dir / "groundtruth_rect.txt", seq.ground_truth);
  char name[32];
  for (int t = 0; t < seq.frame_count(); ++t) {
    std::snprintf(name, sizeof name, "%06d.ppm", t + 1);
    write_pnm(img_dir / name, seq.frames->frame(t));
  }
}

}  // namespace roisub
