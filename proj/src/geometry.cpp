#include "roisub/geometry.hpp"
#include "roisub/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roisub {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix1 = std::max(a.x, b.x);
  const double iy1 = std::max(a.y, b.y);
  const double ix2 = std::min(a.x2(), b.x2());
  const double iy2 = std::min(a.y2(), b.y2());
  const double iw = ix2 - ix1;
  const double ih = iy2 - iy1;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  // Corner-form intersection can exceed the area-form union by an ulp for
  // identical boxes with non-round coordinates; the ratio never exceeds 1.
  return std::min(inter / uni, 1.0);
}

std::string to_string(ReadoutMode mode) {
  return mode == ReadoutMode::window ? "window" : "column_skip";
}

SensorMask rasterize_mask(const BoundingBox& pred, FrameDims dims, ReadoutMode mode) {
  if (!dims.valid()) throw std::invalid_argument("rasterize_mask: frame dims must be positive");
  SensorMask mask;
  mask.dims = dims;
  mask.mode = mode;
  // Outward rounding, then clip to the frame. A fully outside or degenerate
  // prediction collapses to an empty mask.
  const int rx0 = static_cast<int>(std::floor(pred.x));
  const int ry0 = static_cast<int>(std::floor(pred.y));
  const int rx1 = static_cast<int>(std::ceil(pred.x2()));
  const int ry1 = static_cast<int>(std::ceil(pred.y2()));
  mask.x0 = std::clamp(rx0, 0, dims.width);
  mask.x1 = std::clamp(rx1, 0, dims.width);
  mask.y0 = std::clamp(ry0, 0, dims.height);
  mask.y1 = std::clamp(ry1, 0, dims.height);
  if (mask.empty()) mask.x0 = mask.x1 = mask.y0 = mask.y1 = 0;
  return mask;
}

std::int64_t active_pixel_count(const SensorMask& mask) {
  if (mask.empty()) return 0;
  const std::int64_t cols = mask.x1 - mask.x0;
  if (mask.mode == ReadoutMode::column_skip)
    return cols * mask.dims.height;
  return cols * (mask.y1 - mask.y0);
}

Image Image::filled(int w, int h, int c, std::uint8_t value) {
  Image img;
  img.width = w;
  img.height = h;
  img.channels = c;
  img.data.assign(static_cast<std::size_t>(w) * h * c, value);
  return img;
}

void Image::fill_rect(const BoundingBox& box, const std::array<std::uint8_t, 3>& color) {
  const SensorMask r = rasterize_mask(box, dims(), ReadoutMode::window);
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x)
      for (int c = 0; c < channels; ++c)
        at(x, y, c) = color[static_cast<std::size_t>(c)];
}

Image subsample(const Image& frame, const SensorMask& mask) {
  if (frame.width != mask.dims.width || frame.height != mask.dims.height)
    throw std::invalid_argument("subsample: frame dims do not match mask dims");
  Image out = Image::filled(frame.width, frame.height, frame.channels, 0);
  const int y0 = mask.mode == ReadoutMode::column_skip ? 0 : mask.y0;
  const int y1 = mask.mode == ReadoutMode::column_skip ? frame.height : mask.y1;
  if (mask.empty()) return out;
  for (int y = y0; y < y1; ++y)
    for (int x = mask.x0; x < mask.x1; ++x)
      for (int c = 0; c < frame.channels; ++c)
        out.at(x, y, c) = frame.at(x, y, c);
  return out;
}

}  // namespace roisub
