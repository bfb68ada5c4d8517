// Bounding boxes, IoU, and sensor-mask rasterization.

#pragma once

#include <cstdint>
#include <string>

namespace roisub {

/// Axis-aligned rectangle in pixel coordinates, stored as (x, y, w, h)
/// with real-valued fields. Matches the OTB/LaSOT annotation layout.
struct BoundingBox {
  double x = 0.0;  // left edge
  double y = 0.0;  // top edge
  double w = 0.0;
  double h = 0.0;

  static BoundingBox from_corners(double x1, double y1, double x2, double y2) {
    return {x1, y1, x2 - x1, y2 - y1};
  }

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  double area() const { return w * h; }

  /// Zero-area boxes are legal values but carry no extent.
  bool degenerate() const { return !(w > 0.0) || !(h > 0.0); }

  BoundingBox translated(double dx, double dy) const { return {x + dx, y + dy, w, h}; }

  /// Scaled about the center; width/height multiply by `factor`.
  BoundingBox scaled(double factor) const {
    const double nw = w * factor, nh = h * factor;
    return {cx() - nw / 2.0, cy() - nh / 2.0, nw, nh};
  }

  bool operator==(const BoundingBox&) const = default;
};

/// IoU as a total function: 0 when the union has zero area (two degenerate
/// boxes) or the intersection is empty.
double iou(const BoundingBox& a, const BoundingBox& b);

struct FrameDims {
  int width = 0;
  int height = 0;

  std::int64_t pixel_count() const {
    return static_cast<std::int64_t>(width) * height;
  }
  bool valid() const { return width > 0 && height > 0; }
  bool operator==(const FrameDims&) const = default;
};

enum class ReadoutMode { window, column_skip };

std::string to_string(ReadoutMode mode);

/// Binary per-pixel readout mask. The active region is a half-open integer
/// rectangle [x0,x1)x[y0,y1) clipped to the frame; in column_skip mode the
/// sensor reads the full height of every active column.
struct SensorMask {
  FrameDims dims;
  ReadoutMode mode = ReadoutMode::window;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool empty() const { return x1 <= x0 || y1 <= y0; }

  bool active(int px, int py) const {
    if (empty() || px < x0 || px >= x1) return false;
    if (mode == ReadoutMode::column_skip) return py >= 0 && py < dims.height;
    return py >= y0 && py < y1;
  }
};

/// Rounds the predicted box outward (floor on the near edges, ceil on the
/// far edges) and clips it to the frame, so discretization never trims the
/// true ROI. Out-of-frame predictions yield an empty mask, not an error.
SensorMask rasterize_mask(const BoundingBox& pred, FrameDims dims, ReadoutMode mode);

std::int64_t active_pixel_count(const SensorMask& mask);

}  // namespace roisub
