#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "roisub/geometry.hpp"

namespace roisub {

/// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  static Image filled(int w, int h, int c, std::uint8_t value);

  FrameDims dims() const { return {width, height}; }

  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  /// Paints the outward-rounded box (clipped to the image) with `color`;
  /// only the first `channels` entries of color are used.
  void fill_rect(const BoundingBox& box, const std::array<std::uint8_t, 3>& color);

  bool operator==(const Image&) const = default;
};

/// Hadamard product of frame and mask: pixels outside the active region are
/// zeroed. Throws std::invalid_argument on a dims mismatch (caller bug).
Image subsample(const Image& frame, const SensorMask& mask);

}  // namespace roisub
