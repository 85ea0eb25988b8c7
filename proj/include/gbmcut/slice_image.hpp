#pragma once

// 2D views of a volume for display: window/level mapping to 8-bit gray, mask
// overlays, and PNG encoding.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gbmcut/volume.hpp"

namespace gbmcut {

enum class Axis { kX, kY, kZ };

// "x" | "y" | "z"; std::nullopt otherwise.
std::optional<Axis> parse_axis(std::string_view text);
std::int64_t axis_extent(const Geometry& geometry, Axis axis);

struct WindowLevel {
  double window = 1.0;
  double level = 0.0;
};

// Window spanning the volume's min..max.
WindowLevel default_window(const Volume& volume);

// Maps a gray value to 0..255. Values below level - window/2 become 0, above
// level + window/2 become 255. A non-positive window thresholds at `level`.
std::uint8_t apply_window(double value, WindowLevel wl);

struct Image {
  std::int64_t width = 0;
  std::int64_t height = 0;
  int channels = 1;  // 1 = gray, 3 = RGB
  std::vector<std::uint8_t> pixels;
};

// Slice orientation: z -> (x across, y down); y -> (x, z); x -> (y, z).
// Throws OutOfBounds when index is outside the axis extent.
Image render_slice(const Volume& volume, Axis axis, std::int64_t index, WindowLevel wl);

// RGB copy of the slice with mask voxels blended towards red; all other pixels
// keep their gray value on every channel.
Image render_overlay(const Volume& volume, const Mask& mask, Axis axis, std::int64_t index,
                     WindowLevel wl);

std::string encode_png(const Image& image);

}  // namespace gbmcut
