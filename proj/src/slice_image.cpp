#include "gbmcut/slice_image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>

namespace gbmcut {
namespace {

struct SliceMapping {
  std::int64_t width = 0;
  std::int64_t height = 0;
  // voxel index for image pixel (u, v)
  Index3 voxel(Axis axis, std::int64_t index, std::int64_t u, std::int64_t v) const {
    switch (axis) {
      case Axis::kZ:
        return {u, v, index};
      case Axis::kY:
        return {u, index, v};
      case Axis::kX:
        return {index, u, v};
    }
    return {};
  }
};

SliceMapping mapping_for(const Geometry& g, Axis axis, std::int64_t index) {
  if (index < 0 || index >= axis_extent(g, axis)) {
    throw OutOfBounds("slice index " + std::to_string(index) + " outside axis extent");
  }
  switch (axis) {
    case Axis::kZ:
      return {g.dims[0], g.dims[1]};
    case Axis::kY:
      return {g.dims[0], g.dims[2]};
    case Axis::kX:
      return {g.dims[1], g.dims[2]};
  }
  return {};
}

void put_be32(std::string& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

void put_chunk(std::string& out, const char* type, const std::string& payload) {
  put_be32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::optional<Axis> parse_axis(std::string_view text) {
  if (text == "x") return Axis::kX;
  if (text == "y") return Axis::kY;
  if (text == "z") return Axis::kZ;
  return std::nullopt;
}

std::int64_t axis_extent(const Geometry& geometry, Axis axis) {
  switch (axis) {
    case Axis::kX:
      return geometry.dims[0];
    case Axis::kY:
      return geometry.dims[1];
    case Axis::kZ:
      return geometry.dims[2];
  }
  return 0;
}

WindowLevel default_window(const Volume& volume) {
  const auto [lo, hi] = volume.min_max();
  return {static_cast<double>(hi) - lo, (static_cast<double>(hi) + lo) / 2.0};
}

std::uint8_t apply_window(double value, WindowLevel wl) {
  if (!(wl.window > 0.0)) return value >= wl.level ? 255 : 0;
  const double lo = wl.level - wl.window / 2.0;
  const double t = (value - lo) / wl.window;
  return static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
}

Image render_slice(const Volume& volume, Axis axis, std::int64_t index, WindowLevel wl) {
  const SliceMapping m = mapping_for(volume.geometry(), axis, index);
  Image img{m.width, m.height, 1, std::vector<std::uint8_t>(static_cast<std::size_t>(m.width * m.height))};
  for (std::int64_t v = 0; v < m.height; ++v) {
    for (std::int64_t u = 0; u < m.width; ++u) {
      img.pixels[static_cast<std::size_t>(v * m.width + u)] =
          apply_window(volume.at(m.voxel(axis, index, u, v)), wl);
    }
  }
  return img;
}

Image render_overlay(const Volume& volume, const Mask& mask, Axis axis, std::int64_t index,
                     WindowLevel wl) {
  if (mask.geometry().dims != volume.dims()) throw InvalidArgument("mask and volume dims differ");
  const SliceMapping m = mapping_for(volume.geometry(), axis, index);
  const Image gray = render_slice(volume, axis, index, wl);
  Image img{m.width, m.height, 3, std::vector<std::uint8_t>(gray.pixels.size() * 3)};
  for (std::int64_t v = 0; v < m.height; ++v) {
    for (std::int64_t u = 0; u < m.width; ++u) {
      const auto p = static_cast<std::size_t>(v * m.width + u);
      const std::uint8_t g = gray.pixels[p];
      std::uint8_t* rgb = &img.pixels[p * 3];
      if (mask.at(m.voxel(axis, index, u, v))) {
        rgb[0] = static_cast<std::uint8_t>((g + 255) / 2);
        rgb[1] = static_cast<std::uint8_t>(g / 2);
        rgb[2] = static_cast<std::uint8_t>(g / 2);
      } else {
        rgb[0] = rgb[1] = rgb[2] = g;
      }
    }
  }
  return img;
}

std::string encode_png(const Image& image) {
  const auto row_bytes = static_cast<std::size_t>(image.width) * image.channels;
  std::string raw;
  raw.reserve((row_bytes + 1) * static_cast<std::size_t>(image.height));
  for (std::int64_t y = 0; y < image.height; ++y) {
    raw.push_back('\0');  // filter: none
    raw.append(reinterpret_cast<const char*>(image.pixels.data()) + y * row_bytes, row_bytes);
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(packed_size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error("png compression failed");
  }
  packed.resize(packed_size);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(image.width));
  put_be32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);                               // bit depth
  ihdr.push_back(image.channels == 3 ? 2 : 0);     // color type
  ihdr.append(3, '\0');                            // compression, filter, interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", packed);
  put_chunk(png, "IEND", {});
  return png;
}

}  // namespace gbmcut
