#include "gbmcut/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gbmcut {

double Vec3::norm() const { return std::sqrt(dot(*this)); }

Vec3 Vec3::normalized() const {
  const double n = norm();
  return {x / n, y / n, z / n};
}

Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

std::string_view metaimage_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::kU8:
      return "MET_UCHAR";
    case ElementKind::kI16:
      return "MET_SHORT";
    case ElementKind::kU16:
      return "MET_USHORT";
    case ElementKind::kF32:
      return "MET_FLOAT";
  }
  return "MET_FLOAT";
}

std::size_t element_size(ElementKind kind) {
  switch (kind) {
    case ElementKind::kU8:
      return 1;
    case ElementKind::kI16:
    case ElementKind::kU16:
      return 2;
    case ElementKind::kF32:
      return 4;
  }
  return 4;
}

Vec3 Geometry::to_continuous_index(Vec3 world) const {
  return {(world.x - origin.x) / spacing.x, (world.y - origin.y) / spacing.y,
          (world.z - origin.z) / spacing.z};
}

Vec3 Geometry::voxel_to_world(Index3 idx) const {
  if (!contains(idx)) {
    throw OutOfBounds("voxel index (" + std::to_string(idx.i) + "," + std::to_string(idx.j) + "," +
                      std::to_string(idx.k) + ") outside dims");
  }
  return {origin.x + static_cast<double>(idx.i) * spacing.x,
          origin.y + static_cast<double>(idx.j) * spacing.y,
          origin.z + static_cast<double>(idx.k) * spacing.z};
}

bool Geometry::contains_world(Vec3 world) const {
  const Vec3 u = to_continuous_index(world);
  const auto inside = [](double c, std::int64_t n) {
    return c >= -0.5 && c < static_cast<double>(n) - 0.5;
  };
  return inside(u.x, dims[0]) && inside(u.y, dims[1]) && inside(u.z, dims[2]);
}

Index3 Geometry::voxel_containing(Vec3 world) const {
  if (!contains_world(world)) {
    throw OutOfBounds("point (" + std::to_string(world.x) + "," + std::to_string(world.y) + "," +
                      std::to_string(world.z) + ") mm lies outside the volume");
  }
  const Vec3 u = to_continuous_index(world);
  const auto snap = [](double c, std::int64_t n) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(c + 0.5)), 0, n - 1);
  };
  return {snap(u.x, dims[0]), snap(u.y, dims[1]), snap(u.z, dims[2])};
}

void Geometry::validate() const {
  for (auto d : dims) {
    if (d < 1) throw InvalidArgument("dims must be >= 1");
  }
  if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0)) {
    throw InvalidArgument("spacing must be > 0");
  }
}

Volume::Volume(Geometry geometry, std::vector<float> data, ElementKind kind)
    : geometry_(geometry), data_(std::move(data)), kind_(kind) {
  geometry_.validate();
  if (data_.size() != geometry_.voxel_count()) {
    throw DataLengthMismatch("data length " + std::to_string(data_.size()) + " != " +
                             std::to_string(geometry_.voxel_count()) + " voxels");
  }
}

double Volume::sample_trilinear(Vec3 world, double background) const {
  const Vec3 u = geometry_.to_continuous_index(world);
  const std::array<double, 3> c{u.x, u.y, u.z};
  std::array<std::int64_t, 3> lo{};
  std::array<double, 3> frac{};
  for (int a = 0; a < 3; ++a) {
    const auto n = geometry_.dims[a];
    if (!(c[a] >= -0.5 && c[a] <= static_cast<double>(n) - 0.5)) return background;
    const double clamped = std::clamp(c[a], 0.0, static_cast<double>(n - 1));
    auto base = static_cast<std::int64_t>(std::floor(clamped));
    if (base >= n - 1) base = std::max<std::int64_t>(n - 2, 0);
    lo[a] = base;
    frac[a] = n == 1 ? 0.0 : clamped - static_cast<double>(base);
  }
  const auto hi = [&](int a) { return std::min(lo[a] + 1, geometry_.dims[a] - 1); };
  const std::int64_t i0 = lo[0], j0 = lo[1], k0 = lo[2];
  const std::int64_t i1 = hi(0), j1 = hi(1), k1 = hi(2);
  const double fx = frac[0], fy = frac[1], fz = frac[2];

  const double c00 = at(i0, j0, k0) * (1 - fx) + at(i1, j0, k0) * fx;
  const double c10 = at(i0, j1, k0) * (1 - fx) + at(i1, j1, k0) * fx;
  const double c01 = at(i0, j0, k1) * (1 - fx) + at(i1, j0, k1) * fx;
  const double c11 = at(i0, j1, k1) * (1 - fx) + at(i1, j1, k1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

std::pair<float, float> Volume::min_max() const {
  const auto [lo, hi] = std::minmax_element(data_.begin(), data_.end());
  return {*lo, *hi};
}

Mask::Mask(Geometry geometry) : geometry_(geometry), data_(geometry.voxel_count(), 0) {
  geometry_.validate();
}

Mask::Mask(Geometry geometry, std::vector<std::uint8_t> data)
    : geometry_(geometry), data_(std::move(data)) {
  geometry_.validate();
  if (data_.size() != geometry_.voxel_count()) {
    throw DataLengthMismatch("mask data length does not match dims");
  }
  if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; })) {
    throw InvalidArgument("mask values must be 0 or 1");
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

Mask mask_from_volume(const Volume& volume) {
  std::vector<std::uint8_t> bits(volume.data().size());
  for (std::size_t n = 0; n < bits.size(); ++n) {
    const float v = volume.data()[n];
    if (v != 0.0F && v != 1.0F) throw InvalidArgument("mask file contains values other than 0/1");
    bits[n] = v != 0.0F ? 1 : 0;
  }
  return Mask(volume.geometry(), std::move(bits));
}

}  // namespace gbmcut
