#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "gbmcut/error.hpp"

namespace gbmcut {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Vec3 operator*(double s, Vec3 a) { return a * s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  [[nodiscard]] double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  [[nodiscard]] double norm() const;
  [[nodiscard]] Vec3 normalized() const;
};

Vec3 cross(Vec3 a, Vec3 b);

struct Index3 {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;
  friend bool operator==(const Index3&, const Index3&) = default;
};

// Element kinds a MetaImage file may carry. In memory every kind widens to float.
enum class ElementKind { kU8, kI16, kU16, kF32 };

std::string_view metaimage_name(ElementKind kind);
std::size_t element_size(ElementKind kind);

// Geometry shared by volumes and masks: voxel (i,j,k) has its center at
// origin + (i,j,k) * spacing, in mm. Axis-aligned, right-handed.
struct Geometry {
  std::array<std::int64_t, 3> dims{1, 1, 1};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  friend bool operator==(const Geometry&, const Geometry&) = default;

  [[nodiscard]] std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
  }
  [[nodiscard]] double voxel_volume() const { return spacing.x * spacing.y * spacing.z; }
  [[nodiscard]] bool contains(Index3 idx) const {
    return idx.i >= 0 && idx.j >= 0 && idx.k >= 0 && idx.i < dims[0] && idx.j < dims[1] &&
           idx.k < dims[2];
  }
  [[nodiscard]] std::size_t linear(Index3 idx) const {
    return static_cast<std::size_t>((idx.k * dims[1] + idx.j) * dims[0] + idx.i);
  }
  // Continuous voxel coordinate of a world point.
  [[nodiscard]] Vec3 to_continuous_index(Vec3 world) const;
  // Throws OutOfBounds for an index outside dims.
  [[nodiscard]] Vec3 voxel_to_world(Index3 idx) const;
  // True when the point lies within the extent of some voxel (half a voxel
  // beyond the outermost centers).
  [[nodiscard]] bool contains_world(Vec3 world) const;
  // Voxel whose extent contains the point. Throws OutOfBounds otherwise.
  [[nodiscard]] Index3 voxel_containing(Vec3 world) const;

  // Throws InvalidArgument unless dims >= 1 and spacing > 0.
  void validate() const;
};

// Scalar image. Immutable after construction by convention: every operation
// takes it by const reference.
class Volume {
 public:
  Volume(Geometry geometry, std::vector<float> data, ElementKind kind = ElementKind::kF32);

  [[nodiscard]] const Geometry& geometry() const { return geometry_; }
  [[nodiscard]] const std::array<std::int64_t, 3>& dims() const { return geometry_.dims; }
  [[nodiscard]] Vec3 spacing() const { return geometry_.spacing; }
  [[nodiscard]] Vec3 origin() const { return geometry_.origin; }
  [[nodiscard]] ElementKind element_kind() const { return kind_; }
  [[nodiscard]] const std::vector<float>& data() const { return data_; }

  [[nodiscard]] float at(Index3 idx) const { return data_[geometry_.linear(idx)]; }
  [[nodiscard]] float at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return at(Index3{i, j, k});
  }

  [[nodiscard]] Vec3 voxel_to_world(Index3 idx) const { return geometry_.voxel_to_world(idx); }

  // Trilinear interpolation at a world point. Points within half a voxel of the
  // outermost centers are clamped onto the center lattice; anything further out
  // returns `background`.
  [[nodiscard]] double sample_trilinear(Vec3 world, double background = 0.0) const;

  [[nodiscard]] std::pair<float, float> min_max() const;

 private:
  Geometry geometry_;
  std::vector<float> data_;
  ElementKind kind_;
};

// Binary voxel set on a geometry. Every element is 0 or 1.
class Mask {
 public:
  explicit Mask(Geometry geometry);
  // Throws InvalidArgument if any element is not 0 or 1.
  Mask(Geometry geometry, std::vector<std::uint8_t> data);

  [[nodiscard]] const Geometry& geometry() const { return geometry_; }
  [[nodiscard]] const std::vector<std::uint8_t>& data() const { return data_; }
  [[nodiscard]] std::vector<std::uint8_t>& data() { return data_; }

  [[nodiscard]] bool at(Index3 idx) const { return data_[geometry_.linear(idx)] != 0; }
  void set(Index3 idx, bool value) { data_[geometry_.linear(idx)] = value ? 1 : 0; }

  [[nodiscard]] std::size_t count() const;

 private:
  Geometry geometry_;
  std::vector<std::uint8_t> data_;
};

// Builds a mask from any 0/1 volume (e.g. one read back from disk).
Mask mask_from_volume(const Volume& volume);

}  // namespace gbmcut
