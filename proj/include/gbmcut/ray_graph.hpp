#pragma once

// Radial graph construction around a seed point: ray casting through the
// polyhedron vertices, node costs, terminal weights and the capacitated
// network whose minimum closed set is the optimal star-shaped surface.
//
// Node (r, z) is the z-th sample on ray r, counted outward from the seed.

#include <cstdint>
#include <string>
#include <vector>

#include "gbmcut/icosphere.hpp"
#include "gbmcut/volume.hpp"

namespace gbmcut {

struct SegmentationParams {
  int delta_r = 2;            // max cut-height difference between adjacent rays
  int samples_per_ray = 60;   // Z
  double max_radius_mm = 50.0;
  int subdivisions = 3;       // icosphere level; R = 10 * 4^n + 2
  int mean_region_d = 5;      // edge of the voxel cube averaged around the seed

  // Throws InvalidArgument naming the offending field.
  void validate() const;
  [[nodiscard]] double sample_step_mm() const { return max_radius_mm / samples_per_ray; }
  [[nodiscard]] double sample_radius_mm(int z) const { return (z + 1) * sample_step_mm(); }
};

// R x Z table of reals, row-major by ray.
struct RayField {
  std::size_t rays = 0;
  std::size_t samples = 0;
  std::vector<double> values;

  RayField() = default;
  RayField(std::size_t r, std::size_t z, double fill = 0.0) : rays(r), samples(z), values(r * z, fill) {}

  [[nodiscard]] double& at(std::size_t r, std::size_t z) { return values[r * samples + z]; }
  [[nodiscard]] double at(std::size_t r, std::size_t z) const { return values[r * samples + z]; }
};

struct RayGrid {
  Vec3 seed;
  double step_mm = 0.0;
  RayField sample_values;
  std::vector<Vec3> sample_positions;  // R*Z, same layout as sample_values
  Adjacency adjacency;
};

struct CostField {
  double mean_gray = 0.0;
  RayField c;  // |mean_gray - sample value|
};

// Mean gray value of the d x d x d voxel cube centred on the voxel containing
// `seed`, clipped to the volume. Throws OutOfBounds / InvalidArgument.
double estimate_mean_gray(const Volume& volume, Vec3 seed, int d);

// Samples every ray at radii (z+1) * max_radius / Z. Throws OutOfBounds when the
// seed lies outside the volume.
RayGrid cast_rays(const Volume& volume, const PolyhedronMesh& mesh, Vec3 seed,
                  const SegmentationParams& params);

CostField node_costs(const RayGrid& grid, double mean_gray);

// w(r,0) = c(r,0); w(r,Z-1) = c(r,Z-1); otherwise w(r,z) = c(r,z) - c(r,z-1).
RayField terminal_weights(const RayField& costs);

enum class ArcKind : std::uint8_t {
  kGeneric,        // arcs read from DIMACS input
  kIntraRay,       // (r,z) -> (r,z-1)
  kInterRay,       // (r,z) -> (r_n, max(0, z - delta_r))
  kSourceTerminal, // s -> (r,z) for negative weight
  kSinkTerminal,   // (r,z) -> t for non-negative weight
  kAnchor,         // s -> (r,0)
};

struct Arc {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::int64_t capacity = 0;
  ArcKind kind = ArcKind::kGeneric;

  friend bool operator==(const Arc&, const Arc&) = default;
};

// Real weights become integer capacities at this scale so that the cut
// arithmetic is exact.
inline constexpr double kCapacityScale = 1048576.0;  // 2^20
std::int64_t scale_capacity(double value);

struct FlowNetwork {
  std::uint32_t node_count = 0;
  std::uint32_t source = 0;
  std::uint32_t sink = 0;
  std::vector<Arc> arcs;
  std::int64_t inf_capacity = 0;  // 0 when the network has no infinite arcs
  double capacity_scale = 1.0;    // real value = capacity / capacity_scale

  // Ray layout; zero for networks not built by assemble_graph.
  std::size_t rays = 0;
  std::size_t samples = 0;

  [[nodiscard]] std::uint32_t node(std::size_t r, std::size_t z) const {
    return static_cast<std::uint32_t>(r * samples + z);
  }

  // Throws InvalidArgument on dangling endpoints or negative capacities.
  void validate() const;
};

// Arcs are emitted in canonical (from, to, kind) order. Weight rows must match
// the adjacency size. inf_capacity = scaled(1) + sum of scaled |w|.
FlowNetwork assemble_graph(const RayField& weights, const Adjacency& adjacency, int delta_r);

// Debug serialisation: "p max N M", "n s s", "n t t", "a u v cap" with 1-based ids.
std::string to_dimacs(const FlowNetwork& network);

}  // namespace gbmcut
