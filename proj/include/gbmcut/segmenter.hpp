#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbmcut/icosphere.hpp"
#include "gbmcut/max_flow.hpp"
#include "gbmcut/ray_graph.hpp"
#include "gbmcut/volume.hpp"

namespace gbmcut {

struct PhaseTimings {
  double mean_gray_ms = 0.0;
  double rays_ms = 0.0;        // mesh + ray sampling
  double costs_ms = 0.0;       // node costs + terminal weights
  double graph_build_ms = 0.0;
  double solve_ms = 0.0;       // max flow + cut extraction
  double voxelize_ms = 0.0;
  double total_ms = 0.0;
};

struct SegmentationResult {
  std::vector<int> cut_indices;
  std::vector<double> cut_radii_mm;
  Mask mask;
  double volume_mm3 = 0.0;
  double mean_gray = 0.0;
  double flow_value = 0.0;
  PhaseTimings runtime;
  std::vector<std::string> warnings;
};

// Full pipeline: mean gray -> rays -> costs -> weights -> graph -> max flow ->
// cut heights -> mask. Among equally cheap surfaces the outermost one is
// reported; a constant image instead yields the innermost (anchored) surface
// and a warning. Throws OutOfBounds for a seed outside the volume and
// InvalidArgument for bad parameters.
SegmentationResult segment(const Volume& volume, Vec3 seed, const SegmentationParams& params);

// Same as above with a prebuilt mesh (must match params.subdivisions).
SegmentationResult segment(const Volume& volume, const PolyhedronMesh& mesh, Vec3 seed,
                           const SegmentationParams& params);

// Star-shaped mask around `seed`: a voxel is set when its centre lies within
// the surface radius along its direction, where that radius is interpolated
// barycentrically over the mesh triangle hit by the direction. The seed voxel
// is always set and only the 6-connected component containing it is kept.
Mask voxelize(const std::vector<double>& cut_radii_mm, const PolyhedronMesh& mesh, Vec3 seed,
              const Geometry& geometry);

// Ones-count times voxel volume, in mm^3.
double compute_volume(const Mask& mask);

// Nearest mesh vertex to a unit direction by greedy descent over the mesh
// adjacency, starting at `hint`. Exact on convex-hull (Delaunay) meshes.
std::uint32_t nearest_vertex(const PolyhedronMesh& mesh, Vec3 direction, std::uint32_t hint = 0);

}  // namespace gbmcut
