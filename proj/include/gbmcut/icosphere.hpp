#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gbmcut/volume.hpp"

namespace gbmcut {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

// Closed triangulated polyhedron whose vertices lie on the unit sphere. Each
// vertex is one ray direction; `adjacency` lists the vertices sharing a mesh
// edge with it (sorted ascending, symmetric, no self entries).
struct PolyhedronMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  Adjacency adjacency;
  std::vector<std::vector<std::uint32_t>> vertex_faces;

  [[nodiscard]] std::size_t ray_count() const { return vertices.size(); }
  [[nodiscard]] std::size_t edge_count() const;
};

inline constexpr int kMaxSubdivisions = 7;

// Icosahedron refined `subdivisions` times by edge midpoint splitting, then
// projected onto the unit sphere. Yields 10 * 4^n + 2 vertices in a fixed
// order. Throws InvalidArgument for n < 0 or n > kMaxSubdivisions.
PolyhedronMesh build_icosphere(int subdivisions);

// Derives adjacency and vertex->face incidence from a face list.
void rebuild_topology(PolyhedronMesh& mesh);

}  // namespace gbmcut
