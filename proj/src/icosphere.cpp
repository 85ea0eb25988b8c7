#include "gbmcut/icosphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace gbmcut {

std::size_t PolyhedronMesh::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : adjacency) twice += n.size();
  return twice / 2;
}

void rebuild_topology(PolyhedronMesh& mesh) {
  const auto n = mesh.vertices.size();
  mesh.adjacency.assign(n, {});
  mesh.vertex_faces.assign(n, {});
  for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& tri = mesh.faces[f];
    for (int e = 0; e < 3; ++e) {
      const auto a = tri[e];
      const auto b = tri[(e + 1) % 3];
      mesh.adjacency[a].push_back(b);
      mesh.adjacency[b].push_back(a);
      mesh.vertex_faces[a].push_back(f);
    }
  }
  for (auto& list : mesh.adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

PolyhedronMesh build_icosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > kMaxSubdivisions) {
    throw InvalidArgument("subdivisions must be in [0, " + std::to_string(kMaxSubdivisions) +
                          "], got " + std::to_string(subdivisions));
  }

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  PolyhedronMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : mesh.vertices) v = v.normalized();
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    const auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
      const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.push_back(((mesh.vertices[a] + mesh.vertices[b]) * 0.5).normalized());
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<std::uint32_t, 3>> refined;
    refined.reserve(mesh.faces.size() * 4);
    for (const auto& [a, b, c] : mesh.faces) {
      const auto ab = midpoint(a, b);
      const auto bc = midpoint(b, c);
      const auto ca = midpoint(c, a);
      refined.push_back({a, ab, ca});
      refined.push_back({b, bc, ab});
      refined.push_back({c, ca, bc});
      refined.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(refined);
  }

  rebuild_topology(mesh);
  return mesh;
}

}  // namespace gbmcut
