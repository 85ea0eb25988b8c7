#include "gbmcut/segmenter.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

namespace gbmcut {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Rows of the inverse of [v0 v1 v2]; multiplying by a direction gives its
// (unnormalised) barycentric coordinates with respect to the face.
struct FaceFrame {
  std::array<Vec3, 3> inverse_rows;
};

std::vector<FaceFrame> face_frames(const PolyhedronMesh& mesh) {
  std::vector<FaceFrame> frames(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 v0 = mesh.vertices[mesh.faces[f][0]];
    const Vec3 v1 = mesh.vertices[mesh.faces[f][1]];
    const Vec3 v2 = mesh.vertices[mesh.faces[f][2]];
    const double det = v0.dot(cross(v1, v2));
    frames[f].inverse_rows = {cross(v1, v2) * (1.0 / det), cross(v2, v0) * (1.0 / det),
                              cross(v0, v1) * (1.0 / det)};
  }
  return frames;
}

class RadiusField {
 public:
  RadiusField(const PolyhedronMesh& mesh, const std::vector<double>& radii)
      : mesh_(mesh), radii_(radii), frames_(face_frames(mesh)) {}

  double radius_along(Vec3 dir) {
    hint_ = nearest_vertex(mesh_, dir, hint_);
    double best_min = -std::numeric_limits<double>::infinity();
    double best_radius = radii_[hint_];
    for (auto f : mesh_.vertex_faces[hint_]) {
      if (evaluate(f, dir, best_min, best_radius)) return best_radius;
    }
    for (std::uint32_t f = 0; f < mesh_.faces.size(); ++f) {
      if (evaluate(f, dir, best_min, best_radius)) return best_radius;
    }
    return best_radius;
  }

 private:
  // Returns true when `dir` lies inside face f. Otherwise tracks the face with
  // the least negative barycentric coordinate as a fallback.
  bool evaluate(std::uint32_t f, Vec3 dir, double& best_min, double& best_radius) const {
    const auto& rows = frames_[f].inverse_rows;
    const std::array<double, 3> lambda{rows[0].dot(dir), rows[1].dot(dir), rows[2].dot(dir)};
    const double sum = lambda[0] + lambda[1] + lambda[2];
    if (sum <= 0.0) return false;
    const double lo = std::min({lambda[0], lambda[1], lambda[2]}) / sum;
    if (lo <= best_min) return false;
    best_min = lo;
    const auto& tri = mesh_.faces[f];
    best_radius = (lambda[0] * radii_[tri[0]] + lambda[1] * radii_[tri[1]] +
                   lambda[2] * radii_[tri[2]]) /
                  sum;
    return lo >= -1e-12;
  }

  const PolyhedronMesh& mesh_;
  const std::vector<double>& radii_;
  std::vector<FaceFrame> frames_;
  std::uint32_t hint_ = 0;
};

void keep_seed_component(Mask& mask, Index3 seed) {
  const auto& g = mask.geometry();
  std::vector<std::uint8_t> keep(g.voxel_count(), 0);
  std::vector<Index3> stack{seed};
  keep[g.linear(seed)] = 1;
  constexpr std::array<std::array<int, 3>, 6> kSteps{
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  while (!stack.empty()) {
    const Index3 v = stack.back();
    stack.pop_back();
    for (const auto& s : kSteps) {
      const Index3 n{v.i + s[0], v.j + s[1], v.k + s[2]};
      if (!g.contains(n)) continue;
      const auto lin = g.linear(n);
      if (keep[lin] || !mask.data()[lin]) continue;
      keep[lin] = 1;
      stack.push_back(n);
    }
  }
  mask.data() = std::move(keep);
}

}  // namespace

std::uint32_t nearest_vertex(const PolyhedronMesh& mesh, Vec3 direction, std::uint32_t hint) {
  std::uint32_t best = hint < mesh.vertices.size() ? hint : 0;
  double best_dot = mesh.vertices[best].dot(direction);
  for (bool moved = true; moved;) {
    moved = false;
    for (auto n : mesh.adjacency[best]) {
      const double d = mesh.vertices[n].dot(direction);
      if (d > best_dot) {
        best_dot = d;
        best = n;
        moved = true;
      }
    }
  }
  return best;
}

Mask voxelize(const std::vector<double>& cut_radii_mm, const PolyhedronMesh& mesh, Vec3 seed,
              const Geometry& geometry) {
  if (cut_radii_mm.size() != mesh.ray_count()) {
    throw InvalidArgument("one cut radius per mesh vertex required");
  }
  Mask mask(geometry);
  const Index3 seed_voxel = geometry.voxel_containing(seed);
  const double r_max = *std::max_element(cut_radii_mm.begin(), cut_radii_mm.end());

  const Vec3 lo_c = geometry.to_continuous_index(seed - Vec3{r_max, r_max, r_max});
  const Vec3 hi_c = geometry.to_continuous_index(seed + Vec3{r_max, r_max, r_max});
  const auto range = [&](double lo, double hi, int axis) {
    const auto n = geometry.dims[axis];
    return std::pair<std::int64_t, std::int64_t>{
        std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(lo)), 0, n - 1),
        std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(hi)), 0, n - 1)};
  };
  const auto [i0, i1] = range(lo_c.x, hi_c.x, 0);
  const auto [j0, j1] = range(lo_c.y, hi_c.y, 1);
  const auto [k0, k1] = range(lo_c.z, hi_c.z, 2);

  RadiusField field(mesh, cut_radii_mm);
  for (auto k = k0; k <= k1; ++k) {
    for (auto j = j0; j <= j1; ++j) {
      for (auto i = i0; i <= i1; ++i) {
        const Vec3 offset = geometry.voxel_to_world({i, j, k}) - seed;
        const double dist = offset.norm();
        if (dist > r_max) continue;
        if (dist == 0.0 || dist <= field.radius_along(offset * (1.0 / dist))) {
          mask.set({i, j, k}, true);
        }
      }
    }
  }
  mask.set(seed_voxel, true);
  keep_seed_component(mask, seed_voxel);
  return mask;
}

double compute_volume(const Mask& mask) {
  return static_cast<double>(mask.count()) * mask.geometry().voxel_volume();
}

SegmentationResult segment(const Volume& volume, Vec3 seed, const SegmentationParams& params) {
  params.validate();
  const auto start = Clock::now();
  const PolyhedronMesh mesh = build_icosphere(params.subdivisions);
  SegmentationResult result = segment(volume, mesh, seed, params);
  const double mesh_ms = elapsed_ms(start) - result.runtime.total_ms;
  result.runtime.rays_ms += mesh_ms;
  result.runtime.total_ms += mesh_ms;
  return result;
}

SegmentationResult segment(const Volume& volume, const PolyhedronMesh& mesh, Vec3 seed,
                           const SegmentationParams& params) {
  params.validate();
  if (mesh.ray_count() != (std::size_t{10} << (2 * params.subdivisions)) + 2) {
    throw InvalidArgument("subdivisions: mesh vertex count does not match");
  }
  if (!volume.geometry().contains_world(seed)) {
    throw OutOfBounds("seed lies outside the volume");
  }
  const auto start = Clock::now();
  PhaseTimings t;
  std::vector<std::string> warnings;

  auto phase = Clock::now();
  const double mean_gray = estimate_mean_gray(volume, seed, params.mean_region_d);
  t.mean_gray_ms = elapsed_ms(phase);

  phase = Clock::now();
  const RayGrid grid = cast_rays(volume, mesh, seed, params);
  t.rays_ms = elapsed_ms(phase);

  phase = Clock::now();
  const CostField costs = node_costs(grid, mean_gray);
  const RayField weights = terminal_weights(costs.c);
  t.costs_ms = elapsed_ms(phase);

  phase = Clock::now();
  const FlowNetwork network = assemble_graph(weights, mesh.adjacency, params.delta_r);
  t.graph_build_ms = elapsed_ms(phase);

  const auto [lo, hi] = volume.min_max();
  const bool constant = lo == hi;
  if (constant) {
    warnings.emplace_back("constant image: no boundary information, returning the innermost surface");
  }

  phase = Clock::now();
  const CutResult cut = max_flow(network, constant ? CutSide::kMinimalSource : CutSide::kMaximalSource);
  std::vector<int> indices = extract_cut_indices(cut, network, mesh.adjacency, params.delta_r);
  t.solve_ms = elapsed_ms(phase);

  phase = Clock::now();
  std::vector<double> radii(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) radii[r] = params.sample_radius_mm(indices[r]);
  Mask mask = voxelize(radii, mesh, seed, volume.geometry());
  t.voxelize_ms = elapsed_ms(phase);
  t.total_ms = elapsed_ms(start);

  const double volume_mm3 = compute_volume(mask);
  return SegmentationResult{std::move(indices), std::move(radii), std::move(mask), volume_mm3,
                            mean_gray, cut.flow_value, t, std::move(warnings)};
}

}  // namespace gbmcut
