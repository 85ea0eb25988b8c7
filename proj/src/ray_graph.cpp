#include "gbmcut/ray_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace gbmcut {

void SegmentationParams::validate() const {
  if (samples_per_ray < 2) throw InvalidArgument("samples_per_ray: must be >= 2");
  if (delta_r < 0) throw InvalidArgument("delta_r: must be >= 0");
  if (delta_r >= samples_per_ray) throw InvalidArgument("delta_r: must be < samples_per_ray");
  if (!(max_radius_mm > 0.0) || !std::isfinite(max_radius_mm)) {
    throw InvalidArgument("max_radius_mm: must be > 0");
  }
  if (subdivisions < 0 || subdivisions > kMaxSubdivisions) {
    throw InvalidArgument("subdivisions: must be in [0, 7]");
  }
  if (mean_region_d < 1 || mean_region_d % 2 == 0) {
    throw InvalidArgument("mean_region_d: must be an odd integer >= 1");
  }
}

double estimate_mean_gray(const Volume& volume, Vec3 seed, int d) {
  if (d < 1 || d % 2 == 0) throw InvalidArgument("mean_region_d: must be an odd integer >= 1");
  const Index3 center = volume.geometry().voxel_containing(seed);
  const auto& dims = volume.dims();
  const std::int64_t half = d / 2;
  const auto lo = [&](std::int64_t c) { return std::max<std::int64_t>(c - half, 0); };
  const auto hi = [&](std::int64_t c, int a) { return std::min<std::int64_t>(c + half, dims[a] - 1); };

  double sum = 0.0;
  std::size_t count = 0;
  for (auto k = lo(center.k); k <= hi(center.k, 2); ++k) {
    for (auto j = lo(center.j); j <= hi(center.j, 1); ++j) {
      for (auto i = lo(center.i); i <= hi(center.i, 0); ++i) {
        sum += volume.at(i, j, k);
        ++count;
      }
    }
  }
  return sum / static_cast<double>(count);
}

RayGrid cast_rays(const Volume& volume, const PolyhedronMesh& mesh, Vec3 seed,
                  const SegmentationParams& params) {
  params.validate();
  if (!volume.geometry().contains_world(seed)) {
    throw OutOfBounds("seed lies outside the volume");
  }
  const std::size_t rays = mesh.ray_count();
  const auto samples = static_cast<std::size_t>(params.samples_per_ray);

  RayGrid grid;
  grid.seed = seed;
  grid.step_mm = params.sample_step_mm();
  grid.sample_values = RayField(rays, samples);
  grid.sample_positions.resize(rays * samples);
  grid.adjacency = mesh.adjacency;
  for (std::size_t r = 0; r < rays; ++r) {
    const Vec3 dir = mesh.vertices[r];
    for (std::size_t z = 0; z < samples; ++z) {
      const Vec3 p = seed + dir * params.sample_radius_mm(static_cast<int>(z));
      grid.sample_positions[r * samples + z] = p;
      grid.sample_values.at(r, z) = volume.sample_trilinear(p);
    }
  }
  return grid;
}

CostField node_costs(const RayGrid& grid, double mean_gray) {
  CostField out;
  out.mean_gray = mean_gray;
  out.c = grid.sample_values;
  for (double& v : out.c.values) v = std::abs(mean_gray - v);
  return out;
}

RayField terminal_weights(const RayField& costs) {
  if (costs.samples < 2) throw InvalidArgument("terminal_weights needs at least 2 samples per ray");
  RayField w(costs.rays, costs.samples);
  const std::size_t last = costs.samples - 1;
  for (std::size_t r = 0; r < costs.rays; ++r) {
    w.at(r, 0) = costs.at(r, 0);
    for (std::size_t z = 1; z < last; ++z) w.at(r, z) = costs.at(r, z) - costs.at(r, z - 1);
    w.at(r, last) = costs.at(r, last);
  }
  return w;
}

std::int64_t scale_capacity(double value) {
  const double scaled = value * kCapacityScale;
  if (!std::isfinite(scaled) || std::abs(scaled) > 0x1p60) {
    throw InvalidArgument("weight magnitude too large for integer capacities");
  }
  return std::llround(scaled);
}

void FlowNetwork::validate() const {
  if (node_count < 2) throw InvalidArgument("network needs at least source and sink");
  if (source >= node_count || sink >= node_count || source == sink) {
    throw InvalidArgument("invalid source/sink ids");
  }
  for (std::size_t n = 0; n < arcs.size(); ++n) {
    const Arc& a = arcs[n];
    if (a.from >= node_count || a.to >= node_count) {
      throw InvalidArgument("arc " + std::to_string(n) + " has a dangling endpoint");
    }
    if (a.capacity < 0) throw InvalidArgument("arc " + std::to_string(n) + " has negative capacity");
  }
}

FlowNetwork assemble_graph(const RayField& weights, const Adjacency& adjacency, int delta_r) {
  if (weights.rays != adjacency.size()) {
    throw InvalidArgument("weight rows do not match the number of rays");
  }
  if (weights.samples < 1) throw InvalidArgument("empty rays");
  if (delta_r < 0) throw InvalidArgument("delta_r: must be >= 0");

  const std::size_t rays = weights.rays;
  const std::size_t samples = weights.samples;
  const std::size_t interior = rays * samples;
  if (interior + 2 > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("graph too large");
  }

  FlowNetwork net;
  net.rays = rays;
  net.samples = samples;
  net.node_count = static_cast<std::uint32_t>(interior + 2);
  net.source = static_cast<std::uint32_t>(interior);
  net.sink = static_cast<std::uint32_t>(interior + 1);
  net.capacity_scale = kCapacityScale;

  std::vector<std::int64_t> scaled(interior);
  std::int64_t total = 0;
  for (std::size_t n = 0; n < interior; ++n) {
    scaled[n] = scale_capacity(weights.values[n]);
    total += scaled[n] < 0 ? -scaled[n] : scaled[n];
    if (total > (std::int64_t{1} << 61)) throw InvalidArgument("total weight too large");
  }
  const std::int64_t inf = total + scale_capacity(1.0);
  net.inf_capacity = inf;

  std::size_t neighbor_links = 0;
  for (const auto& n : adjacency) neighbor_links += n.size();
  net.arcs.reserve(interior * 2 + neighbor_links * samples + rays);

  for (std::size_t r = 0; r < rays; ++r) {
    for (std::size_t z = 0; z < samples; ++z) {
      const auto v = net.node(r, z);
      if (z > 0) net.arcs.push_back({v, net.node(r, z - 1), inf, ArcKind::kIntraRay});
      const std::size_t target_z = z > static_cast<std::size_t>(delta_r) ? z - delta_r : 0;
      for (auto rn : adjacency[r]) {
        if (rn >= rays || rn == r) throw InvalidArgument("adjacency references an invalid ray");
        net.arcs.push_back({v, net.node(rn, target_z), inf, ArcKind::kInterRay});
      }
      const std::int64_t w = scaled[v];
      if (w < 0) {
        net.arcs.push_back({net.source, v, -w, ArcKind::kSourceTerminal});
      } else {
        net.arcs.push_back({v, net.sink, w, ArcKind::kSinkTerminal});
      }
    }
    net.arcs.push_back({net.source, net.node(r, 0), inf, ArcKind::kAnchor});
  }

  std::sort(net.arcs.begin(), net.arcs.end(), [](const Arc& a, const Arc& b) {
    return std::tie(a.from, a.to, a.kind) < std::tie(b.from, b.to, b.kind);
  });
  return net;
}

std::string to_dimacs(const FlowNetwork& network) {
  std::ostringstream out;
  out << "p max " << network.node_count << ' ' << network.arcs.size() << '\n';
  out << "n " << network.source + 1 << " s\n";
  out << "n " << network.sink + 1 << " t\n";
  for (const Arc& a : network.arcs) {
    out << "a " << a.from + 1 << ' ' << a.to + 1 << ' ' << a.capacity << '\n';
  }
  return out.str();
}

}  // namespace gbmcut
