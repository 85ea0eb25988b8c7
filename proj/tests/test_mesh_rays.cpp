#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "gbmcut/evaluator.hpp"
#include "gbmcut/icosphere.hpp"
#include "gbmcut/ray_graph.hpp"
#include "test_support.hpp"

using namespace gbmcut;
using testing_support::complete_adjacency;
using testing_support::for_each_feasible_surface;

namespace {

Volume constant_volume(std::int64_t n, float value) {
  Geometry g;
  g.dims = {n, n, n};
  return Volume(g, std::vector<float>(g.voxel_count(), value));
}

std::size_t count_kind(const FlowNetwork& net, ArcKind kind) {
  return static_cast<std::size_t>(
      std::count_if(net.arcs.begin(), net.arcs.end(), [&](const Arc& a) { return a.kind == kind; }));
}

// Inter-ray arcs of the two-ray graph whose endpoints fall on opposite sides
// of the surface at the given heights, enumerated straight from the arc
// definition (r,z) -> (r', max(0, z - delta)).
int severed_by_definition(int samples, int delta, int h0, int h1) {
  const int h[2] = {h0, h1};
  int severed = 0;
  for (int r = 0; r < 2; ++r) {
    for (int z = 0; z < samples; ++z) {
      const int target = std::max(0, z - delta);
      if ((z <= h[r]) != (target <= h[1 - r])) ++severed;
    }
  }
  return severed;
}

int severed_in_graph(const FlowNetwork& net, int h0, int h1) {
  auto side = [&](std::uint32_t v) {
    const auto r = v / net.samples;
    const auto z = static_cast<int>(v % net.samples);
    return z <= (r == 0 ? h0 : h1);
  };
  int severed = 0;
  for (const auto& a : net.arcs) {
    if (a.kind == ArcKind::kInterRay && side(a.from) != side(a.to)) ++severed;
  }
  return severed;
}

}  // namespace

TEST_CASE("icosphere vertex counts and topology") {
  const PolyhedronMesh ico = build_icosphere(0);
  CHECK(ico.ray_count() == 12);
  for (const auto& n : ico.adjacency) CHECK(n.size() == 5);

  for (int level : {1, 2, 3}) {
    const PolyhedronMesh m = build_icosphere(level);
    const std::size_t expected = 10 * (std::size_t{1} << (2 * level)) + 2;
    CHECK(m.ray_count() == expected);
    // Euler characteristic of a closed sphere
    const auto v = static_cast<long>(m.vertices.size());
    const auto e = static_cast<long>(m.edge_count());
    const auto f = static_cast<long>(m.faces.size());
    CHECK(v - e + f == 2);
    CHECK(2 * e == 3 * f);
  }
  CHECK(build_icosphere(1).ray_count() == 42);
  CHECK(build_icosphere(3).ray_count() == 642);
  CHECK_THROWS_AS(build_icosphere(-1), InvalidArgument);
  CHECK_THROWS_AS(build_icosphere(kMaxSubdivisions + 1), InvalidArgument);
}

TEST_CASE("icosphere vertices are unit length and adjacency is symmetric") {
  for (int level = 0; level <= 3; ++level) {
    const PolyhedronMesh m = build_icosphere(level);
    std::size_t degree_sum = 0;
    for (std::size_t v = 0; v < m.ray_count(); ++v) {
      CHECK(std::abs(m.vertices[v].norm() - 1.0) < 1e-9);
      const auto& nb = m.adjacency[v];
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      for (auto n : nb) {
        CHECK(n != v);
        CHECK(std::binary_search(m.adjacency[n].begin(), m.adjacency[n].end(), static_cast<std::uint32_t>(v)));
      }
      degree_sum += nb.size();
    }
    CHECK(degree_sum == 2 * m.edge_count());
  }
}

TEST_CASE("estimate_mean_gray examples") {
  CHECK(estimate_mean_gray(constant_volume(8, 100.0f), {3.2, 4.0, 5.9}, 3) == doctest::Approx(100.0));

  Geometry g;
  g.dims = {3, 3, 3};
  std::vector<float> ramp(27);
  std::iota(ramp.begin(), ramp.end(), 0.0f);
  const Volume v(g, ramp);
  CHECK(estimate_mean_gray(v, {1, 1, 1}, 3) == doctest::Approx(13.0));

  // corner voxel: only the 2x2x2 in-bounds part of the cube contributes
  const double corner = (0 + 1 + 3 + 4 + 9 + 10 + 12 + 13) / 8.0;
  CHECK(estimate_mean_gray(v, {0, 0, 0}, 3) == doctest::Approx(corner));
  CHECK(estimate_mean_gray(v, {2, 1, 1}, 1) == doctest::Approx(14.0));

  CHECK_THROWS_AS(estimate_mean_gray(v, {9, 1, 1}, 3), OutOfBounds);
  CHECK_THROWS_AS(estimate_mean_gray(v, {1, 1, 1}, 2), InvalidArgument);
}

TEST_CASE("cast_rays on a constant volume reads the constant everywhere inside") {
  const Volume v = constant_volume(40, 100.0f);
  SegmentationParams p;
  p.samples_per_ray = 10;
  p.max_radius_mm = 15.0;
  p.subdivisions = 1;
  const PolyhedronMesh mesh = build_icosphere(1);
  const RayGrid grid = cast_rays(v, mesh, {20, 20, 20}, p);
  CHECK(grid.sample_values.rays == 42);
  CHECK(grid.sample_values.samples == 10);
  for (double s : grid.sample_values.values) CHECK(s == doctest::Approx(100.0));
}

TEST_CASE("cast_rays sample radii") {
  const Volume v = constant_volume(8, 1.0f);
  SegmentationParams p;  // Z = 60, max radius 50
  const PolyhedronMesh mesh = build_icosphere(0);
  const Vec3 seed{4, 4, 4};
  const RayGrid grid = cast_rays(v, mesh, seed, p);
  for (std::size_t r = 0; r < grid.sample_values.rays; ++r) {
    double previous = 0.0;
    for (std::size_t z = 0; z < grid.sample_values.samples; ++z) {
      const double d = (grid.sample_positions[r * 60 + z] - seed).norm();
      CHECK(d > previous);
      CHECK(d == doctest::Approx((z + 1) * 50.0 / 60.0));
      previous = d;
    }
    CHECK((grid.sample_positions[r * 60 + 59] - seed).norm() == doctest::Approx(50.0).epsilon(1e-12));
  }
  // far samples leave the 8^3 volume and read the background
  CHECK(grid.sample_values.at(0, 59) == 0.0);
  CHECK_THROWS_AS(cast_rays(v, mesh, {-5, 4, 4}, p), OutOfBounds);
}

TEST_CASE("cast_rays on a ball phantom matches the analytic indicator away from the interface") {
  PhantomSpec spec;
  spec.geometry.dims = {64, 64, 64};
  spec.shape = Ball{{32, 32, 32}, 15.0};
  const Phantom ph = generate_phantom(spec, 0);
  SegmentationParams p;
  const RayGrid grid = cast_rays(ph.volume, build_icosphere(3), {32, 32, 32}, p);
  std::size_t checked = 0;
  for (std::size_t r = 0; r < grid.sample_values.rays; ++r) {
    for (std::size_t z = 0; z < grid.sample_values.samples; ++z) {
      const double radius = p.sample_radius_mm(static_cast<int>(z));
      const double s = grid.sample_values.at(r, z);
      if (radius < 15.0 - 1.8) {
        CHECK(s == doctest::Approx(200.0));
        ++checked;
      } else if (radius > 15.0 + 1.8 && radius < 30.0) {
        CHECK(s == doctest::Approx(50.0));
        ++checked;
      }
    }
  }
  CHECK(checked > 642 * 20);
}

TEST_CASE("node_costs examples") {
  RayGrid grid;
  grid.sample_values = RayField(1, 3);
  grid.sample_values.values = {100.0, 40.0, 160.0};
  const CostField c = node_costs(grid, 100.0);
  CHECK(c.mean_gray == 100.0);
  CHECK(c.c.values == std::vector<double>{0.0, 60.0, 60.0});
}

TEST_CASE("terminal_weights examples") {
  RayField c(1, 3);
  c.values = {5, 2, 7};
  CHECK(terminal_weights(c).values == std::vector<double>{5, -3, 7});

  RayField zeros(2, 4, 0.0);
  CHECK(terminal_weights(zeros).values == std::vector<double>(8, 0.0));

  RayField two(1, 2);
  two.values = {0, 10};
  CHECK(terminal_weights(two).values == std::vector<double>{0, 10});
}

TEST_CASE("terminal_weights telescopes to the node cost") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(0.0, 200.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rays = 1 + trial % 4, samples = 2 + trial % 9;
    RayField c(rays, samples);
    for (auto& x : c.values) x = value(rng);
    const RayField w = terminal_weights(c);
    for (std::size_t r = 0; r < rays; ++r) {
      double prefix = 0.0;
      for (std::size_t k = 0; k + 1 < samples; ++k) {
        prefix += w.at(r, k);
        CHECK(prefix == doctest::Approx(c.at(r, k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("assemble_graph arc families for two adjacent rays") {
  RayField w(2, 3, 1.0);
  const FlowNetwork net = assemble_graph(w, complete_adjacency(2), 1);
  CHECK(net.node_count == 8);
  CHECK(net.source == 6);
  CHECK(net.sink == 7);
  CHECK(count_kind(net, ArcKind::kIntraRay) == 4);
  CHECK(count_kind(net, ArcKind::kInterRay) == 6);
  CHECK(count_kind(net, ArcKind::kAnchor) == 2);

  // every inter-ray arc by its defining formula
  std::set<std::pair<std::uint32_t, std::uint32_t>> expected;
  for (std::size_t r = 0; r < 2; ++r) {
    for (int z = 0; z < 3; ++z) {
      expected.insert({net.node(r, z), net.node(1 - r, std::max(0, z - 1))});
    }
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> got;
  for (const auto& a : net.arcs) {
    if (a.kind == ArcKind::kInterRay) got.insert({a.from, a.to});
  }
  CHECK(got == expected);
}

TEST_CASE("delta 0 inter-ray arcs stay at the same height") {
  RayField w(3, 5, 2.0);
  const FlowNetwork net = assemble_graph(w, complete_adjacency(3), 0);
  for (const auto& a : net.arcs) {
    if (a.kind == ArcKind::kInterRay) CHECK(a.from % 5 == a.to % 5);
  }
}

TEST_CASE("assemble_graph capacity invariants") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> value(-30.0, 30.0);
  const PolyhedronMesh mesh = build_icosphere(1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t samples = 2 + trial;
    RayField w(mesh.ray_count(), samples);
    for (auto& x : w.values) x = value(rng);
    const int delta = trial % 3;
    const FlowNetwork net = assemble_graph(w, mesh.adjacency, delta);
    net.validate();
    CHECK(net.node_count == mesh.ray_count() * samples + 2);

    std::int64_t terminal_total = 0;
    std::vector<int> intra_out(net.node_count, 0), inter_out(net.node_count, 0);
    for (const auto& a : net.arcs) {
      switch (a.kind) {
        case ArcKind::kSourceTerminal:
        case ArcKind::kSinkTerminal:
          terminal_total += a.capacity;
          CHECK(a.capacity < net.inf_capacity);
          break;
        case ArcKind::kIntraRay:
          ++intra_out[a.from];
          CHECK(a.capacity == net.inf_capacity);
          break;
        case ArcKind::kInterRay:
          ++inter_out[a.from];
          CHECK(a.capacity == net.inf_capacity);
          break;
        case ArcKind::kAnchor:
          CHECK(a.from == net.source);
          CHECK(a.to % samples == 0);
          CHECK(a.capacity == net.inf_capacity);
          break;
        case ArcKind::kGeneric:
          FAIL("generic arc in an assembled graph");
      }
    }
    CHECK(net.inf_capacity > terminal_total);
    for (std::size_t r = 0; r < mesh.ray_count(); ++r) {
      for (std::size_t z = 0; z < samples; ++z) {
        const auto v = net.node(r, z);
        CHECK(intra_out[v] == (z == 0 ? 0 : 1));
        CHECK(inter_out[v] == static_cast<int>(mesh.adjacency[r].size()));
      }
    }
    // each node carries exactly one terminal arc whose side follows the sign
    for (const auto& a : net.arcs) {
      if (a.kind == ArcKind::kSourceTerminal) CHECK(scale_capacity(w.values[a.to]) < 0);
      if (a.kind == ArcKind::kSinkTerminal) CHECK(scale_capacity(w.values[a.from]) >= 0);
    }
  }
}

TEST_CASE("two-ray inter-ray arcs severed by adjacent surfaces") {
  const int samples = 4, delta = 1;
  RayField w(2, samples, 0.0);
  const FlowNetwork net = assemble_graph(w, complete_adjacency(2), delta);
  for (int h0 = 0; h0 <= samples - 2; ++h0) {
    for (int h1 = 0; h1 <= samples - 2; ++h1) {
      const int expected = std::abs(h0 - h1) <= 1 ? 2 : 4;
      CAPTURE(h0);
      CAPTURE(h1);
      CHECK(severed_by_definition(samples, delta, h0, h1) == expected);
      CHECK(severed_in_graph(net, h0, h1) == expected);
    }
  }
}

TEST_CASE("feasible surfaces grow strictly with delta") {
  const PolyhedronMesh ico = build_icosphere(0);
  const std::vector<std::pair<std::size_t, Adjacency>> shapes = {
      {2, complete_adjacency(2)}, {3, complete_adjacency(3)}, {4, Adjacency{{1}, {0, 2}, {1, 3}, {2}}}};
  for (const auto& [rays, adj] : shapes) {
    for (int samples = 2; samples <= 5; ++samples) {
      std::size_t previous = 0;
      for (int delta = 0; delta < samples; ++delta) {
        std::set<std::vector<int>> loose, tight;
        for_each_feasible_surface(rays, samples, adj, delta, [&](const std::vector<int>& z) { loose.insert(z); });
        if (delta > 0) {
          for_each_feasible_surface(rays, samples, adj, delta - 1,
                                    [&](const std::vector<int>& z) { tight.insert(z); });
          CHECK(std::includes(loose.begin(), loose.end(), tight.begin(), tight.end()));
          CHECK(loose.size() > tight.size());
          CHECK(tight.size() == previous);
        }
        previous = loose.size();
      }
    }
  }
}

TEST_CASE("SegmentationParams validation names the field") {
  auto message = [](SegmentationParams p) {
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  SegmentationParams p;
  CHECK(message(p).empty());
  p.delta_r = -1;
  CHECK(message(p).rfind("delta_r", 0) == 0);
  p = {};
  p.delta_r = 60;
  CHECK(message(p).rfind("delta_r", 0) == 0);
  p = {};
  p.samples_per_ray = 1;
  CHECK(message(p).rfind("samples_per_ray", 0) == 0);
  p = {};
  p.max_radius_mm = 0;
  CHECK(message(p).rfind("max_radius_mm", 0) == 0);
  p = {};
  p.subdivisions = 8;
  CHECK(message(p).rfind("subdivisions", 0) == 0);
  p = {};
  p.mean_region_d = 4;
  CHECK(message(p).rfind("mean_region_d", 0) == 0);
}

TEST_CASE("to_dimacs emits 1-based ids and one line per arc") {
  RayField w(1, 2);
  w.values = {1.0, -2.0};
  const FlowNetwork net = assemble_graph(w, Adjacency(1), 0);
  const std::string text = to_dimacs(net);
  CHECK(text.rfind("p max 4 " + std::to_string(net.arcs.size()) + "\n", 0) == 0);
  CHECK(text.find("n 3 s\n") != std::string::npos);
  CHECK(text.find("n 4 t\n") != std::string::npos);
  std::size_t arc_lines = 0;
  for (std::size_t pos = text.find("\na "); pos != std::string::npos; pos = text.find("\na ", pos + 1)) ++arc_lines;
  CHECK(arc_lines == net.arcs.size());
}
