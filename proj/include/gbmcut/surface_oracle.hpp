#pragma once

// Exhaustive reference for the optimal radial surface on tiny instances. It
// never builds a graph, so it is an independent check on assemble_graph +
// max_flow + extract_cut_indices.

#include <cstdint>
#include <vector>

#include "gbmcut/icosphere.hpp"
#include "gbmcut/max_flow.hpp"
#include "gbmcut/ray_graph.hpp"

namespace gbmcut {

struct SurfaceOptimum {
  std::vector<int> indices;
  std::int64_t prefix_sum = 0;  // sum_r sum_{z <= z_r} w(r,z), scaled
  std::int64_t offset = 0;      // sum of |w| over negative weights, scaled
  [[nodiscard]] std::int64_t cut_cost() const { return prefix_sum + offset; }
};

inline constexpr double kMaxOracleStates = 1e6;

// Enumerates all z in {0..Z-1}^R with |z_r - z_n| <= delta_r on adjacent rays.
// Among equal-cost optima returns the lexicographically smallest vector for
// kMinimalSource and the largest for kMaximalSource (the latter is the
// componentwise maximum of all optima). Throws InvalidArgument if Z^R > 1e6.
SurfaceOptimum brute_force_min_surface(const RayField& weights, const Adjacency& adjacency,
                                       int delta_r, CutSide side = CutSide::kMinimalSource);

}  // namespace gbmcut
