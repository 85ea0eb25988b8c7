#include "gbmcut/surface_oracle.hpp"

#include <cmath>
#include <limits>

namespace gbmcut {

SurfaceOptimum brute_force_min_surface(const RayField& weights, const Adjacency& adjacency,
                                       int delta_r, CutSide side) {
  const std::size_t rays = weights.rays;
  const std::size_t samples = weights.samples;
  if (rays != adjacency.size()) throw InvalidArgument("weight rows do not match adjacency");
  if (rays == 0 || samples == 0) throw InvalidArgument("empty instance");
  if (std::pow(static_cast<double>(samples), static_cast<double>(rays)) > kMaxOracleStates) {
    throw InvalidArgument("instance too large for exhaustive enumeration");
  }

  // prefix[r][z] = sum_{k <= z} w(r,k), scaled exactly like assemble_graph.
  std::vector<std::vector<std::int64_t>> prefix(rays, std::vector<std::int64_t>(samples));
  SurfaceOptimum best;
  for (std::size_t r = 0; r < rays; ++r) {
    std::int64_t acc = 0;
    for (std::size_t z = 0; z < samples; ++z) {
      const std::int64_t w = scale_capacity(weights.at(r, z));
      acc += w;
      prefix[r][z] = acc;
      if (w < 0) best.offset -= w;
    }
  }

  std::vector<int> z(rays, 0);
  std::int64_t best_sum = std::numeric_limits<std::int64_t>::max();
  const auto smooth = [&] {
    for (std::size_t r = 0; r < rays; ++r) {
      for (auto rn : adjacency[r]) {
        if (std::abs(z[r] - z[rn]) > delta_r) return false;
      }
    }
    return true;
  };

  // Odometer over {0..Z-1}^R in lexicographic order, first ray most significant.
  for (;;) {
    if (smooth()) {
      std::int64_t sum = 0;
      for (std::size_t r = 0; r < rays; ++r) sum += prefix[r][z[r]];
      const bool better = sum < best_sum || (sum == best_sum && side == CutSide::kMaximalSource);
      if (better) {
        best_sum = sum;
        best.indices = z;
      }
    }
    std::size_t pos = rays;
    while (pos > 0) {
      --pos;
      if (++z[pos] < static_cast<int>(samples)) break;
      z[pos] = 0;
      if (pos == 0) {
        best.prefix_sum = best_sum;
        return best;
      }
    }
  }
}

}  // namespace gbmcut
