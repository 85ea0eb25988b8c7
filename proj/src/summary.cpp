#include "gbmcut/summary.hpp"

namespace gbmcut {

nlohmann::ordered_json runtime_json(const PhaseTimings& t) {
  return {{"mean_gray", t.mean_gray_ms}, {"rays", t.rays_ms},       {"costs", t.costs_ms},
          {"graph_build", t.graph_build_ms}, {"solve", t.solve_ms}, {"voxelize", t.voxelize_ms},
          {"total", t.total_ms}};
}

std::vector<std::size_t> cut_index_histogram(const std::vector<int>& cut_indices, int samples_per_ray) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(samples_per_ray), 0);
  for (int z : cut_indices) {
    if (z >= 0 && z < samples_per_ray) ++counts[static_cast<std::size_t>(z)];
  }
  return counts;
}

nlohmann::ordered_json segmentation_summary(const SegmentationResult& result,
                                            const SegmentationParams& params, Vec3 seed) {
  nlohmann::ordered_json doc;
  doc["seed_mm"] = {seed.x, seed.y, seed.z};
  doc["params"] = {{"delta_r", params.delta_r},
                   {"subdivisions", params.subdivisions},
                   {"samples_per_ray", params.samples_per_ray},
                   {"max_radius_mm", params.max_radius_mm},
                   {"mean_region_d", params.mean_region_d}};
  doc["volume_mm3"] = result.volume_mm3;
  doc["voxel_count"] = result.mask.count();
  doc["mean_gray"] = result.mean_gray;
  doc["flow_value"] = result.flow_value;
  doc["runtime_ms"] = runtime_json(result.runtime);
  doc["cut_index_histogram"] = cut_index_histogram(result.cut_indices, params.samples_per_ray);
  doc["cut_indices"] = result.cut_indices;
  doc["cut_radii_mm"] = result.cut_radii_mm;
  doc["warnings"] = result.warnings;
  return doc;
}

}  // namespace gbmcut
