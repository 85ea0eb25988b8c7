#pragma once

#include "json.hpp"

#include "gbmcut/segmenter.hpp"

namespace gbmcut {

// Machine-readable record of a segmentation run, shared by the CLI report and
// the HTTP service so both expose the same fields.
nlohmann::ordered_json segmentation_summary(const SegmentationResult& result,
                                            const SegmentationParams& params, Vec3 seed);

nlohmann::ordered_json runtime_json(const PhaseTimings& t);

// counts[z] = number of rays whose cut index is z; length samples_per_ray.
std::vector<std::size_t> cut_index_histogram(const std::vector<int>& cut_indices, int samples_per_ray);

}  // namespace gbmcut
