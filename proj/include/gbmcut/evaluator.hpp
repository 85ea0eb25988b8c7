#pragma once

// Overlap scoring between masks, rater-agreement statistics, and analytic
// phantoms with known ground truth.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gbmcut/volume.hpp"

namespace gbmcut {

// 2|A n B| / (|A| + |B|); 1.0 when both are empty. Throws InvalidArgument on
// a dims mismatch.
double dice(const Mask& a, const Mask& b);

struct RaterStats {
  std::size_t n = 0;
  double min = 0.0;
  double max = 0.0;
  double mu = 0.0;
  double sigma = 0.0;  // sample standard deviation, n-1 denominator; 0 for n = 1
};

// Throws InvalidArgument for an empty list.
RaterStats rater_stats(const std::vector<double>& dsc_values);

struct CaseResult {
  std::string case_id;
  std::string path_a;
  std::string path_b;
  std::optional<double> dsc;
  std::string error;  // set when dsc is empty
};

struct DiceReport {
  std::vector<CaseResult> cases;
  std::optional<RaterStats> stats;  // empty when no case succeeded

  [[nodiscard]] std::vector<double> dsc_values() const;
  [[nodiscard]] std::size_t failures() const;
};

using MaskPair = std::pair<std::filesystem::path, std::filesystem::path>;

// Loads and scores every pair; a failing case records its error and the batch
// continues.
DiceReport compare_batch(const std::vector<MaskPair>& pairs);

// Reads "a<TAB>b" lines; blank lines and lines starting with '#' are skipped.
// Relative paths resolve against the manifest's directory.
std::vector<MaskPair> read_pair_manifest(const std::filesystem::path& manifest);

// Percent with two decimals, e.g. 0.79961 -> "79.96%".
std::string format_percent(double fraction);

// Tab-separated case lines followed by the min / max / mu +- sigma rows.
std::string report_text(const DiceReport& report);

// {"cases":[{"case_id","dsc"|"error",...}], "aggregate":{"min","max","mu","sigma","n"}}
std::string report_json(const DiceReport& report);

struct Ball {
  Vec3 center;
  double radius = 0.0;
};

struct Ellipsoid {
  Vec3 center;
  Vec3 semi_axes;
};

struct PhantomSpec {
  Geometry geometry;
  std::variant<Ball, Ellipsoid> shape = Ball{};
  double inside_value = 200.0;
  double outside_value = 50.0;
  double noise_sigma = 0.0;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct Phantom {
  Volume volume;
  Mask truth;
};

// Indicator by voxel-centre test plus seeded Gaussian noise. The volume is
// stored as MET_FLOAT.
Phantom generate_phantom(const PhantomSpec& spec, std::uint64_t rng_seed);

}  // namespace gbmcut
