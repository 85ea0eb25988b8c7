#include "gbmcut/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <random>
#include <sstream>

#include "gbmcut/metaimage.hpp"

namespace gbmcut {

double dice(const Mask& a, const Mask& b) {
  if (a.geometry().dims != b.geometry().dims) {
    throw InvalidArgument("dice: mask dimensions differ");
  }
  const auto& da = a.data();
  const auto& db = b.data();
  std::size_t both = 0;
  std::size_t total = 0;
  for (std::size_t n = 0; n < da.size(); ++n) {
    both += static_cast<std::size_t>(da[n] & db[n]);
    total += static_cast<std::size_t>(da[n]) + db[n];
  }
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(total);
}

RaterStats rater_stats(const std::vector<double>& dsc_values) {
  if (dsc_values.empty()) throw InvalidArgument("rater_stats: empty list");
  RaterStats s;
  s.n = dsc_values.size();
  const auto [lo, hi] = std::minmax_element(dsc_values.begin(), dsc_values.end());
  s.min = *lo;
  s.max = *hi;
  double sum = 0.0;
  for (double v : dsc_values) sum += v;
  // Rounding can push the mean a hair outside [min, max] for near-equal values.
  s.mu = std::clamp(sum / static_cast<double>(s.n), s.min, s.max);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : dsc_values) ss += (v - s.mu) * (v - s.mu);
    s.sigma = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::vector<double> DiceReport::dsc_values() const {
  std::vector<double> out;
  for (const auto& c : cases) {
    if (c.dsc) out.push_back(*c.dsc);
  }
  return out;
}

std::size_t DiceReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return !c.dsc; }));
}

DiceReport compare_batch(const std::vector<MaskPair>& pairs) {
  DiceReport report;
  report.cases.resize(pairs.size());
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    CaseResult& c = report.cases[n];
    std::ostringstream id;
    id << "case_" << (n + 1 < 10 ? "0" : "") << n + 1;
    c.case_id = id.str();
    c.path_a = pairs[n].first.string();
    c.path_b = pairs[n].second.string();
    try {
      const Mask a = mask_from_volume(load_volume(pairs[n].first));
      const Mask b = mask_from_volume(load_volume(pairs[n].second));
      c.dsc = dice(a, b);
    } catch (const Error& e) {
      c.error = e.what();
    }
  }
  const auto values = report.dsc_values();
  if (!values.empty()) report.stats = rater_stats(values);
  return report;
}

std::vector<MaskPair> read_pair_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  const auto base = manifest.parent_path();
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };
  std::vector<MaskPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected two tab-separated paths");
    }
    pairs.emplace_back(resolve(line.substr(0, tab)), resolve(line.substr(tab + 1)));
  }
  return pairs;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

std::string report_text(const DiceReport& report) {
  std::ostringstream out;
  out << "case_id\tdsc\n";
  for (const auto& c : report.cases) {
    out << c.case_id << '\t' << (c.dsc ? format_percent(*c.dsc) : "error: " + c.error) << '\n';
  }
  if (report.stats) {
    const auto& s = *report.stats;
    char mu[32];
    std::snprintf(mu, sizeof mu, "%.2f", s.mu * 100.0);
    out << "min\t" << format_percent(s.min) << '\n';
    out << "max\t" << format_percent(s.max) << '\n';
    out << "mu+-sigma\t" << mu << " +- " << format_percent(s.sigma) << '\n';
  } else {
    out << "no successful cases\n";
  }
  return out.str();
}

std::string report_json(const DiceReport& report) {
  nlohmann::ordered_json doc;
  doc["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : report.cases) {
    nlohmann::ordered_json rec;
    rec["case_id"] = c.case_id;
    if (c.dsc) {
      rec["dsc"] = *c.dsc;
    } else {
      rec["dsc"] = nullptr;
      rec["error"] = c.error;
    }
    rec["a"] = c.path_a;
    rec["b"] = c.path_b;
    doc["cases"].push_back(std::move(rec));
  }
  if (report.stats) {
    const auto& s = *report.stats;
    doc["aggregate"] = {{"n", s.n}, {"min", s.min}, {"max", s.max}, {"mu", s.mu}, {"sigma", s.sigma}};
  } else {
    doc["aggregate"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

void PhantomSpec::validate() const {
  geometry.validate();
  if (const auto* ball = std::get_if<Ball>(&shape)) {
    if (!(ball->radius > 0.0)) throw InvalidArgument("radius: must be > 0");
  } else {
    const auto& e = std::get<Ellipsoid>(shape);
    if (!(e.semi_axes.x > 0.0 && e.semi_axes.y > 0.0 && e.semi_axes.z > 0.0)) {
      throw InvalidArgument("semi_axes: must be > 0");
    }
  }
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma: must be >= 0");
}

Phantom generate_phantom(const PhantomSpec& spec, std::uint64_t rng_seed) {
  spec.validate();
  const Geometry& g = spec.geometry;
  Vec3 center;
  Vec3 axes;
  if (const auto* ball = std::get_if<Ball>(&spec.shape)) {
    center = ball->center;
    axes = {ball->radius, ball->radius, ball->radius};
  } else {
    center = std::get<Ellipsoid>(spec.shape).center;
    axes = std::get<Ellipsoid>(spec.shape).semi_axes;
  }

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  std::vector<float> data(g.voxel_count());
  std::vector<std::uint8_t> truth(g.voxel_count());
  for (std::int64_t k = 0; k < g.dims[2]; ++k) {
    for (std::int64_t j = 0; j < g.dims[1]; ++j) {
      for (std::int64_t i = 0; i < g.dims[0]; ++i) {
        const Vec3 p = g.voxel_to_world({i, j, k}) - center;
        const double q = (p.x / axes.x) * (p.x / axes.x) + (p.y / axes.y) * (p.y / axes.y) +
                         (p.z / axes.z) * (p.z / axes.z);
        const bool inside = q <= 1.0;
        const auto lin = g.linear({i, j, k});
        truth[lin] = inside ? 1 : 0;
        double v = inside ? spec.inside_value : spec.outside_value;
        if (spec.noise_sigma > 0.0) v += noise(rng);
        data[lin] = static_cast<float>(v);
      }
    }
  }
  return Phantom{Volume(g, std::move(data), ElementKind::kF32), Mask(g, std::move(truth))};
}

}  // namespace gbmcut
