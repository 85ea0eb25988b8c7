#include "gbmcut/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "gbmcut/evaluator.hpp"
#include "gbmcut/max_flow.hpp"
#include "gbmcut/metaimage.hpp"
#include "gbmcut/segmenter.hpp"
#include "gbmcut/summary.hpp"

namespace gbmcut {
namespace {

// Raised for flag values that parse as strings but are semantically invalid.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<double> parse_list(const std::string& flag, const std::string& text, std::size_t count) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    double v = 0.0;
    const auto* end = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (item.empty() || ec != std::errc{} || ptr != end) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.size() != count) {
    throw UsageError(flag + ": expected " + std::to_string(count) + " comma-separated values");
  }
  return out;
}

Vec3 parse_vec3(const std::string& flag, const std::string& text) {
  const auto v = parse_list(flag, text, 3);
  return {v[0], v[1], v[2]};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

struct SegmentFlags {
  std::string input;
  std::string seed;
  std::string seed_voxel;
  std::string output;
  std::string report;
  SegmentationParams params;
};

int cmd_segment(const SegmentFlags& f, std::ostream& out, std::ostream& err) {
  try {
    if (f.seed.empty() == f.seed_voxel.empty()) {
      throw UsageError("exactly one of --seed or --seed-voxel is required");
    }
    f.params.validate();
    const Vec3 seed_arg = parse_vec3(f.seed.empty() ? "--seed-voxel" : "--seed",
                                     f.seed.empty() ? f.seed_voxel : f.seed);
    if (!f.seed_voxel.empty() &&
        (seed_arg.x != std::floor(seed_arg.x) || seed_arg.y != std::floor(seed_arg.y) ||
         seed_arg.z != std::floor(seed_arg.z))) {
      throw UsageError("--seed-voxel: indices must be integers");
    }

    const Volume volume = load_volume(f.input);
    Vec3 seed = seed_arg;
    if (!f.seed_voxel.empty()) {
      seed = volume.voxel_to_world({static_cast<std::int64_t>(seed_arg.x),
                                    static_cast<std::int64_t>(seed_arg.y),
                                    static_cast<std::int64_t>(seed_arg.z)});
    }
    const SegmentationResult result = segment(volume, seed, f.params);
    if (!f.output.empty()) save_mask(result.mask, f.output);
    const auto summary = segmentation_summary(result, f.params, seed);
    if (!f.report.empty()) write_text(f.report, summary.dump(2) + "\n");

    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    out << std::fixed << std::setprecision(3);
    out << "volume_mm3\t" << result.volume_mm3 << '\n';
    out << "mean_gray\t" << result.mean_gray << '\n';
    out << "graph_build_ms\t" << result.runtime.graph_build_ms << '\n';
    out << "solve_ms\t" << result.runtime.solve_ms << '\n';
    out << "total_ms\t" << result.runtime.total_ms << '\n';
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OutOfBounds& e) {
    err << "error: " << e.what() << '\n';
    return kExitSeedOutOfBounds;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

struct EvaluateFlags {
  std::string manifest;
  std::vector<std::string> pairs;
  std::string report;
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out, std::ostream& err) {
  try {
    if (f.manifest.empty() == f.pairs.empty()) {
      throw UsageError("exactly one of --pairs or --pair is required");
    }
    if (f.pairs.size() % 2 != 0) throw UsageError("--pair takes two paths");
    std::vector<MaskPair> pairs;
    if (!f.manifest.empty()) {
      pairs = read_pair_manifest(f.manifest);
    } else {
      for (std::size_t n = 0; n < f.pairs.size(); n += 2) pairs.emplace_back(f.pairs[n], f.pairs[n + 1]);
    }
    if (pairs.empty()) throw UsageError("no mask pairs given");

    const DiceReport report = compare_batch(pairs);
    if (!f.report.empty()) write_text(f.report, report_json(report));
    out << report_text(report);
    for (const auto& c : report.cases) {
      if (!c.dsc) err << "warning: " << c.case_id << ": " << c.error << '\n';
    }
    return report.stats ? kExitOk : kExitIo;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

struct PhantomFlags {
  std::string dims = "64,64,64";
  std::string spacing = "1,1,1";
  std::string origin = "0,0,0";
  std::string ball;
  std::string ellipsoid;
  double inside = 200.0;
  double outside = 50.0;
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;
  std::string out_volume;
  std::string out_mask;
};

int cmd_phantom(const PhantomFlags& f, std::ostream& out, std::ostream& err) {
  try {
    if (!f.ball.empty() && !f.ellipsoid.empty()) throw UsageError("--ball and --ellipsoid are exclusive");
    PhantomSpec spec;
    const auto dims = parse_list("--dims", f.dims, 3);
    for (int a = 0; a < 3; ++a) {
      if (dims[a] < 1 || dims[a] != std::floor(dims[a])) throw UsageError("--dims: positive integers required");
      spec.geometry.dims[a] = static_cast<std::int64_t>(dims[a]);
    }
    spec.geometry.spacing = parse_vec3("--spacing", f.spacing);
    spec.geometry.origin = parse_vec3("--origin", f.origin);
    if (!f.ellipsoid.empty()) {
      const auto e = parse_list("--ellipsoid", f.ellipsoid, 6);
      spec.shape = Ellipsoid{{e[0], e[1], e[2]}, {e[3], e[4], e[5]}};
    } else if (!f.ball.empty()) {
      const auto b = parse_list("--ball", f.ball, 4);
      spec.shape = Ball{{b[0], b[1], b[2]}, b[3]};
    } else {
      const Geometry& g = spec.geometry;
      const Vec3 center{g.origin.x + static_cast<double>(g.dims[0] / 2) * g.spacing.x,
                        g.origin.y + static_cast<double>(g.dims[1] / 2) * g.spacing.y,
                        g.origin.z + static_cast<double>(g.dims[2] / 2) * g.spacing.z};
      spec.shape = Ball{center, 15.0};
    }
    spec.inside_value = f.inside;
    spec.outside_value = f.outside;
    spec.noise_sigma = f.noise_sigma;
    spec.validate();

    const Phantom phantom = generate_phantom(spec, f.rng_seed);
    save_volume(phantom.volume, f.out_volume);
    save_mask(phantom.truth, f.out_mask);
    out << "voxels_inside\t" << phantom.truth.count() << '\n';
    out << "volume_mm3\t" << compute_volume(phantom.truth) << '\n';
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_solve_dimacs(const std::string& input, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw IoError("cannot open " + input);
    std::stringstream text;
    text << in.rdbuf();
    const FlowNetwork net = parse_dimacs(text.str());
    const CutResult cut = max_flow(net);
    const auto source_size = std::count(cut.source_set.begin(), cut.source_set.end(), std::uint8_t{1});
    out << "flow " << cut.flow << '\n';
    out << "source_set_size " << source_size << '\n';
    return kExitOk;
  } catch (const DimacsParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seeded radial graph-cut tumour segmentation", "gbmcut"};
  app.require_subcommand(1);

  SegmentFlags seg;
  auto* segment_cmd = app.add_subcommand("segment", "Segment a volume from a seed point");
  segment_cmd->add_option("--input", seg.input, "MetaImage volume (.mhd/.mha)")->required();
  segment_cmd->add_option("--seed", seg.seed, "Seed point x,y,z in mm");
  segment_cmd->add_option("--seed-voxel", seg.seed_voxel, "Seed voxel i,j,k");
  segment_cmd->add_option("--delta-r", seg.params.delta_r, "Smoothness constraint")->capture_default_str();
  segment_cmd->add_option("--rays-subdiv", seg.params.subdivisions, "Icosphere subdivisions")->capture_default_str();
  segment_cmd->add_option("--samples", seg.params.samples_per_ray, "Samples per ray")->capture_default_str();
  segment_cmd->add_option("--max-radius", seg.params.max_radius_mm, "Ray length in mm")->capture_default_str();
  segment_cmd->add_option("--mean-d", seg.params.mean_region_d, "Edge of the mean-gray cube (voxels)")->capture_default_str();
  segment_cmd->add_option("--output", seg.output, "Mask output (.mhd/.mha)");
  segment_cmd->add_option("--report", seg.report, "JSON report output");

  EvaluateFlags ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Dice agreement over mask pairs");
  evaluate_cmd->add_option("--pairs", ev.manifest, "Manifest: one 'a<TAB>b' pair per line");
  evaluate_cmd->add_option("--pair", ev.pairs, "Mask pair a b (repeatable)")->type_size(2)->expected(1, CLI::detail::expected_max_vector_size)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  evaluate_cmd->add_option("--report", ev.report, "JSON report output");

  PhantomFlags ph;
  auto* phantom_cmd = app.add_subcommand("phantom", "Write a synthetic volume and its ground-truth mask");
  phantom_cmd->add_option("--dims", ph.dims, "nx,ny,nz")->capture_default_str();
  phantom_cmd->add_option("--spacing", ph.spacing, "sx,sy,sz in mm")->capture_default_str();
  phantom_cmd->add_option("--origin", ph.origin, "ox,oy,oz in mm")->capture_default_str();
  phantom_cmd->add_option("--ball", ph.ball, "cx,cy,cz,r in mm");
  phantom_cmd->add_option("--ellipsoid", ph.ellipsoid, "cx,cy,cz,a,b,c in mm");
  phantom_cmd->add_option("--inside", ph.inside, "Gray value inside")->capture_default_str();
  phantom_cmd->add_option("--outside", ph.outside, "Gray value outside")->capture_default_str();
  phantom_cmd->add_option("--noise-sigma", ph.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  phantom_cmd->add_option("--rng-seed", ph.rng_seed, "Noise RNG seed")->capture_default_str();
  phantom_cmd->add_option("--out-volume", ph.out_volume, "Volume output")->required();
  phantom_cmd->add_option("--out-mask", ph.out_mask, "Mask output")->required();

  std::string dimacs_input;
  auto* dimacs_cmd = app.add_subcommand("solve-dimacs", "Max flow of a DIMACS network");
  dimacs_cmd->add_option("--input", dimacs_input, "DIMACS max-flow file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  if (*segment_cmd) {
    if (seg.seed.empty() && seg.seed_voxel.empty()) {
      err << "error: --seed or --seed-voxel is required\n" << segment_cmd->help();
      return kExitUsage;
    }
    return cmd_segment(seg, out, err);
  }
  if (*evaluate_cmd) return cmd_evaluate(ev, out, err);
  if (*phantom_cmd) return cmd_phantom(ph, out, err);
  return cmd_solve_dimacs(dimacs_input, out, err);
}

}  // namespace gbmcut
