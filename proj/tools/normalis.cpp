// normalis: surface-normal estimation from depth images, synthetic suites,
// benchmarks and the closed-form inclination cross-check.
//
// Exit codes: 0 success, 1 assertion or metric failure, 2 usage or I/O error.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "normalis/bench.hpp"

namespace {

using namespace normalis;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

struct SynthArgs {
  SynthConfig config;
  std::string out_dir;
  std::string depth_format = "pfm-meters";
  std::string normal_format = "pfm";
};

int run_synth(const SynthArgs& args) {
  SynthConfig config = args.config;
  config.depth_format = parse_depth_format(args.depth_format);
  config.normal_extension = "." + args.normal_format;
  const fs::path manifest = synthesize_suite(config, args.out_dir);
  std::cout << "wrote " << config.planes + config.spheres + config.dihedrals << " scenes to " << manifest.string()
            << '\n';
  return kOk;
}

struct EstimateArgs {
  std::string depth;
  std::string depth_format = "pfm-meters";
  std::vector<double> intrinsics;
  std::string estimator = "sne+";
  std::string kernel = "central";
  int radius = 1;
  int pca_window = 5;
  std::string out;
  std::string out_color;
  std::string gt;
  int jobs = 1;
};

// --jobs wins; otherwise NORMALIS_JOBS, otherwise 1. CLI11's envname()
// silently drops values that fail validation, so the variable is read here.
bool resolve_jobs(const CLI::Option* flag, int& jobs) {
  if (flag->count() == 0) {
    if (const char* env = std::getenv("NORMALIS_JOBS"); env && *env) {
      const std::string_view text(env);
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), jobs);
      if (ec != std::errc() || end != text.data() + text.size() || jobs < 1) {
        std::cerr << "error: NORMALIS_JOBS must be a positive integer (got '" << env << "')\n";
        return false;
      }
    }
  }
  return true;
}

int run_estimate(const EstimateArgs& args) {
  if (!fs::is_regular_file(args.depth)) {
    std::cerr << "error: depth file " << args.depth << " does not exist\n";
    return kUsage;
  }
  ManifestEntry entry;
  entry.id = "input";
  entry.depth_path = args.depth;
  entry.depth_format = parse_depth_format(args.depth_format);

  // Image size comes from the file; read once to learn it.
  ImageSize size;
  switch (entry.depth_format) {
    case DepthFormat::PfmMeters:
    case DepthFormat::PfmDisparity: {
      const FloatImage raw = read_pfm(entry.depth_path);
      size = {raw.width, raw.height};
      break;
    }
    case DepthFormat::Png16Millimeters: size = read_depth_png16(entry.depth_path).size(); break;
  }
  entry.intrinsics = {args.intrinsics.at(0), args.intrinsics.at(1), args.intrinsics.at(2), args.intrinsics.at(3),
                      size.width, size.height};
  entry.intrinsics.validate();

  EstimatorConfig cfg;
  cfg.estimator = parse_estimator(args.estimator);
  cfg.kernel = parse_gradient_kernel(args.kernel);
  cfg.neighborhood = Neighborhood::square(args.radius);
  cfg.pca_window = args.pca_window;

  const EntryDepth depth = load_entry_depth(entry);
  const NormalMap normals = std::visit(
      [&](const auto& img) { return estimate_normals(img, entry.intrinsics, cfg, {args.jobs}); }, depth);
  write_normal_map(normals, args.out);
  if (!args.out_color.empty()) write_normal_color_png(normals, args.out_color);
  std::cout << "wrote " << args.out << " (" << normals.valid_count() << " valid pixels)\n";

  if (!args.gt.empty()) {
    if (!fs::is_regular_file(args.gt)) {
      std::cerr << "error: ground-truth file " << args.gt << " does not exist\n";
      return kUsage;
    }
    const ErrorSummary s = summarize(angular_error_map(normals, read_normal_map(args.gt)));
    std::cout << fmt::format("e_A mean {:.6f} deg, median {:.6f} deg, max {:.6f} deg over {} px\n", s.mean,
                             s.median, s.max, s.count);
  }
  return kOk;
}

struct BenchArgs {
  std::string manifest;
  std::vector<std::string> estimators;
  std::string kernel = "central";
  int radius = 1;
  int pca_window = 5;
  int border = 0;
  int repetitions = 5;
  std::string out_csv;
  std::string out_json;
  std::string error_maps;
  int jobs = 1;
};

int run_bench(const BenchArgs& args) {
  if (!fs::is_regular_file(args.manifest)) {
    std::cerr << "error: manifest " << args.manifest << " does not exist\n";
    return kUsage;
  }
  const DatasetManifest manifest = load_manifest(args.manifest);
  BenchOptions options;
  const auto names = split_list(args.estimators);
  if (names.empty()) {
    options.estimators.assign(all_estimators().begin(), all_estimators().end());
  } else {
    for (const auto& name : names) options.estimators.push_back(parse_estimator(name));
  }
  options.kernel = parse_gradient_kernel(args.kernel);
  options.neighborhood_radius = args.radius;
  options.pca_window = args.pca_window;
  options.border = args.border;
  options.repetitions = args.repetitions;
  options.jobs = args.jobs;
  if (!args.error_maps.empty()) options.error_map_dir = fs::path(args.error_maps);

  const BenchmarkReport report = run_benchmark(manifest, options);

  if (!args.out_csv.empty()) {
    std::ofstream out(args.out_csv);
    if (!out) throw IoError("cannot write " + args.out_csv);
    write_csv(report, out);
  }
  if (!args.out_json.empty()) {
    std::ofstream out(args.out_json);
    if (!out) throw IoError("cannot write " + args.out_json);
    out << report_json(report) << '\n';
  }

  std::cout << fmt::format("{:<12} {:>8} {:>9} {:>12} {:>12} {:>10}\n", "estimator", "entries", "failures",
                           "e_A (deg)", "band (deg)", "ms/image");
  for (const auto& a : report.aggregates) {
    std::cout << fmt::format("{:<12} {:>8} {:>9} {:>12.4f} {:>12} {:>10.3f}\n", to_string(a.estimator), a.entries,
                             a.failures, a.mean_ea,
                             a.mean_band_ea ? fmt::format("{:.4f}", *a.mean_band_ea) : std::string("-"), a.mean_ms);
  }
  for (const auto& r : report.rows) {
    if (!r.ok()) std::cerr << "failed: " << r.entry_id << " / " << to_string(r.estimator) << ": " << r.failure << '\n';
  }
  return report.failures() == 0 ? kOk : kFailure;
}

struct OracleArgs {
  long long trials = 10000;
  std::uint64_t seed = 1;
  double grid_step = 1e-3;
};

int run_oracle(const OracleArgs& args) {
  if (args.trials < 1) {
    std::cerr << "error: --trials must be >= 1\n";
    return kUsage;
  }
  const OracleCheckResult r = run_oracle_check(static_cast<std::size_t>(args.trials), args.seed, args.grid_step);
  std::cout << fmt::format(
      "trials {}  violations {}  max |dtheta| {:.3e} rad  max objective shortfall {:.3e}  grid step {:.3e}\n",
      r.trials, r.violations, r.max_theta_deviation, r.max_objective_shortfall, args.grid_step);
  std::cout << (r.passed() ? "PASS" : "FAIL") << '\n';
  return r.passed() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface normals from depth/disparity images: estimation, synthetic suites, benchmarks"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic scene suite with ground-truth normals");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--planes", synth.config.planes, "Number of random planes")->capture_default_str();
  synth_cmd->add_option("--spheres", synth.config.spheres, "Number of spheres")->capture_default_str();
  synth_cmd->add_option("--dihedrals", synth.config.dihedrals, "Number of dihedral (ridge) scenes")
      ->capture_default_str();
  synth_cmd->add_option("--width", synth.config.width)->capture_default_str();
  synth_cmd->add_option("--height", synth.config.height)->capture_default_str();
  synth_cmd->add_option("--focal", synth.config.focal, "Focal length in pixels")->capture_default_str();
  synth_cmd->add_option("--max-inclination", synth.config.max_inclination_deg, "Degrees")->capture_default_str();
  synth_cmd->add_option("--noise", synth.config.noise_fraction, "Depth noise sigma as a fraction of depth")
      ->capture_default_str();
  synth_cmd->add_option("--ridge-half-width", synth.config.ridge_half_width, "Pixels")->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed)->capture_default_str();
  synth_cmd->add_option("--depth-format", synth.depth_format)
      ->check(CLI::IsMember({"pfm-meters", "png16-millimeters", "pfm-disparity"}))
      ->capture_default_str();
  synth_cmd->add_option("--normal-format", synth.normal_format)
      ->check(CLI::IsMember({"pfm", "png"}))
      ->capture_default_str();

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Estimate a normal map from one depth/disparity image");
  est_cmd->add_option("--depth", est.depth, "Input depth or disparity file")->required();
  est_cmd->add_option("--depth-format", est.depth_format)
      ->check(CLI::IsMember({"pfm-meters", "png16-millimeters", "pfm-disparity"}))
      ->capture_default_str();
  est_cmd->add_option("--intrinsics", est.intrinsics, "fx fy u0 v0")->expected(4)->required();
  est_cmd->add_option("--estimator", est.estimator)->capture_default_str();
  est_cmd->add_option("--kernel", est.kernel, "central, sobel or prewitt")->capture_default_str();
  est_cmd->add_option("--neighborhood-radius", est.radius)->capture_default_str();
  est_cmd->add_option("--pca-window", est.pca_window)->capture_default_str();
  est_cmd->add_option("--out", est.out, "Normal map (.png 16-bit or .pfm)")->required();
  est_cmd->add_option("--out-color", est.out_color, "8-bit colour visualization PNG");
  est_cmd->add_option("--gt", est.gt, "Ground-truth normal map; prints e_A");
  auto* est_jobs =
      est_cmd->add_option("--jobs", est.jobs, "Worker threads (env NORMALIS_JOBS)")->check(CLI::PositiveNumber);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark estimators over a dataset manifest");
  bench_cmd->add_option("--manifest", bench.manifest)->required();
  bench_cmd->add_option("--estimators", bench.estimators, "Comma-separated list (default: all)");
  bench_cmd->add_option("--kernel", bench.kernel)->capture_default_str();
  bench_cmd->add_option("--neighborhood-radius", bench.radius)->capture_default_str();
  bench_cmd->add_option("--pca-window", bench.pca_window)->capture_default_str();
  bench_cmd->add_option("--border", bench.border, "Unscored border width in pixels")->capture_default_str();
  bench_cmd->add_option("--repetitions", bench.repetitions, "Timed runs per pair (median reported)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--out-csv", bench.out_csv);
  bench_cmd->add_option("--out-json", bench.out_json);
  bench_cmd->add_option("--emit-error-maps", bench.error_maps, "Directory for per-entry error-map PNGs");
  auto* bench_jobs =
      bench_cmd->add_option("--jobs", bench.jobs, "Worker threads (env NORMALIS_JOBS)")->check(CLI::PositiveNumber);

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Cross-check closed-form inclination against grid search");
  oracle_cmd->add_option("--trials", oracle.trials)->capture_default_str();
  oracle_cmd->add_option("--seed", oracle.seed)->capture_default_str();
  oracle_cmd->add_option("--grid-step", oracle.grid_step)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*est_cmd) return resolve_jobs(est_jobs, est.jobs) ? run_estimate(est) : kUsage;
    if (*bench_cmd) return resolve_jobs(bench_jobs, bench.jobs) ? run_bench(bench) : kUsage;
    if (*oracle_cmd) return run_oracle(oracle);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
