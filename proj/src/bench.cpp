#include "normalis/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "parallel.hpp"

namespace normalis {
namespace {

using Clock = std::chrono::steady_clock;

std::string file_stem_for(const std::string& id, Estimator e) {
  std::string name = id + "__";
  for (char c : to_string(e)) {
    if (c == '+') {
      name += "plus";
    } else {
      name += c;
    }
  }
  return name;
}

BinaryMask interior_mask(ImageSize size, int border) {
  BinaryMask m(size.width, size.height);
  for (int v = border; v < size.height - border; ++v) {
    for (int u = border; u < size.width - border; ++u) m.set(u, v, true);
  }
  return m;
}

// Scores every estimator on one manifest entry.
std::vector<BenchmarkRow> bench_entry(const ManifestEntry& entry, const BenchOptions& options) {
  std::vector<BenchmarkRow> rows;
  for (Estimator e : options.estimators) {
    BenchmarkRow row;
    row.entry_id = entry.id;
    row.estimator = e;
    rows.push_back(std::move(row));
  }
  auto fail_all = [&](const std::string& reason) {
    for (auto& r : rows) r.failure = reason;
    return rows;
  };

  std::optional<EntryDepth> depth;
  NormalMap gt;
  BinaryMask region(entry.intrinsics.width, entry.intrinsics.height, true);
  try {
    depth = load_entry_depth(entry);
    if (!entry.gt_normal_path) return fail_all("no ground-truth normals");
    gt = read_normal_map(*entry.gt_normal_path);
    if (gt.size() != entry.intrinsics.size()) return fail_all("ground-truth size does not match intrinsics");
    if (entry.gt_mask_path) {
      region = read_mask_png(*entry.gt_mask_path);
      if (region.size != entry.intrinsics.size()) return fail_all("evaluation mask size does not match intrinsics");
    }
  } catch (const std::exception& ex) {
    return fail_all(ex.what());
  }
  if (options.border > 0) {
    const BinaryMask interior = interior_mask(entry.intrinsics.size(), options.border);
    for (std::size_t i = 0; i < region.data.size(); ++i) region.data[i] &= interior.data[i];
  }
  std::optional<BinaryMask> band;
  if (entry.ridge) {
    band = ridge_band(entry.ridge->axis, entry.ridge->split, entry.intrinsics.size(), entry.ridge->half_width);
  }

  for (auto& row : rows) {
    try {
      const EstimatorConfig cfg = options.estimator_config(row.estimator);
      NormalMap estimate;
      std::vector<double> ms;
      for (int rep = 0; rep < std::max(1, options.repetitions); ++rep) {
        const auto start = Clock::now();
        NormalMap n = std::visit([&](const auto& img) { return estimate_normals(img, entry.intrinsics, cfg); }, *depth);
        ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
        if (rep == 0) estimate = std::move(n);
      }
      std::nth_element(ms.begin(), ms.begin() + static_cast<std::ptrdiff_t>(ms.size() / 2), ms.end());
      row.ms_per_image = ms[ms.size() / 2];

      const AngularErrorMap errors = restrict_to(angular_error_map(estimate, gt), region.data);
      row.errors = summarize(errors);
      if (band) {
        std::vector<std::uint8_t> off(band->data.size());
        for (std::size_t i = 0; i < off.size(); ++i) off[i] = band->data[i] ? 0 : 1;
        if (errors.valid_count() > 0) {
          try {
            row.band_mean = summarize(errors, band->data).mean;
          } catch (const DegenerateInput&) {
          }
          try {
            row.off_band_mean = summarize(errors, off).mean;
          } catch (const DegenerateInput&) {
          }
        }
      }
      if (options.error_map_dir) {
        write_error_map_png(errors, *options.error_map_dir / (file_stem_for(entry.id, row.estimator) + ".png"));
      }
    } catch (const std::exception& ex) {
      row.failure = ex.what();
    }
  }
  return rows;
}

std::string format_optional(const std::optional<double>& x) { return x ? fmt::format("{:.6f}", *x) : ""; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void SynthConfig::validate() const {
  if (planes < 0 || spheres < 0 || dihedrals < 0) throw InvalidInput("scene counts must be non-negative");
  if (planes + spheres + dihedrals == 0) throw InvalidInput("no scenes requested");
  if (width < 3 || height < 3) throw InvalidInput("image must be at least 3x3");
  if (!(focal > 0.0)) throw InvalidInput("focal length must be positive");
  if (!(max_inclination_deg >= 0.0 && max_inclination_deg < 90.0)) {
    throw InvalidInput("max inclination must lie in [0, 90) degrees");
  }
  if (!(noise_fraction >= 0.0)) throw InvalidInput("noise fraction must be >= 0");
  if (normal_extension != ".png" && normal_extension != ".pfm") {
    throw InvalidInput("normal extension must be .png or .pfm");
  }
}

CameraIntrinsics SynthConfig::intrinsics() const {
  return {focal, focal, (width - 1) / 2.0, (height - 1) / 2.0, width, height};
}

fs::path synthesize_suite(const SynthConfig& config, const fs::path& out_dir) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

  const CameraIntrinsics k = config.intrinsics();
  std::mt19937_64 rng(config.seed);
  const double max_incl = config.max_inclination_deg * std::numbers::pi / 180.0;

  struct Planned {
    std::string id;
    SceneSpec scene;
  };
  std::vector<Planned> planned;
  for (int i = 0; i < config.planes; ++i) planned.push_back({fmt::format("plane_{:04d}", i), sample_plane(rng, max_incl)});
  for (int i = 0; i < config.spheres; ++i) planned.push_back({fmt::format("sphere_{:04d}", i), sample_sphere(rng)});
  for (int i = 0; i < config.dihedrals; ++i) {
    planned.push_back({fmt::format("dihedral_{:04d}", i), sample_dihedral(rng, k)});
  }

  DatasetManifest manifest;
  for (std::size_t index = 0; index < planned.size(); ++index) {
    const auto& [id, scene] = planned[index];
    DepthImage depth = render_depth(scene, k);
    if (config.noise_fraction > 0.0) {
      depth = add_noise(depth, {NoiseUnit::FractionOfDepth, config.noise_fraction, config.seed ^ index});
    }
    ManifestEntry entry;
    entry.id = id;
    entry.intrinsics = k;
    entry.depth_format = config.depth_format;
    entry.scene = scene;
    switch (config.depth_format) {
      case DepthFormat::PfmMeters:
        entry.depth_path = out_dir / (id + "_depth.pfm");
        write_depth_pfm(depth, entry.depth_path);
        break;
      case DepthFormat::Png16Millimeters:
        entry.depth_path = out_dir / (id + "_depth.png");
        write_depth_png16(depth, entry.depth_path);
        break;
      case DepthFormat::PfmDisparity: {
        // Unit focal-length-times-baseline: disparity = 1 / z.
        DisparityImage disparity(depth.width(), depth.height());
        for (std::size_t i = 0; i < depth.size().pixels(); ++i) {
          if (depth.valid(i)) disparity.set(i, 1.0 / depth.value(i));
        }
        entry.depth_path = out_dir / (id + "_disparity.pfm");
        write_disparity_pfm(disparity, entry.depth_path);
        break;
      }
    }
    entry.gt_normal_path = out_dir / (id + "_normals" + config.normal_extension);
    write_normal_map(ground_truth_normals(scene, k), *entry.gt_normal_path);
    if (const auto* d = std::get_if<DihedralScene>(&scene)) {
      entry.ridge = RidgeBand{d->axis, d->split, config.ridge_half_width};
    }
    manifest.entries.push_back(std::move(entry));
  }
  const fs::path manifest_path = out_dir / "manifest.json";
  save_manifest(manifest, manifest_path);
  return manifest_path;
}

EstimatorConfig BenchOptions::estimator_config(Estimator e) const {
  EstimatorConfig cfg;
  cfg.estimator = e;
  cfg.kernel = kernel;
  cfg.neighborhood = Neighborhood::square(neighborhood_radius);
  cfg.pca_window = pca_window;
  return cfg;
}

std::size_t BenchmarkReport::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); }));
}

BenchmarkReport run_benchmark(const DatasetManifest& manifest, const BenchOptions& options) {
  if (manifest.entries.empty()) throw InvalidInput("manifest has no entries");
  if (options.estimators.empty()) throw InvalidInput("no estimators selected");
  for (Estimator e : options.estimators) options.estimator_config(e).validate();
  if (options.error_map_dir) {
    std::error_code ec;
    fs::create_directories(*options.error_map_dir, ec);
    if (ec) throw IoError("cannot create error-map directory " + options.error_map_dir->string());
  }

  const int count = static_cast<int>(manifest.entries.size());
  std::vector<std::vector<BenchmarkRow>> per_entry(manifest.entries.size());
  detail::parallel_ranges(count, options.jobs, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) per_entry[i] = bench_entry(manifest.entries[i], options);
  });

  BenchmarkReport report;
  for (auto& rows : per_entry) {
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
    if (a.entry_id != b.entry_id) return a.entry_id < b.entry_id;
    return to_string(a.estimator) < to_string(b.estimator);
  });
  for (const auto& entry : manifest.entries) report.has_band = report.has_band || entry.ridge.has_value();

  for (Estimator e : options.estimators) {
    EstimatorAggregate agg;
    agg.estimator = e;
    double ea = 0.0;
    double band = 0.0;
    double off = 0.0;
    double ms = 0.0;
    std::size_t n_band = 0;
    std::size_t n_off = 0;
    for (const auto& r : report.rows) {
      if (r.estimator != e) continue;
      if (!r.ok()) {
        ++agg.failures;
        continue;
      }
      ++agg.entries;
      ea += r.errors.mean;
      ms += r.ms_per_image;
      if (r.band_mean) {
        band += *r.band_mean;
        ++n_band;
      }
      if (r.off_band_mean) {
        off += *r.off_band_mean;
        ++n_off;
      }
    }
    if (agg.entries > 0) {
      agg.mean_ea = ea / static_cast<double>(agg.entries);
      agg.mean_ms = ms / static_cast<double>(agg.entries);
    }
    if (n_band > 0) agg.mean_band_ea = band / static_cast<double>(n_band);
    if (n_off > 0) agg.mean_off_band_ea = off / static_cast<double>(n_off);
    report.aggregates.push_back(agg);
  }
  std::sort(report.aggregates.begin(), report.aggregates.end(),
            [](const auto& a, const auto& b) { return to_string(a.estimator) < to_string(b.estimator); });
  return report;
}

void write_csv(const BenchmarkReport& report, std::ostream& out) {
  out << "entry_id,estimator,ea_mean_deg,ea_median_deg,ea_max_deg,valid_px,ms_per_image";
  if (report.has_band) out << ",ea_band_deg,ea_off_band_deg";
  out << ",status\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.entry_id) << ',' << to_string(r.estimator) << ',';
    if (r.ok()) {
      out << fmt::format("{:.6f},{:.6f},{:.6f},{},{:.3f}", r.errors.mean, r.errors.median, r.errors.max,
                         r.errors.count, r.ms_per_image);
    } else {
      out << ",,,,";
    }
    if (report.has_band) out << ',' << format_optional(r.band_mean) << ',' << format_optional(r.off_band_mean);
    out << ',' << (r.ok() ? std::string("ok") : csv_field("failed: " + r.failure)) << '\n';
  }
}

std::string report_json(const BenchmarkReport& report) {
  using nlohmann::json;
  auto rounded = [](double x) { return std::round(x * 1e6) / 1e6; };
  json rows = json::array();
  for (const auto& r : report.rows) {
    json j{{"entry_id", r.entry_id}, {"estimator", to_string(r.estimator)}, {"status", r.ok() ? "ok" : "failed"}};
    if (r.ok()) {
      j["ea_mean_deg"] = rounded(r.errors.mean);
      j["ea_median_deg"] = rounded(r.errors.median);
      j["ea_max_deg"] = rounded(r.errors.max);
      j["valid_px"] = r.errors.count;
      j["ms_per_image"] = std::round(r.ms_per_image * 1e3) / 1e3;
      if (r.band_mean) j["ea_band_deg"] = rounded(*r.band_mean);
      if (r.off_band_mean) j["ea_off_band_deg"] = rounded(*r.off_band_mean);
    } else {
      j["reason"] = r.failure;
    }
    rows.push_back(std::move(j));
  }
  json aggregates = json::array();
  for (const auto& a : report.aggregates) {
    json j{{"estimator", to_string(a.estimator)},
           {"entries", a.entries},
           {"failures", a.failures},
           {"ea_mean_deg", rounded(a.mean_ea)},
           {"ms_per_image", std::round(a.mean_ms * 1e3) / 1e3}};
    if (a.mean_band_ea) j["ea_band_deg"] = rounded(*a.mean_band_ea);
    if (a.mean_off_band_ea) j["ea_off_band_deg"] = rounded(*a.mean_off_band_ea);
    aggregates.push_back(std::move(j));
  }
  return json{{"rows", std::move(rows)}, {"aggregates", std::move(aggregates)}}.dump(2);
}

std::vector<AxialCandidate> random_candidate_set(std::mt19937_64& rng, int min_k, int max_k) {
  std::uniform_int_distribution<int> count(min_k, max_k);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<AxialCandidate> out(static_cast<std::size_t>(count(rng)));
  for (auto& c : out) {
    const double t = angle(rng);
    c = {std::sin(t), std::cos(t)};
  }
  return out;
}

OracleCheckResult run_oracle_check(std::size_t trials, std::uint64_t seed, double grid_step) {
  if (trials == 0) throw InvalidInput("oracle check needs at least one trial");
  if (!(grid_step > 0.0 && grid_step <= 0.01)) throw InvalidInput("grid step must lie in (0, 0.01]");
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  OracleCheckResult result;
  result.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto candidates = random_candidate_set(rng);
    const InclinationSolution closed = axial_optimal_inclination(candidates);
    const double grid_theta = grid_search_inclination(candidates, grid_step);
    const double shortfall = inclination_objective(candidates, grid_theta) - closed.objective;
    double deviation = std::fmod(std::abs(closed.theta - grid_theta), std::numbers::pi);
    deviation = std::min(deviation, std::numbers::pi - deviation);
    result.max_theta_deviation = std::max(result.max_theta_deviation, deviation);
    result.max_objective_shortfall = std::max(result.max_objective_shortfall, shortfall);
    if (shortfall > 1e-9 || deviation > grid_step) ++result.violations;
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace normalis
