#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "normalis/estimators.hpp"
#include "normalis/io.hpp"

namespace normalis {

// ---------------------------------------------------------------------------
// Synthetic suite generation
// ---------------------------------------------------------------------------

struct SynthConfig {
  int planes = 100;
  int spheres = 0;
  int dihedrals = 0;
  int width = 160;
  int height = 120;
  double focal = 100.0;
  double max_inclination_deg = 75.0;
  /// Gaussian depth noise, sigma as a fraction of depth (0 = noiseless).
  double noise_fraction = 0.0;
  double ridge_half_width = 2.0;
  std::uint64_t seed = 1;
  DepthFormat depth_format = DepthFormat::PfmMeters;
  /// ".png" (16-bit encoded) or ".pfm" (lossless float).
  std::string normal_extension = ".pfm";

  void validate() const;
  CameraIntrinsics intrinsics() const;
};

/// Renders the configured scenes into `out_dir` (created if needed) and
/// writes `out_dir/manifest.json`, whose path is returned. Entry i uses noise
/// seed `seed ^ i`. Throws InvalidInput when no scenes are requested.
fs::path synthesize_suite(const SynthConfig& config, const fs::path& out_dir);

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

struct BenchOptions {
  std::vector<Estimator> estimators;
  GradientKernel kernel = GradientKernel::CentralDifference;
  int neighborhood_radius = 1;
  int pca_window = 5;
  /// Pixels this close to the image edge are not scored.
  int border = 0;
  /// Timed runs per (entry, estimator); the median is reported.
  int repetitions = 5;
  int jobs = 1;
  std::optional<fs::path> error_map_dir;

  EstimatorConfig estimator_config(Estimator e) const;
};

struct BenchmarkRow {
  std::string entry_id;
  Estimator estimator = Estimator::SnePlus;
  /// Empty when the run succeeded.
  std::string failure;
  ErrorSummary errors;
  std::optional<double> band_mean;
  std::optional<double> off_band_mean;
  double ms_per_image = 0.0;

  bool ok() const { return failure.empty(); }
};

struct EstimatorAggregate {
  Estimator estimator = Estimator::SnePlus;
  std::size_t entries = 0;
  std::size_t failures = 0;
  double mean_ea = 0.0;  ///< mean of per-entry e_A
  std::optional<double> mean_band_ea;
  std::optional<double> mean_off_band_ea;
  double mean_ms = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;  ///< sorted by (entry id, estimator name)
  std::vector<EstimatorAggregate> aggregates;
  bool has_band = false;

  std::size_t failures() const;
};

/// Estimates and scores every (entry, estimator) pair. Per-pair failures
/// are recorded in the row; an empty manifest or estimator list throws.
BenchmarkReport run_benchmark(const DatasetManifest& manifest, const BenchOptions& options);

/// CSV: entry_id, estimator, ea_mean_deg, ea_median_deg, ea_max_deg,
/// valid_px, ms_per_image, [ea_band_deg, ea_off_band_deg,] status.
void write_csv(const BenchmarkReport& report, std::ostream& out);
std::string report_json(const BenchmarkReport& report);

// ---------------------------------------------------------------------------
// Closed-form inclination vs. grid search
// ---------------------------------------------------------------------------

/// k uniform in [1, 8]; each candidate (sin t, cos t) with t uniform in
/// [0, 2 pi).
std::vector<AxialCandidate> random_candidate_set(std::mt19937_64& rng, int min_k = 1, int max_k = 8);

struct OracleCheckResult {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_theta_deviation = 0.0;     ///< radians, modulo pi
  double max_objective_shortfall = 0.0; ///< grid max minus closed-form objective
  double seconds = 0.0;

  bool passed() const { return violations == 0; }
};

/// A trial violates when the closed form's objective falls more than 1e-9
/// below the grid maximum, or its angle is more than `grid_step` (mod pi)
/// from the grid argmax.
OracleCheckResult run_oracle_check(std::size_t trials, std::uint64_t seed, double grid_step);

}  // namespace normalis
