#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "normalis/candidates.hpp"

namespace normalis {

enum class Estimator { SnePlus, Sne, ThreeF2NMean, ThreeF2NMedian, PlanePca };

std::string_view to_string(Estimator estimator);
/// Accepts "sne+", "sne", "3f2n-mean", "3f2n-median", "plane-pca".
Estimator parse_estimator(std::string_view name);
/// Every estimator in report order.
std::span<const Estimator> all_estimators();

struct EstimatorConfig {
  Estimator estimator = Estimator::SnePlus;
  GradientKernel kernel = GradientKernel::CentralDifference;
  Neighborhood neighborhood = Neighborhood::square(1);
  int pca_window = 5;  ///< odd, >= 3; PlanePCA only
  CandidateThresholds thresholds;

  void validate() const;
};

struct ExecutionOptions {
  int threads = 1;
};

/// Maximizer of the axial objective sum_i (A_i sin t + n_i cos t)^2.
struct InclinationSolution {
  double theta = 0.0;  ///< radians in [0, pi)
  int branch = 0;      ///< l in theta = atan(.)/2 + l pi/2
  double objective = 0.0;
};

double inclination_objective(std::span<const AxialCandidate> candidates, double theta);

/// Closed form theta = atan2(2 sum A n, sum (n^2 - A^2)) / 2 lifted to
/// [0, pi). A flat objective (both sums zero) yields theta = 0.
/// Throws DegenerateInput for an empty set.
InclinationSolution axial_optimal_inclination(std::span<const AxialCandidate> candidates);

/// Same maximizer built as atan(ratio)/2 + l pi/2, with l picked by
/// evaluating the objective at both critical points (ties keep l = 0).
InclinationSolution axial_optimal_inclination_two_branch(std::span<const AxialCandidate> candidates);

/// Brute-force argmax of the objective over {0, step, 2 step, ...} <= pi.
/// Values within 1e-12 (relative) of the running best count as ties and
/// keep the smaller theta. Requires 0 < step <= 0.01.
double grid_search_inclination(std::span<const AxialCandidate> candidates, double step);

/// Unit normal (sin t cos phi, sin t sin phi, cos t) for the closed-form
/// inclination, before camera orientation.
Vec3 sne_plus_axis(std::span<const AxialCandidate> candidates, double azimuth);

/// 3F2N assembly: normalize(f_x g_u, f_y g_v, Phi), Phi the mean or median
/// (even count: mean of the middle two) of the division-form n_z values.
/// `nz` may be reordered. Throws DegenerateInput if empty or not finite.
Vec3 three_f2n_normal(double fgu, double fgv, std::span<double> nz, Estimator variant);

/// Smallest-eigenvalue eigenvector of the centered covariance of `points`,
/// oriented to face the camera along the view ray to `viewpoint` (a point in
/// camera coordinates, default the centroid). Throws DegenerateInput for
/// < 3 points or rank < 2.
Vec3 plane_pca_normal(std::span<const Vec3> points, std::optional<Vec3> viewpoint = std::nullopt);

/// Dense normal map. Frontoparallel pixels get (0, 0, -1); pixels where the
/// estimator cannot produce a normal are invalid. Output does not depend on
/// `exec.threads`.
NormalMap estimate_normals(const DepthImage& depth, const CameraIntrinsics& k, const EstimatorConfig& cfg,
                           const ExecutionOptions& exec = {});
/// Inverse depth (or disparity) input; points are back-projected from the
/// reciprocal, so any positive scale of the input cancels.
NormalMap estimate_normals(const InverseDepthImage& inverse_depth, const CameraIntrinsics& k,
                           const EstimatorConfig& cfg, const ExecutionOptions& exec = {});

}  // namespace normalis
