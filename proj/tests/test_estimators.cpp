#include <gtest/gtest.h>

#include <array>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "normalis/bench.hpp"
#include "normalis/error.hpp"
#include "normalis/estimators.hpp"
#include "normalis/metrics.hpp"
#include "normalis/synthetic.hpp"
#include "support.hpp"

using namespace normalis;
using std::numbers::pi;

namespace {

AxialCandidate at(double theta) { return {std::sin(theta), std::cos(theta)}; }

double mod_pi_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), pi);
  return std::min(d, pi - d);
}

EstimatorConfig config(Estimator e) {
  EstimatorConfig cfg;
  cfg.estimator = e;
  return cfg;
}

// Mean and max angle to ground truth over pixels at least `border` px from
// the edge, in degrees.
std::pair<double, double> score(const NormalMap& est, const NormalMap& gt, int border) {
  double sum = 0.0, worst = 0.0;
  std::size_t n = 0;
  for (int v = border; v < est.height() - border; ++v) {
    for (int u = border; u < est.width() - border; ++u) {
      if (!est.valid(u, v) || !gt.valid(u, v)) continue;
      const double e = test::deg(test::angle_between(est(u, v), gt(u, v)));
      sum += e;
      worst = std::max(worst, e);
      ++n;
    }
  }
  return {n ? sum / n : INFINITY, worst};
}

double max_axis_gap(const NormalMap& a, const NormalMap& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size().pixels(); ++i) {
    EXPECT_EQ(a.valid(i), b.valid(i));
    if (a.valid(i) && b.valid(i)) worst = std::max(worst, test::angle_between(a.normal(i), b.normal(i)));
  }
  return worst;
}

}  // namespace

TEST(Inclination, Unanimous) {
  const std::vector<AxialCandidate> c(4, at(0.3));
  EXPECT_NEAR(axial_optimal_inclination(c).theta, 0.3, 1e-12);
  EXPECT_NEAR(axial_optimal_inclination_two_branch(c).theta, 0.3, 1e-12);
  EXPECT_NEAR(grid_search_inclination(c, 1e-3), 0.3, 1e-3);
}

TEST(Inclination, AntipodalPair) {
  const std::vector<AxialCandidate> c{at(0.3), {-std::sin(0.3), -std::cos(0.3)}};
  EXPECT_NEAR(axial_optimal_inclination(c).theta, 0.3, 1e-12);
}

TEST(Inclination, ThreeCandidateExample) {
  const std::vector<AxialCandidate> c{at(0.1), at(0.1), at(1.6)};
  const double grid = grid_search_inclination(c, 1e-5);
  const auto sol = axial_optimal_inclination(c);
  EXPECT_LE(mod_pi_distance(sol.theta, grid), 1e-5);
  EXPECT_NEAR(sol.theta, 0.1695, 5e-4);
  // Stationary point: derivative of the objective vanishes.
  const double h = 1e-6;
  const double slope = (inclination_objective(c, sol.theta + h) - inclination_objective(c, sol.theta - h)) / (2 * h);
  EXPECT_NEAR(slope, 0.0, 1e-8);
}

TEST(Inclination, FlatObjectiveTieBreak) {
  const double s = std::sqrt(0.5);
  const std::vector<AxialCandidate> c{{s, s}, {-s, s}};
  for (double t : {0.0, 0.4, 1.2, 2.9}) EXPECT_NEAR(inclination_objective(c, t), 1.0, 1e-15);
  EXPECT_EQ(grid_search_inclination(c, 1e-3), 0.0);
  EXPECT_EQ(axial_optimal_inclination(c).theta, 0.0);
}

TEST(Inclination, EmptyAndBadStep) {
  const std::vector<AxialCandidate> none;
  EXPECT_THROW(axial_optimal_inclination(none), DegenerateInput);
  EXPECT_THROW(axial_optimal_inclination_two_branch(none), DegenerateInput);
  EXPECT_THROW(grid_search_inclination(none, 1e-3), DegenerateInput);
  const std::vector<AxialCandidate> one{at(0.2)};
  EXPECT_THROW(grid_search_inclination(one, 0.0), InvalidInput);
  EXPECT_THROW(grid_search_inclination(one, 0.5), InvalidInput);
}

TEST(Inclination, RandomSetsMatchGrid) {
  std::mt19937_64 rng(1234);
  const double step = 1e-3;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = random_candidate_set(rng, 1, 8);
    const auto sol = axial_optimal_inclination(c);
    const double grid = grid_search_inclination(c, step);
    ASSERT_GE(sol.theta, 0.0);
    ASSERT_LT(sol.theta, pi);
    EXPECT_GE(sol.objective, inclination_objective(c, grid) - 1e-9);
    // Nearly flat objectives have no well-defined argmax.
    const double spread = sol.objective - inclination_objective(c, sol.theta + pi / 2);
    if (spread > 1e-6) EXPECT_LE(mod_pi_distance(sol.theta, grid), step) << "trial " << trial;
  }
}

TEST(Inclination, BranchesAgree) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto c = random_candidate_set(rng, 1, 8);
    const auto a = axial_optimal_inclination(c);
    const auto b = axial_optimal_inclination_two_branch(c);
    ASSERT_TRUE(b.branch == 0 || b.branch == 1);
    EXPECT_NEAR(a.objective, b.objective, 1e-12 * std::max(1.0, a.objective));
    EXPECT_NEAR(a.objective, inclination_objective(c, a.theta), 1e-12 * std::max(1.0, a.objective));
    // Global optimality: no probe angle does better.
    for (int j = 0; j < 8; ++j) {
      EXPECT_LE(inclination_objective(c, j * pi / 8 + 0.01), a.objective + 1e-12);
    }
  }
}

TEST(Inclination, AxisIgnoresCandidateSigns) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> phi(0, 2 * pi);
  std::bernoulli_distribution flip(0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    auto c = random_candidate_set(rng, 1, 8);
    const double az = phi(rng);
    const Vec3 ref = sne_plus_axis(c, az);
    for (auto& x : c) {
      if (flip(rng)) x = {-x.along, -x.nz};
    }
    EXPECT_LT(test::angle_between(sne_plus_axis(c, az), ref), 1e-9);
  }
}

TEST(Estimate, FrontoparallelPlane) {
  const auto k = test::small_camera(32, 24, 40);
  const auto depth = render_depth(PlaneScene{{0, 0, -1}, 5.0}, k);
  for (Estimator e : all_estimators()) {
    const auto n = estimate_normals(depth, k, config(e));
    for (int v = 2; v < 22; ++v) {
      for (int u = 2; u < 30; ++u) {
        ASSERT_TRUE(n.valid(u, v)) << to_string(e);
        EXPECT_LT(test::angle_between(n(u, v), {0, 0, -1}), 1e-9) << to_string(e);
      }
    }
  }
}

TEST(Estimate, InclinedPlaneAllEstimators) {
  const auto k = test::small_camera();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const SceneSpec scene = sample_plane(rng, 75.0 * pi / 180.0);
    const auto depth = render_depth(scene, k);
    const auto gt = ground_truth_normals(scene, k);
    for (Estimator e : all_estimators()) {
      const auto [mean, worst] = score(estimate_normals(depth, k, config(e)), gt, 2);
      EXPECT_LT(mean, 0.2) << to_string(e);
      EXPECT_LT(worst, 1.0) << to_string(e);
    }
  }
}

TEST(Estimate, FastPathMatchesCandidatePath) {
  const auto k = test::small_camera(48, 36, 60);
  const auto depth = add_noise(render_depth(SphereScene{{0.2, -0.1, 4}, 1.6}, k), {NoiseUnit::FractionOfDepth, 0.003, 17});
  const auto est = estimate_normals(depth, k, config(Estimator::SnePlus));
  const auto grads = compute_gradients(to_inverse_depth(depth));
  const auto nb = Neighborhood::square(1);
  std::size_t checked = 0;
  for (int v = 0; v < 36; ++v) {
    for (int u = 0; u < 48; ++u) {
      const auto c = candidates_at(u, v, depth, grads, k, nb);
      if (c.status == CandidateStatus::Invalid) {
        EXPECT_FALSE(est.valid(u, v));
        continue;
      }
      ASSERT_TRUE(est.valid(u, v));
      const Vec3 q = back_project(u, v, depth(u, v), k);
      const Vec3 ref = c.status == CandidateStatus::Frontoparallel
                           ? Vec3(0, 0, -1)
                           : orient_toward_camera(sne_plus_axis(c.candidates, c.azimuth), q);
      EXPECT_LT(test::angle_between(est(u, v), ref), 1e-9) << u << "," << v;
      ++checked;
    }
  }
  EXPECT_GT(checked, 500u);
}

TEST(Estimate, OutputFacesCamera) {
  const auto k = test::small_camera(40, 30, 50);
  const auto depth = add_noise(render_depth(SphereScene{{0, 0, 3}, 1.2}, k), {NoiseUnit::FractionOfDepth, 0.01, 2});
  for (Estimator e : all_estimators()) {
    const auto n = estimate_normals(depth, k, config(e));
    for (int v = 0; v < 30; ++v) {
      for (int u = 0; u < 40; ++u) {
        if (!n.valid(u, v)) continue;
        EXPECT_NEAR(n(u, v).norm(), 1.0, 1e-12);
        EXPECT_LE(n(u, v).dot(back_project(u, v, depth(u, v), k)), 0.0);
      }
    }
  }
}

TEST(Estimate, ScaleInvariance) {
  const auto k = test::small_camera(64, 48, 60);
  std::mt19937_64 rng(42);
  const SceneSpec scene = sample_plane(rng, 60.0 * pi / 180.0);
  const auto depth = render_depth(scene, k);
  for (Estimator e : all_estimators()) {
    const auto ref = estimate_normals(depth, k, config(e));
    for (double s : {0.5, 2.0, 10.0}) {
      DepthImage scaled(depth.width(), depth.height());
      for (std::size_t i = 0; i < depth.size().pixels(); ++i) {
        if (depth.valid(i)) scaled.set(i, s * depth.value(i));
      }
      EXPECT_LT(max_axis_gap(estimate_normals(scaled, k, config(e)), ref), 1e-6) << to_string(e) << " s=" << s;
    }
  }
}

TEST(Estimate, DisparityMatchesDepth) {
  const auto k = test::small_camera(64, 48, 60);
  const SceneSpec scene = PlaneScene::through(Vec3(0.3, 0.6, -1).normalized(), {0, 0, 6});
  const auto depth = render_depth(scene, k);
  const double fb = k.fx * 0.54;  // stereo baseline in meters
  DisparityImage disp(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size().pixels(); ++i) disp.set(i, fb / depth.value(i));
  for (Estimator e : all_estimators()) {
    const auto a = estimate_normals(depth, k, config(e));
    const auto b = estimate_normals(disparity_as_inverse_depth(disp), k, config(e));
    EXPECT_LT(max_axis_gap(a, b), 1e-6) << to_string(e);
  }
}

TEST(Estimate, ThreadCountDoesNotMatter) {
  const auto k = test::small_camera(50, 37, 45);
  const auto depth = add_noise(render_depth(SphereScene{{0, 0, 3}, 1.5}, k), {NoiseUnit::FractionOfDepth, 0.01, 8});
  for (Estimator e : all_estimators()) {
    const auto one = estimate_normals(depth, k, config(e), {1});
    const auto many = estimate_normals(depth, k, config(e), {4});
    ASSERT_EQ(one.valid_count(), many.valid_count());
    for (std::size_t i = 0; i < one.size().pixels(); ++i) {
      ASSERT_EQ(one.valid(i), many.valid(i));
      EXPECT_EQ(one.normal(i), many.normal(i));
    }
  }
}

TEST(Estimate, LargerNeighborhoodAndKernelsOnPlane) {
  const auto k = test::small_camera(60, 45, 55);
  const SceneSpec scene = PlaneScene::through(Vec3(-0.5, 0.2, -1).normalized(), {0, 0, 5});
  const auto depth = render_depth(scene, k);
  const auto gt = ground_truth_normals(scene, k);
  for (auto kernel : {GradientKernel::CentralDifference, GradientKernel::Sobel, GradientKernel::Prewitt}) {
    for (int radius : {1, 2, 3}) {
      EstimatorConfig cfg;
      cfg.kernel = kernel;
      cfg.neighborhood = Neighborhood::square(radius);
      EXPECT_LT(score(estimate_normals(depth, k, cfg), gt, radius + 1).second, 1e-4);
    }
  }
}

TEST(Estimate, ConfigValidation) {
  EstimatorConfig cfg;
  cfg.estimator = Estimator::PlanePca;
  cfg.pca_window = 4;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg.pca_window = 1;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  const auto k = test::small_camera(10, 10, 10);
  DepthImage wrong(11, 10);
  EXPECT_THROW(estimate_normals(wrong, k, EstimatorConfig{}), InvalidInput);
}

TEST(Estimate, Names) {
  for (Estimator e : all_estimators()) EXPECT_EQ(parse_estimator(to_string(e)), e);
  EXPECT_EQ(parse_estimator("sne+"), Estimator::SnePlus);
  EXPECT_EQ(parse_estimator("3f2n-median"), Estimator::ThreeF2NMedian);
  EXPECT_THROW(parse_estimator("sne++"), InvalidInput);
  EXPECT_EQ(all_estimators().size(), 5u);
}

TEST(ThreeF2N, MedianAndMean) {
  std::array<double, 3> nz{100.0, 1.0, 2.0};
  const Vec3 med = three_f2n_normal(0.3, -0.4, nz, Estimator::ThreeF2NMedian);
  EXPECT_LT(test::angle_between(med, Vec3(0.3, -0.4, 2.0)), 1e-15);
  std::array<double, 3> again{1.0, 2.0, 100.0};
  const Vec3 mean = three_f2n_normal(0.3, -0.4, again, Estimator::ThreeF2NMean);
  EXPECT_LT(test::angle_between(mean, Vec3(0.3, -0.4, 103.0 / 3.0)), 1e-15);
  std::array<double, 4> even{4.0, 1.0, 3.0, 2.0};
  EXPECT_LT(test::angle_between(three_f2n_normal(1, 0, even, Estimator::ThreeF2NMedian), Vec3(1, 0, 2.5)), 1e-15);
  std::array<double, 0> none{};
  EXPECT_THROW(three_f2n_normal(1, 0, none, Estimator::ThreeF2NMean), DegenerateInput);
  EXPECT_THROW(three_f2n_normal(1, 0, even, Estimator::Sne), InvalidInput);
}

TEST(PlanePca, ExactPlanes) {
  std::vector<Vec3> pts;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) pts.emplace_back(0.1 * i, 0.1 * j, 5.0);
  EXPECT_LT(test::angle_between(plane_pca_normal(pts), {0, 0, -1}), 1e-12);

  const Vec3 n = Vec3(0, 1, -1).normalized();
  const Vec3 e1(1, 0, 0), e2 = Vec3(0, 1, 1).normalized();
  pts.clear();
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) pts.push_back(Vec3(0, 0, 5) + 0.1 * i * e1 + 0.07 * j * e2);
  EXPECT_LT(test::angle_between(plane_pca_normal(pts), n), 1e-9);
}

TEST(PlanePca, NoisyPlaneMatchesLeastSquares) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> xy(-0.2, 0.2);
  std::normal_distribution<double> noise(0.0, 1e-4);
  const double a = 0.3, b = -0.2, c = 4.0;
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) {
    const double x = xy(rng), y = xy(rng);
    pts.emplace_back(x, y, a * x + b * y + c + noise(rng));
  }
  // Normal equations for z = a x + b y + c.
  Eigen::MatrixXd A(pts.size(), 3);
  Eigen::VectorXd z(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) << pts[i].x(), pts[i].y(), 1.0;
    z(static_cast<Eigen::Index>(i)) = pts[i].z();
  }
  const Eigen::Vector3d coef = (A.transpose() * A).ldlt().solve(A.transpose() * z);
  const Vec3 oracle = Vec3(coef(0), coef(1), -1.0).normalized();
  EXPECT_LT(test::axial_angle(plane_pca_normal(pts), oracle), 1e-6);
}

TEST(PlanePca, Degenerate) {
  const std::vector<Vec3> two{{0, 0, 1}, {1, 0, 1}};
  EXPECT_THROW(plane_pca_normal(two), DegenerateInput);
  const std::vector<Vec3> line{{0, 0, 1}, {1, 0, 1}, {2, 0, 1}, {3, 0, 1}};
  EXPECT_THROW(plane_pca_normal(line), DegenerateInput);
}

TEST(PlanePca, ViewpointOrientation) {
  const std::vector<Vec3> pts{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  EXPECT_LT(test::angle_between(plane_pca_normal(pts), {0, 0, -1}), 1e-12);
  // Along a ray that reaches the plane from the other side the normal flips.
  EXPECT_LT(test::angle_between(plane_pca_normal(pts, Vec3(0.5, 0.5, -1.0)), {0, 0, 1}), 1e-12);
}

TEST(Sne, SignAlignmentOnDihedralHurtsRidge) {
  // Not a guarantee per pixel, only in aggregate over the ridge band.
  const auto k = test::small_camera();
  std::mt19937_64 rng(3);
  double sne_plus = 0.0, sne = 0.0;
  for (int s = 0; s < 6; ++s) {
    const auto scene = sample_dihedral(rng, k);
    const auto depth = add_noise(render_depth(scene, k), {NoiseUnit::FractionOfDepth, 0.005, static_cast<std::uint64_t>(s)});
    const auto gt = ground_truth_normals(scene, k);
    const auto band = ridge_band(scene, k.size(), 2.0);
    sne_plus += summarize(angular_error_map(estimate_normals(depth, k, config(Estimator::SnePlus)), gt), band.data).mean;
    sne += summarize(angular_error_map(estimate_normals(depth, k, config(Estimator::Sne)), gt), band.data).mean;
  }
  EXPECT_LE(sne_plus, sne);
}
