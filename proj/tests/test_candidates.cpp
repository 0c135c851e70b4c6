#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "normalis/candidates.hpp"
#include "normalis/error.hpp"
#include "normalis/gradient.hpp"
#include "normalis/synthetic.hpp"
#include "support.hpp"

using namespace normalis;

TEST(Azimuth, AxisAligned) {
  const CameraIntrinsics k{100, 100, 10, 10, 21, 21};
  const auto a = azimuth(0.01, 0.0, k);
  EXPECT_EQ(a.phi, 0.0);
  EXPECT_FALSE(a.frontoparallel);
  EXPECT_NEAR(azimuth(0.0, 0.01, k).phi, std::numbers::pi / 2, 1e-15);
}

TEST(Azimuth, MatchesNormalizedGradient) {
  const CameraIntrinsics k{200, 100, 10, 10, 21, 21};
  const double gu = -0.01, gv = -0.01;
  const auto a = azimuth(gu, gv, k);
  EXPECT_GE(a.phi, 0.0);
  EXPECT_LT(a.phi, 2 * std::numbers::pi);
  Eigen::Vector2d dir(k.fx * gu, k.fy * gv);
  dir.normalize();
  EXPECT_NEAR(std::cos(a.phi), dir.x(), 1e-15);
  EXPECT_NEAR(std::sin(a.phi), dir.y(), 1e-15);
}

TEST(Azimuth, WrapsIntoRange) {
  const CameraIntrinsics k{100, 100, 10, 10, 21, 21};
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const double gu = g(rng), gv = g(rng);
    const auto a = azimuth(gu, gv, k);
    ASSERT_GE(a.phi, 0.0);
    ASSERT_LT(a.phi, 2 * std::numbers::pi);
    EXPECT_NEAR(std::atan2(std::sin(a.phi), std::cos(a.phi)), std::atan2(gv, gu), 1e-12);
  }
}

TEST(Azimuth, Frontoparallel) {
  const CameraIntrinsics k{100, 100, 10, 10, 21, 21};
  const auto a = azimuth(0.0, 1e-18, k);
  EXPECT_TRUE(a.frontoparallel);
  EXPECT_EQ(a.phi, 0.0);
}

TEST(Neighborhood, Square) {
  EXPECT_EQ(Neighborhood::square(1).offsets.size(), 8u);
  EXPECT_EQ(Neighborhood::square(2).offsets.size(), 24u);
  EXPECT_EQ(Neighborhood::square(2).extent(), 2);
  for (const auto& o : Neighborhood::square(3).offsets) EXPECT_FALSE(o.du == 0 && o.dv == 0);
  EXPECT_THROW(Neighborhood::square(0), InvalidInput);
  EXPECT_THROW((Neighborhood{{{0, 0}, {1, 0}}}.validate()), InvalidInput);
  EXPECT_THROW(Neighborhood{}.validate(), InvalidInput);
}

TEST(Candidates, FrontoparallelPlane) {
  const auto k = test::small_camera(20, 16, 30);
  const auto depth = render_depth(PlaneScene{{0, 0, -1}, 4.0}, k);
  const auto grads = compute_gradients(to_inverse_depth(depth));
  const auto c = candidates_at(10, 8, depth, grads, k, Neighborhood::square(1));
  EXPECT_EQ(c.status, CandidateStatus::Frontoparallel);
  EXPECT_TRUE(c.candidates.empty());
}

TEST(Candidates, InclinedPlaneUnanimous) {
  const auto k = test::small_camera(40, 30, 50);
  const Vec3 n = Vec3(0.3, -0.5, -1.0).normalized();
  const PlaneScene plane = PlaneScene::through(n, {0, 0, 5});
  const auto depth = render_depth(plane, k);
  const auto grads = compute_gradients(to_inverse_depth(depth));
  for (int radius : {1, 2}) {
    const auto nb = Neighborhood::square(radius);
    for (int v = 5; v < 25; v += 3) {
      for (int u = 5; u < 35; u += 4) {
        const auto c = candidates_at(u, v, depth, grads, k, nb);
        ASSERT_EQ(c.status, CandidateStatus::Ok);
        ASSERT_EQ(c.candidates.size(), nb.offsets.size());
        for (const auto& cand : c.candidates) {
          EXPECT_NEAR(cand.along * cand.along + cand.nz * cand.nz, 1.0, 1e-12);
          const Vec3 axis(cand.along * std::cos(c.azimuth), cand.along * std::sin(c.azimuth), cand.nz);
          EXPECT_LT(test::axial_angle(axis, n), 1e-9);
        }
      }
    }
  }
}

TEST(Candidates, ZeroDepthStepGivesOpticalAxis) {
  const auto k = test::small_camera(5, 5, 10);
  DepthImage depth(5, 5);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 5; ++u) depth.set(u, v, 2.0 + 0.1 * u);
  // Diagonal neighbor is outside the central-difference footprint.
  depth.set(3, 3, depth(2, 2));
  const auto grads = compute_gradients(to_inverse_depth(depth));
  const auto c = candidates_at(2, 2, depth, grads, k, Neighborhood::square(1));
  ASSERT_EQ(c.status, CandidateStatus::Ok);
  int axial = 0;
  for (const auto& cand : c.candidates) {
    if (std::abs(cand.along) < 1e-15) {
      ++axial;
      EXPECT_EQ(std::abs(cand.nz), 1.0);
    }
  }
  EXPECT_EQ(axial, 1);
}

TEST(Candidates, HomogeneousParallelToDivisionForm) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const double fgu = g(rng), fgv = g(rng);
    const Vec3 r(g(rng), g(rng), g(rng));
    if (std::abs(r.z()) < 1e-3) continue;
    const Vec3 h = homogeneous_candidate(fgu, fgv, r);
    const Vec3 div(fgu, fgv, -(fgu * r.x() + fgv * r.y()) / r.z());
    EXPECT_LT(h.cross(div).norm(), 1e-12 * h.norm() * div.norm());
    // Flipping the neighbor offset flips the candidate: same axis.
    EXPECT_EQ(homogeneous_candidate(fgu, fgv, -r), -h);
  }
}

TEST(Candidates, HolesReduceCount) {
  const auto k = test::small_camera(12, 12, 20);
  const auto depth0 = render_depth(PlaneScene::through(Vec3(0.2, 0.1, -1).normalized(), {0, 0, 3}), k);
  DepthImage depth = depth0;
  depth.invalidate(depth.size().index(7, 7));
  depth.invalidate(depth.size().index(5, 7));
  const auto grads = compute_gradients(to_inverse_depth(depth));
  const auto nb = Neighborhood::square(1);
  const auto c = candidates_at(6, 6, depth, grads, k, nb);
  ASSERT_EQ(c.status, CandidateStatus::Ok);
  EXPECT_EQ(c.candidates.size(), nb.offsets.size() - 2);
  // Pixel on the image edge has no gradient.
  EXPECT_EQ(candidates_at(0, 6, depth, grads, k, nb).status, CandidateStatus::Invalid);
  // A hole itself is invalid.
  EXPECT_EQ(candidates_at(7, 7, depth, grads, k, nb).status, CandidateStatus::Invalid);
}

TEST(Candidates, PointAndDepthOverloadsAgree) {
  const auto k = test::small_camera(16, 12, 20);
  const auto depth = add_noise(render_depth(SphereScene{{0.1, 0, 3}, 1.5}, k), {NoiseUnit::FractionOfDepth, 0.01, 3});
  const auto grads = compute_gradients(to_inverse_depth(depth));
  const auto pts = back_project_image(depth, k);
  const auto nb = Neighborhood::square(1);
  for (int v = 1; v < 11; ++v) {
    for (int u = 1; u < 15; ++u) {
      const auto a = candidates_at(u, v, depth, grads, k, nb);
      const auto b = candidates_at(u, v, pts, grads, k, nb);
      ASSERT_EQ(a.status, b.status);
      ASSERT_EQ(a.candidates.size(), b.candidates.size());
      for (std::size_t j = 0; j < a.candidates.size(); ++j) {
        EXPECT_NEAR(a.candidates[j].along, b.candidates[j].along, 1e-12);
        EXPECT_NEAR(a.candidates[j].nz, b.candidates[j].nz, 1e-12);
      }
    }
  }
}

TEST(Candidates, DivisionFormOnPlane) {
  const auto k = test::small_camera(20, 20, 40);
  const Vec3 n = Vec3(-0.4, 0.2, -1).normalized();
  const auto depth = render_depth(PlaneScene::through(n, {0, 0, 4}), k);
  const auto grads = compute_gradients(to_inverse_depth(depth));
  const auto dc = division_candidates_at(10, 10, back_project_image(depth, k), grads, k, Neighborhood::square(1));
  ASSERT_EQ(dc.status, CandidateStatus::Ok);
  ASSERT_EQ(dc.nz.size(), 8u);
  for (double nz : dc.nz) {
    EXPECT_LT(test::axial_angle(Vec3(dc.fgu, dc.fgv, nz), n), 1e-9);
  }
}
