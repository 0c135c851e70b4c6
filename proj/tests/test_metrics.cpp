#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "normalis/error.hpp"
#include "normalis/metrics.hpp"

using namespace normalis;

namespace {

NormalMap uniform(int w, int h, const Vec3& n) {
  NormalMap m(w, h);
  for (std::size_t i = 0; i < m.size().pixels(); ++i) m.set(i, n);
  return m;
}

}  // namespace

TEST(AngularError, Identical) {
  const auto a = uniform(5, 4, Vec3(0.3, -0.2, -0.9).normalized());
  const auto e = angular_error_map(a, a);
  EXPECT_EQ(e.valid_count(), 20u);
  for (double d : e.degrees) EXPECT_EQ(d, 0.0);
}

TEST(AngularError, Orthogonal) {
  const auto e = angular_error_map(uniform(3, 3, {1, 0, 0}), uniform(3, 3, {0, 0, -1}));
  for (double d : e.degrees) EXPECT_NEAR(d, 90.0, 1e-12);
}

TEST(AngularError, TenDegreeRotation) {
  const double t = 10.0 * std::numbers::pi / 180.0;
  const Vec3 rotated = Eigen::AngleAxisd(t, Vec3::UnitX()) * Vec3(0, 0, -1);
  const auto e = angular_error_map(uniform(2, 2, rotated), uniform(2, 2, {0, 0, -1}));
  for (double d : e.degrees) EXPECT_NEAR(d, 10.0, 1e-9);
}

TEST(AngularError, AxialMode) {
  const auto e = angular_error_map(uniform(2, 1, {0, 0, 1}), uniform(2, 1, {0, 0, -1}), AngleMode::Axial);
  for (double d : e.degrees) EXPECT_EQ(d, 0.0);
  const auto f = angular_error_map(uniform(2, 1, {0, 0, 1}), uniform(2, 1, {0, 0, -1}));
  for (double d : f.degrees) EXPECT_EQ(d, 180.0);
}

TEST(AngularError, InvalidPixelsSkippedAndSymmetric) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  NormalMap a(10, 10), b(10, 10);
  for (std::size_t i = 0; i < 100; ++i) {
    a.set(i, Vec3(g(rng), g(rng), g(rng)).normalized());
    b.set(i, Vec3(g(rng), g(rng), g(rng)).normalized());
  }
  a.invalidate(3);
  b.invalidate(50);
  const auto ab = angular_error_map(a, b), ba = angular_error_map(b, a);
  EXPECT_EQ(ab.valid_count(), 98u);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(ab.valid[i], ba.valid[i]);
    if (ab.valid[i]) EXPECT_NEAR(ab.degrees[i], ba.degrees[i], 1e-12);
  }
}

TEST(MeanError, HalfAndHalf) {
  AngularErrorMap m{{4, 1}, {0.0, 10.0, 0.0, 10.0}, {1, 1, 1, 1}};
  EXPECT_DOUBLE_EQ(mean_angular_error(m), 5.0);
  AngularErrorMap single{{3, 1}, {7.0, 3.2, 9.0}, {0, 1, 0}};
  EXPECT_DOUBLE_EQ(mean_angular_error(single), 3.2);
  AngularErrorMap empty{{2, 1}, {1.0, 1.0}, {0, 0}};
  EXPECT_THROW(mean_angular_error(empty), DegenerateInput);
}

TEST(MeanError, PermutationInvariant) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(0, 90);
  AngularErrorMap m{{1000, 1}, std::vector<double>(1000), std::vector<std::uint8_t>(1000, 1)};
  for (auto& x : m.degrees) x = d(rng);
  const double ref = mean_angular_error(m);
  std::shuffle(m.degrees.begin(), m.degrees.end(), rng);
  EXPECT_NEAR(mean_angular_error(m), ref, 1e-12);
}

TEST(Summary, RegionAndMedian) {
  AngularErrorMap m{{5, 1}, {1.0, 2.0, 3.0, 40.0, 5.0}, {1, 1, 1, 1, 0}};
  const auto all = summarize(m);
  EXPECT_EQ(all.count, 4u);
  EXPECT_DOUBLE_EQ(all.mean, 11.5);
  EXPECT_DOUBLE_EQ(all.median, 2.5);
  EXPECT_DOUBLE_EQ(all.max, 40.0);
  const std::vector<std::uint8_t> region{0, 1, 1, 0, 1};
  const auto part = summarize(m, region);
  EXPECT_EQ(part.count, 2u);
  EXPECT_DOUBLE_EQ(part.mean, 2.5);
  EXPECT_EQ(restrict_to(m, region).valid_count(), 2u);
  const std::vector<std::uint8_t> nothing(5, 0);
  EXPECT_THROW(summarize(m, nothing), DegenerateInput);
}

TEST(Confusion, AllPositive) {
  const BinaryMask ones(10, 10, true), zeros(10, 10, false);
  EXPECT_EQ(confusion(ones, ones), (ConfusionCounts{100, 0, 0, 0}));
  EXPECT_EQ(confusion(zeros, ones), (ConfusionCounts{0, 0, 100, 0}));
  EXPECT_EQ(confusion(ones, zeros), (ConfusionCounts{0, 100, 0, 0}));
}

TEST(Confusion, MatchesNaiveTally) {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.4);
  BinaryMask pred(37, 29), gt(37, 29), eval(37, 29);
  for (int v = 0; v < 29; ++v) {
    for (int u = 0; u < 37; ++u) {
      pred.set(u, v, coin(rng));
      gt.set(u, v, coin(rng));
      eval.set(u, v, !coin(rng));
    }
  }
  ConfusionCounts naive;
  for (int v = 0; v < 29; ++v) {
    for (int u = 0; u < 37; ++u) {
      if (!eval(u, v)) continue;
      const bool p = pred(u, v), t = gt(u, v);
      if (p && t) ++naive.tp;
      else if (p) ++naive.fp;
      else if (t) ++naive.fn;
      else ++naive.tn;
    }
  }
  EXPECT_EQ(confusion(pred, gt, &eval), naive);
  EXPECT_EQ(confusion(pred, gt).total(), 37u * 29u);
  EXPECT_THROW(confusion(pred, BinaryMask(3, 3)), InvalidInput);
}

TEST(Scores, Examples) {
  EXPECT_DOUBLE_EQ(fscore({100, 0, 0, 0}), 100.0);
  EXPECT_DOUBLE_EQ(iou({100, 0, 0, 0}), 100.0);
  EXPECT_DOUBLE_EQ(iou({50, 25, 25, 0}), 50.0);
  EXPECT_NEAR(fscore({50, 25, 25, 0}), 200.0 / 3.0, 1e-12);
  EXPECT_EQ(fscore({0, 10, 10, 5}), 0.0);
  EXPECT_EQ(iou({0, 10, 10, 5}), 0.0);
  EXPECT_THROW(fscore({0, 0, 0, 9}), DegenerateInput);
  EXPECT_THROW(iou({0, 0, 0, 9}), DegenerateInput);
}

TEST(Scores, FscoreIouIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> d(0, 100000);
  for (int i = 0; i < 1000; ++i) {
    ConfusionCounts c{d(rng), d(rng), d(rng), d(rng)};
    if (c.tp + c.fp + c.fn == 0) c.tp = 1;
    const double j = iou(c) / 100.0;
    const double f = fscore(c) / 100.0;
    EXPECT_NEAR(f, 2 * j / (1 + j), 1e-12 * std::max(f, 1e-300));
  }
}
