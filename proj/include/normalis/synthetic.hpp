#pragma once

#include <cstdint>
#include <random>
#include <variant>

#include "normalis/geometry.hpp"

namespace normalis {

/// Infinite plane {q : normal·q + offset = 0}; `normal` is unit length.
struct PlaneScene {
  Vec3 normal{0.0, 0.0, -1.0};
  double offset = 5.0;

  /// Plane with the given normal through `point`.
  static PlaneScene through(const Vec3& normal, const Vec3& point);
};

struct SphereScene {
  Vec3 center{0.0, 0.0, 10.0};
  double radius = 2.0;
};

enum class SplitAxis { U, V };

/// Two planes, each governing one side of an image-space line. Pixels with
/// coordinate (u or v, per `axis`) < `split` see `first`, the rest `second`.
struct DihedralScene {
  PlaneScene first;
  PlaneScene second;
  SplitAxis axis = SplitAxis::U;
  double split = 0.0;

  /// Two planes folded along a 3D ridge that projects exactly onto the
  /// image line at `split`. The ridge passes through depth `ridge_depth` on
  /// the line; each half is tilted by its angle (radians) from frontoparallel
  /// about the ridge direction.
  static DihedralScene folded(const CameraIntrinsics& k, SplitAxis axis, double split, double ridge_depth,
                              double first_tilt, double second_tilt);
};

using SceneSpec = std::variant<PlaneScene, SphereScene, DihedralScene>;

enum class NoiseUnit { Meters, FractionOfDepth };

/// Additive Gaussian depth noise, sigma in meters or as a fraction of z.
struct NoiseSpec {
  NoiseUnit unit = NoiseUnit::FractionOfDepth;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Ray casts every pixel center. Pixels without a positive, finite hit are
/// invalid. Throws InvalidInput if the scene is malformed or nothing in it
/// lies in front of the camera.
DepthImage render_depth(const SceneSpec& scene, const CameraIntrinsics& k);

/// Exact surface normals at the rendered pixels, oriented toward the camera.
NormalMap ground_truth_normals(const SceneSpec& scene, const CameraIntrinsics& k);

/// z' = z + e, e ~ N(0, sigma(z)^2), deterministic in `spec.seed`. Samples
/// that land at z' <= 0 become invalid.
DepthImage add_noise(const DepthImage& depth, const NoiseSpec& spec);

/// Mask of pixels within `half_width` pixels of the boundary between the
/// two sides of an image-space split (the boundary lies half a pixel before
/// the first pixel of the second side).
BinaryMask ridge_band(SplitAxis axis, double split, ImageSize size, double half_width);
inline BinaryMask ridge_band(const DihedralScene& scene, ImageSize size, double half_width) {
  return ridge_band(scene.axis, scene.split, size, half_width);
}

// Random scene samplers used by suite generation and the acceptance tests.
// All draw from the caller's engine, so a fixed seed gives a fixed suite.

/// Plane through (0, 0, z0), z0 in [2, 8] m, whose normal is tilted from
/// the optical axis by an inclination uniform in [0, max_inclination].
PlaneScene sample_plane(std::mt19937_64& rng, double max_inclination);

/// Sphere with center near the optical axis at 6..10 m, radius 1..3 m.
SphereScene sample_sphere(std::mt19937_64& rng);

/// Folded dihedral with a vertical ridge near the image center, ridge depth
/// 3..6 m, halves tilted in [-50, 50] deg and differing by 30..100 deg.
/// Draws where a half would run past the horizon on its side are redrawn.
DihedralScene sample_dihedral(std::mt19937_64& rng, const CameraIntrinsics& k);

}  // namespace normalis
