#include "normalis/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace normalis {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const PlaneScene& p) {
  const double n = p.normal.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9) throw InvalidInput("plane normal must be unit length");
  if (!std::isfinite(p.offset) || p.offset == 0.0) {
    throw InvalidInput("plane passes through the camera center (offset 0)");
  }
}

void validate(const SphereScene& s) {
  if (!(s.radius > 0.0) || !std::isfinite(s.radius)) throw InvalidInput("sphere radius must be positive");
  if (!(s.center.z() - s.radius > 0.0)) throw InvalidInput("sphere must lie entirely in front of the camera");
}

void validate(const DihedralScene& d) {
  validate(d.first);
  validate(d.second);
  if (!std::isfinite(d.split)) throw InvalidInput("dihedral split must be finite");
}

std::optional<double> plane_depth(const PlaneScene& p, const Vec3& ray) {
  const double denom = p.normal.dot(ray);
  if (denom == 0.0) return std::nullopt;
  const double z = -p.offset / denom;
  if (!std::isfinite(z) || z <= 0.0) return std::nullopt;
  return z;
}

std::optional<double> sphere_depth(const SphereScene& s, const Vec3& ray) {
  // |z ray - c|^2 = r^2, nearest positive root.
  const double a = ray.squaredNorm();
  const double b = ray.dot(s.center);
  const double c = s.center.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double qv = b + std::copysign(root, b);
  double z1 = qv / a;
  double z2 = qv != 0.0 ? c / qv : z1;
  if (z1 > z2) std::swap(z1, z2);
  if (z1 > 0.0) return z1;
  if (z2 > 0.0) return z2;
  return std::nullopt;
}

const PlaneScene& dihedral_half(const DihedralScene& d, int u, int v) {
  const double coord = d.axis == SplitAxis::U ? u : v;
  return coord < d.split ? d.first : d.second;
}

// Invokes fn(u, v, index, z, normal) for every pixel with a valid hit.
template <class Fn>
void cast(const SceneSpec& scene, const CameraIntrinsics& k, Fn&& fn) {
  k.validate();
  std::visit([](const auto& s) { validate(s); }, scene);
  const ImageSize size = k.size();
  for (int v = 0; v < size.height; ++v) {
    for (int u = 0; u < size.width; ++u) {
      const Vec3 ray = pixel_ray(u, v, k);
      const std::size_t i = size.index(u, v);
      std::visit(Overloaded{[&](const PlaneScene& p) {
                              if (auto z = plane_depth(p, ray)) fn(u, v, i, *z, p.normal);
                            },
                            [&](const SphereScene& s) {
                              if (auto z = sphere_depth(s, ray)) {
                                fn(u, v, i, *z, Vec3((*z * ray - s.center) / s.radius));
                              }
                            },
                            [&](const DihedralScene& d) {
                              const PlaneScene& p = dihedral_half(d, u, v);
                              if (auto z = plane_depth(p, ray)) fn(u, v, i, *z, p.normal);
                            }},
                 scene);
    }
  }
}

// splitmix64 finalizer, used to decorrelate user seeds before seeding the
// per-image engine.
std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

PlaneScene PlaneScene::through(const Vec3& normal, const Vec3& point) {
  const double n = normal.norm();
  if (!(n > 0.0)) throw InvalidInput("plane normal must be non-zero");
  const Vec3 unit = normal / n;
  return {unit, -unit.dot(point)};
}

DihedralScene DihedralScene::folded(const CameraIntrinsics& k, SplitAxis axis, double split, double ridge_depth,
                                    double first_tilt, double second_tilt) {
  k.validate();
  if (!(ridge_depth > 0.0)) throw InvalidInput("ridge depth must be positive");
  // Ridge: the 3D line through the principal row/column of the split line,
  // running along the image axis orthogonal to the split.
  Vec3 anchor;
  Vec3 tilt_axis;
  if (axis == SplitAxis::U) {
    anchor = back_project(split, k.v0, ridge_depth, k);
    tilt_axis = Vec3::UnitX();
  } else {
    anchor = back_project(k.u0, split, ridge_depth, k);
    tilt_axis = Vec3::UnitY();
  }
  auto tilted = [&](double angle) {
    return PlaneScene::through(Vec3(std::sin(angle) * tilt_axis - std::cos(angle) * Vec3::UnitZ()), anchor);
  };
  return {tilted(first_tilt), tilted(second_tilt), axis, split};
}

DepthImage render_depth(const SceneSpec& scene, const CameraIntrinsics& k) {
  DepthImage depth(k.width, k.height);
  cast(scene, k, [&](int, int, std::size_t i, double z, const Vec3&) { depth.set(i, z); });
  if (depth.valid_count() == 0) throw InvalidInput("scene lies entirely behind the camera");
  return depth;
}

NormalMap ground_truth_normals(const SceneSpec& scene, const CameraIntrinsics& k) {
  NormalMap normals(k.width, k.height);
  std::size_t hits = 0;
  cast(scene, k, [&](int u, int v, std::size_t i, double z, const Vec3& n) {
    normals.set(i, orient_toward_camera(n, z * pixel_ray(u, v, k)));
    ++hits;
  });
  if (hits == 0) throw InvalidInput("scene lies entirely behind the camera");
  return normals;
}

DepthImage add_noise(const DepthImage& depth, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw InvalidInput("noise sigma must be >= 0");
  if (spec.sigma == 0.0) return depth;
  DepthImage out(depth.width(), depth.height());
  std::mt19937_64 engine(mix_seed(spec.seed));
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  for (std::size_t i = 0; i < depth.size().pixels(); ++i) {
    // One draw per pixel, valid or not, so the noise at a pixel depends only
    // on (seed, pixel index).
    const double e = unit_normal(engine);
    if (!depth.valid(i)) continue;
    const double z = depth.value(i);
    const double sigma = spec.unit == NoiseUnit::Meters ? spec.sigma : spec.sigma * z;
    out.set(i, z + sigma * e);
  }
  return out;
}

BinaryMask ridge_band(SplitAxis axis, double split, ImageSize size, double half_width) {
  BinaryMask band(size.width, size.height);
  const double boundary = std::ceil(split) - 0.5;
  for (int v = 0; v < size.height; ++v) {
    for (int u = 0; u < size.width; ++u) {
      const double coord = axis == SplitAxis::U ? u : v;
      band.set(u, v, std::abs(coord - boundary) <= half_width);
    }
  }
  return band;
}

PlaneScene sample_plane(std::mt19937_64& rng, double max_inclination) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double inclination = unit(rng) * max_inclination;
  const double azimuth = unit(rng) * 2.0 * std::numbers::pi;
  const double z0 = 2.0 + 6.0 * unit(rng);
  const Vec3 n(std::sin(inclination) * std::cos(azimuth), std::sin(inclination) * std::sin(azimuth),
               -std::cos(inclination));
  return PlaneScene::through(n, Vec3(0.0, 0.0, z0));
}

SphereScene sample_sphere(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double z = 6.0 + 4.0 * unit(rng);
  const double x = (unit(rng) - 0.5) * 0.2 * z;
  const double y = (unit(rng) - 0.5) * 0.2 * z;
  const double r = 1.0 + 2.0 * unit(rng);
  return {Vec3(x, y, z), r};
}

namespace {

// True when every pixel ray in the rectangle hits `plane` in front of the
// camera. Hit depth is z = -offset / (n·ray) and the sign of n·ray is
// affine in the pixel, so the four corners decide.
bool plane_covers(const PlaneScene& plane, const CameraIntrinsics& k, double u_lo, double u_hi, double v_lo,
                  double v_hi) {
  for (double u : {u_lo, u_hi}) {
    for (double v : {v_lo, v_hi}) {
      const double denom = plane.normal.dot(pixel_ray(u, v, k));
      if (!(-plane.offset / denom > 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

DihedralScene sample_dihedral(std::mt19937_64& rng, const CameraIntrinsics& k) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double deg = std::numbers::pi / 180.0;
  // Redraw until each half sees its plane over its whole side.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double split = std::round(k.width * (0.4 + 0.2 * unit(rng)));
    const double depth = 3.0 + 3.0 * unit(rng);
    const double first = (-50.0 + 100.0 * unit(rng)) * deg;
    double fold = (30.0 + 70.0 * unit(rng)) * deg;
    if (unit(rng) < 0.5) fold = -fold;
    double second = first + fold;
    if (second > 60.0 * deg || second < -60.0 * deg) second = first - fold;
    const auto scene = DihedralScene::folded(k, SplitAxis::U, split, depth, first, second);
    const double bottom = k.height - 1.0;
    if (plane_covers(scene.first, k, 0.0, split - 1.0, 0.0, bottom) &&
        plane_covers(scene.second, k, split, k.width - 1.0, 0.0, bottom)) {
      return scene;
    }
  }
  throw InvalidInput("sample_dihedral: field of view too wide for the tilt range");
}

}  // namespace normalis
