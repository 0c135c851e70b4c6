#include "normalis/geometry.hpp"

#include <cmath>
#include <string>

namespace normalis {

void CameraIntrinsics::validate() const {
  if (!(std::isfinite(fx) && fx > 0.0) || !(std::isfinite(fy) && fy > 0.0)) {
    throw InvalidInput("camera focal lengths must be positive and finite");
  }
  if (width <= 0 || height <= 0) throw InvalidInput("camera image size must be positive");
  if (!(u0 >= 0.0 && u0 < width) || !(v0 >= 0.0 && v0 < height)) {
    throw InvalidInput("principal point (" + std::to_string(u0) + ", " + std::to_string(v0) +
                       ") lies outside the " + std::to_string(width) + "x" + std::to_string(height) + " frame");
  }
}

Vec3 back_project(double u, double v, double z, const CameraIntrinsics& k) {
  if (!std::isfinite(z) || z <= 0.0) throw InvalidInput("back_project: depth must be positive and finite");
  return {(u - k.u0) * z / k.fx, (v - k.v0) * z / k.fy, z};
}

Eigen::Vector2d project(const Vec3& q, const CameraIntrinsics& k) {
  if (!std::isfinite(q.z()) || q.z() <= 0.0) throw InvalidInput("project: point must lie in front of the camera");
  return {k.fx * q.x() / q.z() + k.u0, k.fy * q.y() / q.z() + k.v0};
}

InverseDepthImage to_inverse_depth(const DepthImage& depth) {
  InverseDepthImage out(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size().pixels(); ++i) {
    if (depth.valid(i)) out.set(i, 1.0 / depth.value(i));
  }
  return out;
}

DepthImage to_depth(const InverseDepthImage& inverse_depth) {
  DepthImage out(inverse_depth.width(), inverse_depth.height());
  for (std::size_t i = 0; i < inverse_depth.size().pixels(); ++i) {
    if (inverse_depth.valid(i)) out.set(i, 1.0 / inverse_depth.value(i));
  }
  return out;
}

InverseDepthImage disparity_as_inverse_depth(const DisparityImage& disparity) {
  InverseDepthImage out(disparity.width(), disparity.height());
  for (std::size_t i = 0; i < disparity.size().pixels(); ++i) {
    if (disparity.valid(i)) out.set(i, disparity.value(i));
  }
  return out;
}

PointImage back_project_image(const DepthImage& depth, const CameraIntrinsics& k) {
  require_same_size(depth.size(), k.size(), "back_project_image");
  PointImage out{depth.size(), std::vector<Vec3>(depth.size().pixels(), Vec3::Zero()),
                 std::vector<std::uint8_t>(depth.size().pixels(), 0)};
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const std::size_t i = depth.size().index(u, v);
      if (!depth.valid(i)) continue;
      const double z = depth.value(i);
      out.points[i] = {(u - k.u0) * z / k.fx, (v - k.v0) * z / k.fy, z};
      out.valid[i] = 1;
    }
  }
  return out;
}

Vec3 orient_toward_camera(const Vec3& n, const Vec3& q) {
  const double norm = n.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidInput("orient_toward_camera: zero or non-finite normal");
  const Vec3 unit = n / norm;
  const double facing = n.dot(q);  // exact zero survives for exact ties
  bool flip;
  if (facing != 0.0) {
    flip = facing > 0.0;
  } else if (unit.z() != 0.0) {
    flip = unit.z() > 0.0;
  } else if (unit.y() != 0.0) {
    flip = unit.y() > 0.0;
  } else {
    flip = unit.x() < 0.0;
  }
  return flip ? Vec3(-unit) : unit;
}

}  // namespace normalis
