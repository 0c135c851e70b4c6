#pragma once

#include <Eigen/Core>

#include "normalis/image.hpp"

namespace normalis {

/// Pinhole intrinsics. Pixel (u, v) of a point q = (x, y, z) is
/// u = f_x x / z + u_o, v = f_y y / z + v_o.
struct CameraIntrinsics {
  double fx = 0.0;  ///< focal length, pixels
  double fy = 0.0;  ///< focal length, pixels
  double u0 = 0.0;  ///< principal point column
  double v0 = 0.0;  ///< principal point row
  int width = 0;
  int height = 0;

  /// Throws InvalidInput unless f_x, f_y > 0 and the principal point lies in
  /// the frame.
  void validate() const;
  ImageSize size() const { return {width, height}; }

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Ray through pixel (u, v) scaled to unit depth: ((u - u_o)/f_x, (v - v_o)/f_y, 1).
inline Vec3 pixel_ray(double u, double v, const CameraIntrinsics& k) {
  return {(u - k.u0) / k.fx, (v - k.v0) / k.fy, 1.0};
}

Vec3 back_project(double u, double v, double z, const CameraIntrinsics& k);
Eigen::Vector2d project(const Vec3& q, const CameraIntrinsics& k);

InverseDepthImage to_inverse_depth(const DepthImage& depth);
DepthImage to_depth(const InverseDepthImage& inverse_depth);

/// Disparity is a positively scaled inverse depth; samples are copied
/// unchanged. The unknown scale f_x * baseline cancels in every estimator.
InverseDepthImage disparity_as_inverse_depth(const DisparityImage& disparity);

/// Back-projected points for every valid depth pixel (invalid pixels hold
/// zero and are masked).
struct PointImage {
  ImageSize size;
  std::vector<Vec3> points;
  std::vector<std::uint8_t> valid;
};
PointImage back_project_image(const DepthImage& depth, const CameraIntrinsics& k);

/// Flips `n` so that it faces the camera along the view ray to `q`
/// (n·q < 0). When n·q = 0 the sign is fixed by n_z <= 0, then n_y <= 0,
/// then n_x >= 0. The result is unit length.
Vec3 orient_toward_camera(const Vec3& n, const Vec3& q);

}  // namespace normalis
