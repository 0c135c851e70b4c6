#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "normalis/geometry.hpp"

namespace normalis::test {

inline double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate for tiny angles
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline double axial_angle(const Vec3& a, const Vec3& b) {
  const double t = angle_between(a, b);
  return std::min(t, std::numbers::pi - t);
}

inline double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline CameraIntrinsics small_camera(int w = 160, int h = 120, double f = 100.0) {
  return {f, f, (w - 1) / 2.0, (h - 1) / 2.0, w, h};
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("normalis_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace normalis::test
