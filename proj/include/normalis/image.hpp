#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "normalis/error.hpp"

namespace normalis {

using Vec3 = Eigen::Vector3d;

// All images are row-major: pixel (u, v) is column u, row v, stored at
// index v * width + u.

struct ImageSize {
  int width = 0;
  int height = 0;

  std::size_t pixels() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u);
  }
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

inline void require_same_size(ImageSize a, ImageSize b, const char* what) {
  if (a != b) throw InvalidInput(std::string(what) + ": image dimensions differ");
}

/// Dense scalar image with a validity mask. `Tag` distinguishes depth,
/// inverse depth and disparity so they cannot be mixed up silently.
/// Every valid sample is finite and strictly positive.
template <class Tag>
class ScalarImage {
 public:
  ScalarImage() = default;
  ScalarImage(int width, int height)
      : size_{width, height}, values_(size_.pixels(), 0.0), valid_(size_.pixels(), 0) {
    if (width <= 0 || height <= 0) throw InvalidInput("image dimensions must be positive");
  }

  /// Builds an image from raw samples; non-finite or non-positive samples
  /// become invalid.
  static ScalarImage from_values(int width, int height, std::span<const double> samples) {
    ScalarImage img(width, height);
    if (samples.size() != img.size_.pixels()) throw InvalidInput("sample count does not match dimensions");
    for (std::size_t i = 0; i < samples.size(); ++i) img.set(i, samples[i]);
    return img;
  }

  ImageSize size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }

  double operator()(int u, int v) const { return values_[size_.index(u, v)]; }
  double value(std::size_t i) const { return values_[i]; }
  bool valid(int u, int v) const { return valid_[size_.index(u, v)] != 0; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }

  /// Stores `x`; the pixel is valid iff x is finite and > 0.
  void set(std::size_t i, double x) {
    const bool ok = std::isfinite(x) && x > 0.0;
    values_[i] = ok ? x : 0.0;
    valid_[i] = ok ? 1 : 0;
  }
  void set(int u, int v, double x) { set(size_.index(u, v), x); }
  void invalidate(std::size_t i) {
    values_[i] = 0.0;
    valid_[i] = 0;
  }

  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> mask() const { return valid_; }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto m : valid_) n += m != 0;
    return n;
  }

 private:
  ImageSize size_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

struct DepthTag {};
struct InverseDepthTag {};
struct DisparityTag {};

/// Per-pixel depth z in meters.
using DepthImage = ScalarImage<DepthTag>;
/// Per-pixel 1/z in 1/meters.
using InverseDepthImage = ScalarImage<InverseDepthTag>;
/// Per-pixel stereo disparity in pixels (proportional to 1/z).
using DisparityImage = ScalarImage<DisparityTag>;

/// Per-pixel unit normals with a validity mask. Invalid pixels hold zero.
class NormalMap {
 public:
  NormalMap() = default;
  NormalMap(int width, int height)
      : size_{width, height}, normals_(size_.pixels(), Vec3::Zero()), valid_(size_.pixels(), 0) {
    if (width <= 0 || height <= 0) throw InvalidInput("image dimensions must be positive");
  }

  ImageSize size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }

  const Vec3& operator()(int u, int v) const { return normals_[size_.index(u, v)]; }
  const Vec3& normal(std::size_t i) const { return normals_[i]; }
  bool valid(int u, int v) const { return valid_[size_.index(u, v)] != 0; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }

  void set(std::size_t i, const Vec3& n) {
    normals_[i] = n;
    valid_[i] = 1;
  }
  void set(int u, int v, const Vec3& n) { set(size_.index(u, v), n); }
  void invalidate(std::size_t i) {
    normals_[i] = Vec3::Zero();
    valid_[i] = 0;
  }

  std::span<const Vec3> normals() const { return normals_; }
  std::span<const std::uint8_t> mask() const { return valid_; }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto m : valid_) n += m != 0;
    return n;
  }

 private:
  ImageSize size_;
  std::vector<Vec3> normals_;
  std::vector<std::uint8_t> valid_;
};

/// Binary per-pixel labels (segmentation masks, evaluation regions).
struct BinaryMask {
  ImageSize size;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false)
      : size{width, height}, data(size.pixels(), fill ? 1 : 0) {}

  bool operator()(int u, int v) const { return data[size.index(u, v)] != 0; }
  void set(int u, int v, bool x) { data[size.index(u, v)] = x ? 1 : 0; }
};

}  // namespace normalis
