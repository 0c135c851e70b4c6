#include "normalis/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"

namespace normalis {
namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<Estimator, 5> kAllEstimators = {Estimator::SnePlus, Estimator::Sne, Estimator::ThreeF2NMean,
                                                     Estimator::ThreeF2NMedian, Estimator::PlanePca};

const Vec3 kFrontoparallel{0.0, 0.0, -1.0};

// orient_toward_camera for an already unit-length, non-zero normal.
Vec3 face_camera(const Vec3& n, const Vec3& q) {
  const double facing = n.dot(q);
  if (facing < 0.0) return n;
  if (facing > 0.0) return -n;
  return orient_toward_camera(n, q);
}

struct DoubledAngleSums {
  double sin2 = 0.0;  // 2 sum A n
  double cos2 = 0.0;  // sum (n^2 - A^2)
};

DoubledAngleSums doubled_angle_sums(std::span<const AxialCandidate> candidates) {
  DoubledAngleSums s;
  for (const auto& c : candidates) {
    s.sin2 += 2.0 * c.along * c.nz;
    s.cos2 += c.nz * c.nz - c.along * c.along;
  }
  return s;
}

// (sin t, cos t) for t = atan2(y, x) / 2 in (-pi/2, pi/2], without trig.
// Uses whichever half-angle identity avoids cancellation.
struct HalfAngle {
  double sin = 0.0;
  double cos = 1.0;
};

// Arguments are sums of at most k unit terms, so no overflow guard.
HalfAngle half_angle(double y, double x) {
  const double r = std::sqrt(x * x + y * y);
  if (r == 0.0) return {};
  if (x >= 0.0) {
    const double c = std::sqrt((r + x) / (2.0 * r));
    return {y / (2.0 * r * c), c};
  }
  double s = std::sqrt((r - x) / (2.0 * r));
  if (y < 0.0) s = -s;
  return {s, y / (2.0 * r * s)};
}

double median_of(std::span<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

std::optional<Vec3> assemble_three_f2n(double fgu, double fgv, std::span<double> nz, bool median) {
  if (nz.empty()) return std::nullopt;
  double phi = 0.0;
  if (median) {
    phi = median_of(nz);
  } else {
    for (double x : nz) phi += x;
    phi /= static_cast<double>(nz.size());
  }
  const Vec3 n(fgu, fgv, phi);
  const double norm = n.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
  return Vec3(n / norm);
}

std::optional<Vec3> pca_axis(std::span<const Vec3> points) {
  if (points.size() < 3) return std::nullopt;
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - centroid;
    cov.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const Vec3& ev = solver.eigenvalues();  // ascending
  if (!(ev(2) > 0.0) || ev(1) <= 1e-12 * ev(2)) return std::nullopt;
  return Vec3(solver.eigenvectors().col(0));
}

// Per-pixel kernels shared by the depth and inverse-depth entry points.
// Points are back-projected on the fly: q(u, v) = (ray_u[u] z, ray_v[v] z, z).
class NormalKernel {
 public:
  NormalKernel(const DepthImage& depth, const GradientField& grads, const CameraIntrinsics& k,
               const EstimatorConfig& cfg)
      : size_(depth.size()),
        z_(depth.values().data()),
        valid_(depth.mask().data()),
        grads_(grads),
        k_(k),
        cfg_(cfg),
        extent_(cfg.neighborhood.extent()),
        ray_u_(static_cast<std::size_t>(size_.width)),
        ray_v_(static_cast<std::size_t>(size_.height)) {
    for (int u = 0; u < size_.width; ++u) ray_u_[u] = (u - k.u0) / k.fx;
    for (int v = 0; v < size_.height; ++v) ray_v_[v] = (v - k.v0) / k.fy;
    for (const auto& o : cfg.neighborhood.offsets) {
      const std::ptrdiff_t index = static_cast<std::ptrdiff_t>(o.dv) * size_.width + o.du;
      offsets_.push_back({index, o.du, o.dv, static_cast<double>(o.du), static_cast<double>(o.dv)});
    }
  }

  void run_rows(int row_begin, int row_end, NormalMap& out) const {
    std::vector<double> scratch;
    std::vector<Vec3> window;
    for (int v = row_begin; v < row_end; ++v) {
      for (int u = 0; u < size_.width; ++u) {
        const std::size_t i = size_.index(u, v);
        if (!valid_[i]) continue;
        std::optional<Vec3> n;
        switch (cfg_.estimator) {
          case Estimator::SnePlus: n = sne_plus(u, v, i); break;
          case Estimator::Sne: n = sne(u, v, i, scratch); break;
          case Estimator::ThreeF2NMean:
          case Estimator::ThreeF2NMedian: n = three_f2n(u, v, i, scratch); break;
          case Estimator::PlanePca: n = plane_pca(u, v, window); break;
        }
        if (n) out.set(i, face_camera(*n, point(u, v, i)));
      }
    }
  }

 private:
  struct Offset {
    std::ptrdiff_t index;
    int du;
    int dv;
    double du_f;
    double dv_f;
  };

  Vec3 point(int u, int v, std::size_t i) const { return {ray_u_[u] * z_[i], ray_v_[v] * z_[i], z_[i]}; }

  // Calls fn(r) with r = p - q for every valid neighbor p of pixel i.
  template <class Fn>
  void for_each_neighbor(int u, int v, std::size_t i, Fn&& fn) const {
    const double zq = z_[i];
    const double xq = ray_u_[u] * zq;
    const double yq = ray_v_[v] * zq;
    const bool interior = u >= extent_ && v >= extent_ && u < size_.width - extent_ && v < size_.height - extent_;
    for (const Offset& o : offsets_) {
      const int pu = u + o.du;
      const int pv = v + o.dv;
      if (!interior && !size_.contains(pu, pv)) continue;
      const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + o.index);
      if (!valid_[j]) continue;
      const double zp = z_[j];
      fn(ray_u_[pu] * zp - xq, ray_v_[pv] * zp - yq, zp - zq);
    }
  }

  // Closed-form axial estimate with unit-weighted homogeneous candidates.
  // For v = (G dz cos phi, G dz sin phi, w): A = G dz / |v|, n_z = w / |v|,
  // so both doubled-angle sums need only |v|^2, and dividing through by G
  // changes nothing. With (c, s) = (cos phi, sin phi) and h(q) = c x/z + s y/z
  // for the ray through q, w / G = -(dz h(q) + z_p (c du / f_x + s dv / f_y)).
  std::optional<Vec3> sne_plus(int u, int v, std::size_t i) const {
    if (!grads_.valid[i]) return std::nullopt;
    const double fgu = k_.fx * grads_.gu[i];
    const double fgv = k_.fy * grads_.gv[i];
    const double eps_g = cfg_.thresholds.gradient;
    if (std::abs(fgu) < eps_g && std::abs(fgv) < eps_g) return kFrontoparallel;
    const double g = std::sqrt(fgu * fgu + fgv * fgv);
    const double c = fgu / g;
    const double s = fgv / g;
    const double min_norm2 = (cfg_.thresholds.candidate / g) * (cfg_.thresholds.candidate / g);
    const double hq = c * ray_u_[u] + s * ray_v_[v];
    const double cx = c / k_.fx;
    const double sy = s / k_.fy;
    const double zq = z_[i];
    const bool interior = u >= extent_ && v >= extent_ && u < size_.width - extent_ && v < size_.height - extent_;

    double sin2 = 0.0;
    double cos2 = 0.0;
    int used = 0;
    if (interior) {
      // Branch-free: rejected neighbors get weight zero, which lets the loop vectorize.
      double count = 0.0;
      for (const Offset& o : offsets_) {
        const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + o.index);
        const double zp = z_[j];
        const double a = zp - zq;
        const double w = -(a * hq + zp * (o.du_f * cx + o.dv_f * sy));
        const double aa = a * a;
        const double ww = w * w;
        const double norm2 = aa + ww;
        const bool keep = valid_[j] && norm2 >= min_norm2 && norm2 > 0.0;
        const double inv = keep ? 1.0 / (keep ? norm2 : 1.0) : 0.0;
        sin2 += a * w * inv;
        cos2 += (ww - aa) * inv;
        count += keep ? 1.0 : 0.0;
      }
      if (count == 0.0) return std::nullopt;
      const HalfAngle t = half_angle(2.0 * sin2, cos2);
      return Vec3(t.sin * c, t.sin * s, t.cos);
    }
    for (const Offset& o : offsets_) {
      if (!interior && !size_.contains(u + o.du, v + o.dv)) continue;
      const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + o.index);
      if (!valid_[j]) continue;
      const double zp = z_[j];
      const double a = zp - zq;
      const double w = -(a * hq + zp * (o.du_f * cx + o.dv_f * sy));
      const double aa = a * a;
      const double ww = w * w;
      const double norm2 = aa + ww;
      if (norm2 < min_norm2) continue;
      const double inv = 1.0 / norm2;
      sin2 += a * w * inv;
      cos2 += (ww - aa) * inv;
      ++used;
    }
    if (used == 0) return std::nullopt;
    const HalfAngle t = half_angle(2.0 * sin2, cos2);
    return Vec3(t.sin * c, t.sin * s, t.cos);
  }

  std::optional<Vec3> sne(int u, int v, std::size_t i, std::vector<double>& scratch) const {
    const auto dc = division_candidates(u, v, i, scratch);
    if (dc.status == CandidateStatus::Frontoparallel) return kFrontoparallel;
    if (dc.status != CandidateStatus::Ok) return std::nullopt;
    // Align every candidate with the first one (assumes pairwise angles
    // below pi/2), then average unit vectors.
    const Vec3 reference = Vec3(dc.fgu, dc.fgv, dc.nz.front()).normalized();
    Vec3 sum = Vec3::Zero();
    for (double nz : dc.nz) {
      Vec3 n = Vec3(dc.fgu, dc.fgv, nz).normalized();
      if (n.dot(reference) < 0.0) n = -n;
      sum += n;
    }
    const double norm = sum.norm();
    if (!(norm > 0.0)) return std::nullopt;
    return Vec3(sum / norm);
  }

  std::optional<Vec3> three_f2n(int u, int v, std::size_t i, std::vector<double>& scratch) const {
    auto dc = division_candidates(u, v, i, scratch);
    if (dc.status == CandidateStatus::Frontoparallel) return kFrontoparallel;
    if (dc.status != CandidateStatus::Ok) return std::nullopt;
    return assemble_three_f2n(dc.fgu, dc.fgv, dc.nz, cfg_.estimator == Estimator::ThreeF2NMedian);
  }

  std::optional<Vec3> plane_pca(int u, int v, std::vector<Vec3>& window) const {
    const int half = cfg_.pca_window / 2;
    window.clear();
    for (int dv = -half; dv <= half; ++dv) {
      for (int du = -half; du <= half; ++du) {
        if (!size_.contains(u + du, v + dv)) continue;
        const std::size_t j = size_.index(u + du, v + dv);
        if (valid_[j]) window.push_back(point(u + du, v + dv, j));
      }
    }
    return pca_axis(window);
  }

  struct ScratchCandidates {
    CandidateStatus status = CandidateStatus::Invalid;
    double fgu = 0.0;
    double fgv = 0.0;
    std::vector<double>& nz;
  };

  // Division-form candidates written into `scratch` (reused across pixels).
  ScratchCandidates division_candidates(int u, int v, std::size_t i, std::vector<double>& scratch) const {
    scratch.clear();
    ScratchCandidates out{CandidateStatus::Invalid, 0.0, 0.0, scratch};
    if (!grads_.valid[i]) return out;
    out.fgu = k_.fx * grads_.gu[i];
    out.fgv = k_.fy * grads_.gv[i];
    const double eps_g = cfg_.thresholds.gradient;
    if (std::abs(out.fgu) < eps_g && std::abs(out.fgv) < eps_g) {
      out.status = CandidateStatus::Frontoparallel;
      return out;
    }
    for_each_neighbor(u, v, i, [&](double dx, double dy, double dz) {
      if (std::abs(dz) < cfg_.thresholds.depth_step) return;
      scratch.push_back(-(out.fgu * dx + out.fgv * dy) / dz);
    });
    if (!scratch.empty()) out.status = CandidateStatus::Ok;
    return out;
  }

  ImageSize size_;
  const double* z_;
  const std::uint8_t* valid_;
  const GradientField& grads_;
  const CameraIntrinsics& k_;
  const EstimatorConfig& cfg_;
  int extent_ = 0;
  std::vector<double> ray_u_;
  std::vector<double> ray_v_;
  std::vector<Offset> offsets_;
};

NormalMap run_estimator(const DepthImage& depth, const InverseDepthImage& inverse_depth, const CameraIntrinsics& k,
                        const EstimatorConfig& cfg, const ExecutionOptions& exec) {
  GradientField grads;
  if (cfg.estimator != Estimator::PlanePca) grads = compute_gradients(inverse_depth, cfg.kernel);
  NormalMap out(k.width, k.height);
  const NormalKernel kernel(depth, grads, k, cfg);
  detail::parallel_ranges(k.height, exec.threads, [&](int begin, int end) { kernel.run_rows(begin, end, out); });
  return out;
}

void check_inputs(ImageSize image, const CameraIntrinsics& k, const EstimatorConfig& cfg) {
  k.validate();
  cfg.validate();
  require_same_size(image, k.size(), "estimate_normals");
}

}  // namespace

std::string_view to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::SnePlus: return "sne+";
    case Estimator::Sne: return "sne";
    case Estimator::ThreeF2NMean: return "3f2n-mean";
    case Estimator::ThreeF2NMedian: return "3f2n-median";
    case Estimator::PlanePca: return "plane-pca";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  for (Estimator e : kAllEstimators) {
    if (to_string(e) == name) return e;
  }
  throw InvalidInput("unknown estimator '" + std::string(name) +
                     "' (expected sne+, sne, 3f2n-mean, 3f2n-median or plane-pca)");
}

std::span<const Estimator> all_estimators() { return kAllEstimators; }

void EstimatorConfig::validate() const {
  neighborhood.validate();
  if (pca_window < 3 || pca_window % 2 == 0) throw InvalidInput("pca_window must be odd and >= 3");
  if (!(thresholds.gradient >= 0.0 && thresholds.candidate >= 0.0 && thresholds.depth_step >= 0.0)) {
    throw InvalidInput("estimator thresholds must be non-negative");
  }
}

double inclination_objective(std::span<const AxialCandidate> candidates, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  double total = 0.0;
  for (const auto& cand : candidates) {
    const double t = cand.along * s + cand.nz * c;
    total += t * t;
  }
  return total;
}

InclinationSolution axial_optimal_inclination(std::span<const AxialCandidate> candidates) {
  if (candidates.empty()) throw DegenerateInput("axial_optimal_inclination: empty candidate set");
  const auto sums = doubled_angle_sums(candidates);
  double theta = 0.5 * std::atan2(sums.sin2, sums.cos2);
  if (theta < 0.0) theta += kPi;
  if (theta >= kPi) theta -= kPi;
  return {theta, sums.cos2 < 0.0 ? 1 : 0, inclination_objective(candidates, theta)};
}

InclinationSolution axial_optimal_inclination_two_branch(std::span<const AxialCandidate> candidates) {
  if (candidates.empty()) throw DegenerateInput("axial_optimal_inclination: empty candidate set");
  const auto sums = doubled_angle_sums(candidates);
  double base = 0.0;
  if (sums.cos2 != 0.0) {
    base = 0.5 * std::atan(sums.sin2 / sums.cos2);
  } else if (sums.sin2 != 0.0) {
    base = sums.sin2 > 0.0 ? kPi / 4.0 : -kPi / 4.0;
  }
  const double f0 = inclination_objective(candidates, base);
  const double f1 = inclination_objective(candidates, base + kPi / 2.0);
  const int branch = f1 > f0 ? 1 : 0;
  double theta = base + branch * kPi / 2.0;
  if (theta < 0.0) theta += kPi;
  if (theta >= kPi) theta -= kPi;
  return {theta, branch, branch ? f1 : f0};
}

double grid_search_inclination(std::span<const AxialCandidate> candidates, double step) {
  if (!(step > 0.0 && step <= 0.01)) throw InvalidInput("grid_search_inclination: step must lie in (0, 0.01]");
  if (candidates.empty()) throw DegenerateInput("grid_search_inclination: empty candidate set");
  const auto count = static_cast<long>(std::floor(kPi / step));
  double best_theta = 0.0;
  double best = inclination_objective(candidates, 0.0);
  for (long i = 1; i <= count; ++i) {
    const double theta = static_cast<double>(i) * step;
    const double f = inclination_objective(candidates, theta);
    if (f > best + 1e-12 * std::max(1.0, std::abs(best))) {
      best = f;
      best_theta = theta;
    }
  }
  return best_theta;
}

Vec3 sne_plus_axis(std::span<const AxialCandidate> candidates, double azimuth) {
  const double theta = axial_optimal_inclination(candidates).theta;
  return {std::sin(theta) * std::cos(azimuth), std::sin(theta) * std::sin(azimuth), std::cos(theta)};
}

Vec3 three_f2n_normal(double fgu, double fgv, std::span<double> nz, Estimator variant) {
  if (variant != Estimator::ThreeF2NMean && variant != Estimator::ThreeF2NMedian) {
    throw InvalidInput("three_f2n_normal: " + std::string(to_string(variant)) + " is not a 3F2N variant");
  }
  const auto n = assemble_three_f2n(fgu, fgv, nz, variant == Estimator::ThreeF2NMedian);
  if (!n) throw DegenerateInput("three_f2n_normal: no usable candidates");
  return *n;
}

Vec3 plane_pca_normal(std::span<const Vec3> points, std::optional<Vec3> viewpoint) {
  if (points.size() < 3) throw DegenerateInput("plane_pca_normal: need at least 3 points");
  const auto axis = pca_axis(points);
  if (!axis) throw DegenerateInput("plane_pca_normal: points are collinear or coincident");
  Vec3 view = Vec3::Zero();
  if (viewpoint) {
    view = *viewpoint;
  } else {
    for (const auto& p : points) view += p;
    view /= static_cast<double>(points.size());
  }
  return orient_toward_camera(*axis, view);
}

NormalMap estimate_normals(const DepthImage& depth, const CameraIntrinsics& k, const EstimatorConfig& cfg,
                           const ExecutionOptions& exec) {
  check_inputs(depth.size(), k, cfg);
  return run_estimator(depth, to_inverse_depth(depth), k, cfg, exec);
}

NormalMap estimate_normals(const InverseDepthImage& inverse_depth, const CameraIntrinsics& k,
                           const EstimatorConfig& cfg, const ExecutionOptions& exec) {
  check_inputs(inverse_depth.size(), k, cfg);
  return run_estimator(to_depth(inverse_depth), inverse_depth, k, cfg, exec);
}

}  // namespace normalis
