#include "normalis/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace normalis {

Neighborhood Neighborhood::square(int radius) {
  if (radius < 1) throw InvalidInput("neighborhood radius must be >= 1");
  Neighborhood nb;
  for (int dv = -radius; dv <= radius; ++dv) {
    for (int du = -radius; du <= radius; ++du) {
      if (du != 0 || dv != 0) nb.offsets.push_back({du, dv});
    }
  }
  return nb;
}

void Neighborhood::validate() const {
  if (offsets.empty()) throw InvalidInput("neighborhood is empty");
  for (const auto& o : offsets) {
    if (o.du == 0 && o.dv == 0) throw InvalidInput("neighborhood must not contain (0, 0)");
  }
}

int Neighborhood::extent() const {
  int e = 0;
  for (const auto& o : offsets) e = std::max({e, std::abs(o.du), std::abs(o.dv)});
  return e;
}

Azimuth azimuth(double gu, double gv, const CameraIntrinsics& k, double eps) {
  const double x = k.fx * gu;
  const double y = k.fy * gv;
  if (std::abs(x) < eps && std::abs(y) < eps) return {0.0, true};
  double phi = std::atan2(y, x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  return {phi, false};
}

PixelCandidates candidates_at(int u, int v, const PointImage& points, const GradientField& grads,
                              const CameraIntrinsics& k, const Neighborhood& nb, const CandidateThresholds& eps) {
  PixelCandidates out;
  const ImageSize size = points.size;
  if (!size.contains(u, v)) return out;
  const std::size_t i = size.index(u, v);
  if (!points.valid[i] || !grads.valid[i]) return out;

  const Azimuth az = azimuth(grads.gu[i], grads.gv[i], k, eps.gradient);
  if (az.frontoparallel) {
    out.status = CandidateStatus::Frontoparallel;
    return out;
  }
  out.azimuth = az.phi;
  const double c = std::cos(az.phi);
  const double s = std::sin(az.phi);
  const double fgu = k.fx * grads.gu[i];
  const double fgv = k.fy * grads.gv[i];
  const Vec3& q = points.points[i];

  bool any_neighbor = false;
  for (const auto& o : nb.offsets) {
    const int pu = u + o.du;
    const int pv = v + o.dv;
    if (!size.contains(pu, pv)) continue;
    const std::size_t j = size.index(pu, pv);
    if (!points.valid[j]) continue;
    any_neighbor = true;
    const Vec3 cand = homogeneous_candidate(fgu, fgv, points.points[j] - q);
    const double norm = cand.norm();
    if (norm < eps.candidate) continue;
    const Vec3 unit = cand / norm;
    out.candidates.push_back({unit.x() * c + unit.y() * s, unit.z()});
  }
  if (!any_neighbor) return out;
  out.status = CandidateStatus::Ok;
  return out;
}

PixelCandidates candidates_at(int u, int v, const DepthImage& depth, const GradientField& grads,
                              const CameraIntrinsics& k, const Neighborhood& nb, const CandidateThresholds& eps) {
  return candidates_at(u, v, back_project_image(depth, k), grads, k, nb, eps);
}

DivisionCandidates division_candidates_at(int u, int v, const PointImage& points, const GradientField& grads,
                                          const CameraIntrinsics& k, const Neighborhood& nb,
                                          const CandidateThresholds& eps) {
  DivisionCandidates out;
  const ImageSize size = points.size;
  if (!size.contains(u, v)) return out;
  const std::size_t i = size.index(u, v);
  if (!points.valid[i] || !grads.valid[i]) return out;

  out.fgu = k.fx * grads.gu[i];
  out.fgv = k.fy * grads.gv[i];
  if (std::abs(out.fgu) < eps.gradient && std::abs(out.fgv) < eps.gradient) {
    out.status = CandidateStatus::Frontoparallel;
    return out;
  }
  const Vec3& q = points.points[i];
  for (const auto& o : nb.offsets) {
    const int pu = u + o.du;
    const int pv = v + o.dv;
    if (!size.contains(pu, pv)) continue;
    const std::size_t j = size.index(pu, pv);
    if (!points.valid[j]) continue;
    const Vec3 r = points.points[j] - q;
    if (std::abs(r.z()) < eps.depth_step) continue;
    out.nz.push_back(-(out.fgu * r.x() + out.fgv * r.y()) / r.z());
  }
  if (!out.nz.empty()) out.status = CandidateStatus::Ok;
  return out;
}

}  // namespace normalis
