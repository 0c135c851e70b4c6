#pragma once

#include <vector>

#include "normalis/geometry.hpp"
#include "normalis/gradient.hpp"

namespace normalis {

struct PixelOffset {
  int du = 0;
  int dv = 0;
  friend bool operator==(const PixelOffset&, const PixelOffset&) = default;
};

/// Set of neighbor displacements P around each pixel.
struct Neighborhood {
  std::vector<PixelOffset> offsets;

  /// All offsets with Chebyshev distance 1..radius; radius 1 is the
  /// 8-connected ring (k = 8).
  static Neighborhood square(int radius = 1);
  /// Throws InvalidInput if empty or containing (0, 0).
  void validate() const;
  int extent() const;
};

/// Numerical cut-offs. Below `gradient` (on |f_x g_u| and |f_y g_v|) a pixel
/// is frontoparallel; homogeneous candidates with norm below `candidate` are
/// dropped; division-form candidates need |dz| >= `depth_step` meters.
struct CandidateThresholds {
  double gradient = 1e-12;
  double candidate = 1e-12;
  double depth_step = 1e-9;
};

/// One unit axial candidate projected onto the azimuth plane:
/// along = n_x cos(phi) + n_y sin(phi), nz = n_z, along^2 + nz^2 = 1.
struct AxialCandidate {
  double along = 0.0;
  double nz = 0.0;
};

enum class CandidateStatus { Ok, Frontoparallel, Invalid };

struct PixelCandidates {
  CandidateStatus status = CandidateStatus::Invalid;
  double azimuth = 0.0;  ///< radians in [0, 2 pi)
  std::vector<AxialCandidate> candidates;
};

struct Azimuth {
  double phi = 0.0;
  bool frontoparallel = false;
};

/// phi = atan2(f_y g_v, f_x g_u) wrapped to [0, 2 pi). Both arguments below
/// `eps` in magnitude gives phi = 0 and the frontoparallel flag.
Azimuth azimuth(double gu, double gv, const CameraIntrinsics& k, double eps = 1e-12);

/// Homogeneous candidate for neighbor offset r = p - q:
/// (f_x g_u dz, f_y g_v dz, -(f_x g_u dx + f_y g_v dy)).
inline Vec3 homogeneous_candidate(double fgu, double fgv, const Vec3& r) {
  return {fgu * r.z(), fgv * r.z(), -(fgu * r.x() + fgv * r.y())};
}

/// Unit axial candidates at pixel (u, v). `status` is Invalid when q, its
/// gradient, or every neighbor is unusable, Frontoparallel when the gradient
/// vanishes (empty candidate list).
PixelCandidates candidates_at(int u, int v, const PointImage& points, const GradientField& grads,
                              const CameraIntrinsics& k, const Neighborhood& nb,
                              const CandidateThresholds& eps = {});
PixelCandidates candidates_at(int u, int v, const DepthImage& depth, const GradientField& grads,
                              const CameraIntrinsics& k, const Neighborhood& nb,
                              const CandidateThresholds& eps = {});

/// Sign-sensitive candidates with explicit division by dz:
/// (f_x g_u, f_y g_v, -(f_x g_u dx + f_y g_v dy) / dz), neighbors with
/// |dz| < eps.depth_step skipped. Same status semantics as candidates_at.
struct DivisionCandidates {
  CandidateStatus status = CandidateStatus::Invalid;
  double fgu = 0.0;
  double fgv = 0.0;
  std::vector<double> nz;
};
DivisionCandidates division_candidates_at(int u, int v, const PointImage& points, const GradientField& grads,
                                          const CameraIntrinsics& k, const Neighborhood& nb,
                                          const CandidateThresholds& eps = {});

}  // namespace normalis
