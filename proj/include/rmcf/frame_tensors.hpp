#pragma once

#include <array>
#include <vector>

namespace rmcf {

/// Ambient curvature data at one point, enough to rebuild Rm and nabla Rm of a
/// warped product in any orthonormal frame.
struct PointCurvature {
  int n = 2;
  double K_rad = 0.0;
  double K_orb = 0.0;
  double dK_rad = 0.0;  // d/ds
  double dK_orb = 0.0;
  double hr = 0.0;      // phi_s / phi, the mean curvature of the orbit spheres per direction
};

/// Rm_{abcd} and (nabla_e Rm)_{abcd} in an orthonormal frame of dimension n+1.
/// The frame is described by the components of the unit radial covector ds in
/// it; only the first two frame vectors may have a radial component, the rest
/// are tangent to the S^{n-1} orbits of the profile plane.
///
/// With theta = ds (x) ds and the Kulkarni-Nomizu product (.):
///   Rm       = K_orb (1/2) g.g + (K_rad - K_orb) g.theta
///   nabla Rm = ds (x) [dK_orb (1/2) g.g + d(K_rad-K_orb) g.theta]
///              + (K_rad - K_orb) g.(nabla theta),
///   nabla_e theta_ab = hr (P_ea ds_b + ds_a P_eb),  P = g - theta.
class FrameTensors {
 public:
  FrameTensors(const PointCurvature& pc, std::array<double, 2> radial);

  int dim() const noexcept { return dim_; }
  double rm(int a, int b, int c, int d) const noexcept { return rm_[idx4(a, b, c, d)]; }
  double drm(int e, int a, int b, int c, int d) const noexcept {
    return drm_[static_cast<std::size_t>(e) * stride4_ + idx4(a, b, c, d)];
  }
  double ric(int a, int b) const noexcept { return ric_[static_cast<std::size_t>(a * dim_ + b)]; }
  /// (nabla_e Ric)_{ab}
  double dric(int e, int a, int b) const noexcept {
    return dric_[static_cast<std::size_t>((e * dim_ + a) * dim_ + b)];
  }

 private:
  std::size_t idx4(int a, int b, int c, int d) const noexcept {
    return static_cast<std::size_t>(((a * dim_ + b) * dim_ + c) * dim_ + d);
  }

  int dim_;
  std::size_t stride4_;
  std::vector<double> rm_;
  std::vector<double> drm_;
  std::vector<double> ric_;
  std::vector<double> dric_;
};

}  // namespace rmcf
