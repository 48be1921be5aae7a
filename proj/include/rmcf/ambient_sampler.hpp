#pragma once

#include "rmcf/frame_tensors.hpp"
#include "rmcf/warped_geometry.hpp"

namespace rmcf {

/// Ambient fields at one off-grid coordinate x.
struct AmbientPoint {
  double b = 0.0;
  double b_x = 0.0;
  double phi = 0.0;
  double phi_x = 0.0;
  double phi_s = 0.0;
  double K_rad = 0.0;
  double K_orb = 0.0;
  double dK_rad = 0.0;
  double dK_orb = 0.0;

  PointCurvature point_curvature(int n) const { return {n, K_rad, K_orb, dK_rad, dK_orb, phi_s / phi}; }
};

/// Sixth-order interpolation of the metric and its curvature fields, with the
/// pole reflections (phi, b_x, dK odd; the rest even).
class AmbientSampler {
 public:
  AmbientSampler(const AmbientMetric& metric, const AmbientCurvature& curv);
  explicit AmbientSampler(const AmbientMetric& metric);

  AmbientPoint at(double x) const;
  int n() const noexcept { return metric_.n; }
  double rbar() const noexcept { return curv_.rbar; }
  const AmbientMetric& metric() const noexcept { return metric_; }
  const AmbientCurvature& curvature() const noexcept { return curv_; }

 private:
  AmbientMetric metric_;
  AmbientCurvature curv_;
};

}  // namespace rmcf
