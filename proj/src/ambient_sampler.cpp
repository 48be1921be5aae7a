#include "rmcf/ambient_sampler.hpp"

#include <string>

#include "rmcf/error.hpp"
#include "rmcf/stencil.hpp"

namespace rmcf {

AmbientSampler::AmbientSampler(const AmbientMetric& metric, const AmbientCurvature& curv)
    : metric_(metric), curv_(curv) {}

AmbientSampler::AmbientSampler(const AmbientMetric& metric) : metric_(metric), curv_(rmcf::curvature(metric)) {}

AmbientPoint AmbientSampler::at(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("ambient sample outside [0,1]: x=" + std::to_string(x));
  const LagrangeWeights lw = lagrange_weights(metric_.dx(), x);
  const Parity even = Parity::even();
  const Parity odd = Parity::odd_zero();
  AmbientPoint p;
  p.b = apply_weights(metric_.b, lw, even);
  p.b_x = apply_weights(curv_.b_x, lw, odd);
  p.phi = apply_weights(metric_.phi, lw, odd);
  p.phi_x = apply_weights(curv_.phi_x, lw, even);
  p.phi_s = apply_weights(curv_.phi_s, lw, even);
  p.K_rad = apply_weights(curv_.K_rad, lw, even);
  p.K_orb = apply_weights(curv_.K_orb, lw, even);
  p.dK_rad = apply_weights(curv_.dK_rad, lw, odd);
  p.dK_orb = apply_weights(curv_.dK_orb, lw, odd);
  return p;
}

}  // namespace rmcf
