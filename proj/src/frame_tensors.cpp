#include "rmcf/frame_tensors.hpp"

namespace rmcf {

namespace {

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

// (g . S)_{abcd} = g_ac S_bd + S_ac g_bd - g_ad S_bc - S_ad g_bc
template <class S>
double kn_with_metric(const S& s, int a, int b, int c, int d) {
  return delta(a, c) * s(b, d) + s(a, c) * delta(b, d) - delta(a, d) * s(b, c) - s(a, d) * delta(b, c);
}

}  // namespace

FrameTensors::FrameTensors(const PointCurvature& pc, std::array<double, 2> radial)
    : dim_(pc.n + 1), stride4_(static_cast<std::size_t>(dim_ * dim_ * dim_ * dim_)) {
  std::vector<double> ds(static_cast<std::size_t>(dim_), 0.0);
  ds[0] = radial[0];
  ds[1] = radial[1];
  auto theta = [&](int a, int b) { return ds[static_cast<std::size_t>(a)] * ds[static_cast<std::size_t>(b)]; };
  auto proj = [&](int a, int b) { return delta(a, b) - theta(a, b); };
  auto gg_ = [](int a, int b, int c, int d) { return delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c); };

  const double diff = pc.K_rad - pc.K_orb;
  const double ddiff = pc.dK_rad - pc.dK_orb;

  rm_.assign(stride4_, 0.0);
  drm_.assign(stride4_ * static_cast<std::size_t>(dim_), 0.0);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int c = 0; c < dim_; ++c)
        for (int d = 0; d < dim_; ++d) {
          const double gg = gg_(a, b, c, d);
          const double gt = kn_with_metric(theta, a, b, c, d);
          rm_[idx4(a, b, c, d)] = pc.K_orb * gg + diff * gt;
          for (int e = 0; e < dim_; ++e) {
            auto dtheta = [&](int p, int q) {
              return pc.hr * (proj(e, p) * ds[static_cast<std::size_t>(q)] +
                              ds[static_cast<std::size_t>(p)] * proj(e, q));
            };
            const double radial_part = ds[static_cast<std::size_t>(e)] * (pc.dK_orb * gg + ddiff * gt);
            const double rotation_part = diff == 0.0 ? 0.0 : diff * kn_with_metric(dtheta, a, b, c, d);
            drm_[static_cast<std::size_t>(e) * stride4_ + idx4(a, b, c, d)] = radial_part + rotation_part;
          }
        }

  ric_.assign(static_cast<std::size_t>(dim_ * dim_), 0.0);
  dric_.assign(static_cast<std::size_t>(dim_ * dim_ * dim_), 0.0);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) {
      double r = 0.0;
      for (int c = 0; c < dim_; ++c) r += rm(c, a, c, b);
      ric_[static_cast<std::size_t>(a * dim_ + b)] = r;
      for (int e = 0; e < dim_; ++e) {
        double dr = 0.0;
        for (int c = 0; c < dim_; ++c) dr += drm(e, c, a, c, b);
        dric_[static_cast<std::size_t>((e * dim_ + a) * dim_ + b)] = dr;
      }
    }
}

}  // namespace rmcf
