#include "rmcf/stencil.hpp"

#include <cmath>

#include "rmcf/error.hpp"

namespace rmcf {

double ghost_value(std::span<const double> f, long j, Parity parity) {
  const long last = static_cast<long>(f.size()) - 1;
  if (j >= 0 && j <= last) return f[static_cast<std::size_t>(j)];
  if (j < 0) {
    const double mirrored = f[static_cast<std::size_t>(-j)];
    return parity.odd ? 2.0 * parity.left_center - mirrored : mirrored;
  }
  const double mirrored = f[static_cast<std::size_t>(2 * last - j)];
  return parity.odd ? 2.0 * parity.right_center - mirrored : mirrored;
}

FittedStencil::FittedStencil(double h, double frequency) : h_(h) {
  if (!(h > 0.0)) throw InvalidArgument("stencil spacing must be positive");
  const double wh = frequency * h;
  if (wh == 0.0) {
    c1_ = c2_ = c3_ = c1w_ = 1.0;
    return;
  }
  c1_ = wh / std::sin(wh);
  const double half = std::sin(0.5 * wh);
  c2_ = wh * wh / (4.0 * half * half);
  c3_ = -(wh * wh * wh) / (std::sin(2.0 * wh) - 2.0 * std::sin(wh));
  c1w_ = 6.0 * wh / (8.0 * std::sin(wh) - std::sin(2.0 * wh));
}

double FittedStencil::d1_wide(std::span<const double> f, long j, Parity p) const {
  const double num = -ghost_value(f, j + 2, p) + 8.0 * ghost_value(f, j + 1, p) - 8.0 * ghost_value(f, j - 1, p) +
                     ghost_value(f, j - 2, p);
  return c1w_ * num / (12.0 * h_);
}

double FittedStencil::d1(std::span<const double> f, long j, Parity p) const {
  return c1_ * (ghost_value(f, j + 1, p) - ghost_value(f, j - 1, p)) / (2.0 * h_);
}

double FittedStencil::d2(std::span<const double> f, long j, Parity p) const {
  return c2_ * (ghost_value(f, j + 1, p) - 2.0 * ghost_value(f, j, p) + ghost_value(f, j - 1, p)) /
         (h_ * h_);
}

double FittedStencil::d3(std::span<const double> f, long j, Parity p) const {
  const double num = ghost_value(f, j + 2, p) - 2.0 * ghost_value(f, j + 1, p) +
                     2.0 * ghost_value(f, j - 1, p) - ghost_value(f, j - 2, p);
  return c3_ * num / (2.0 * h_ * h_ * h_);
}

double centered_d1(std::span<const double> f, long j, double h, Parity p) {
  return (ghost_value(f, j + 1, p) - ghost_value(f, j - 1, p)) / (2.0 * h);
}

double centered_d2(std::span<const double> f, long j, double h, Parity p) {
  return (ghost_value(f, j + 1, p) - 2.0 * ghost_value(f, j, p) + ghost_value(f, j - 1, p)) / (h * h);
}

LagrangeWeights lagrange_weights(double h, double x) {
  LagrangeWeights lw;
  const double s = x / h;
  lw.first = static_cast<long>(std::floor(s)) - 2;
  const double t = s - static_cast<double>(lw.first);
  for (int k = 0; k < 6; ++k) {
    double w = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m == k) continue;
      w *= (t - m) / static_cast<double>(k - m);
    }
    lw.w[k] = w;
  }
  return lw;
}

double apply_weights(std::span<const double> f, const LagrangeWeights& lw, Parity p) {
  double acc = 0.0;
  for (int k = 0; k < 6; ++k) {
    if (lw.w[k] == 0.0) continue;
    acc += lw.w[k] * ghost_value(f, lw.first + k, p);
  }
  return acc;
}

double lagrange_sample(std::span<const double> f, double h, double x, Parity p) {
  return apply_weights(f, lagrange_weights(h, x), p);
}

}  // namespace rmcf
