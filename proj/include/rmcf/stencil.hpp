#pragma once

#include <span>

namespace rmcf {

/// Reflection symmetry of a grid field about the two ends of its interval.
/// Odd fields reflect about `center` (f(-k) = 2c - f(k)); even fields mirror.
struct Parity {
  bool odd = false;
  double left_center = 0.0;
  double right_center = 0.0;

  static constexpr Parity even() { return {}; }
  static constexpr Parity odd_about(double left, double right) { return {true, left, right}; }
  static constexpr Parity odd_zero() { return {true, 0.0, 0.0}; }
};

/// Value of `f` at index `j`, which may lie up to size-1 nodes outside
/// [0, size-1]; outside values come from the parity reflection.
double ghost_value(std::span<const double> f, long j, Parity parity);

/// Centered differences on a uniform grid, fitted so that constants and
/// sin(wx), cos(wx) are differentiated exactly. For w = pi this makes every
/// round profile (phi = r sin(pi x), b = pi r) a discrete fixed point while the
/// stencils stay second-order accurate for general data.
class FittedStencil {
 public:
  FittedStencil(double h, double frequency);

  double h() const noexcept { return h_; }
  double d1(std::span<const double> f, long j, Parity p) const;
  double d2(std::span<const double> f, long j, Parity p) const;
  double d3(std::span<const double> f, long j, Parity p) const;
  /// Five-point first derivative, fourth order for general data.
  double d1_wide(std::span<const double> f, long j, Parity p) const;

 private:
  double h_;
  double c1_;
  double c2_;
  double c3_;
  double c1w_;
};

/// Plain second-order centered differences on a uniform parameter grid.
double centered_d1(std::span<const double> f, long j, double h, Parity p);
double centered_d2(std::span<const double> f, long j, double h, Parity p);

/// Six-point Lagrange interpolation of grid data (nodes x_j = j h) at an
/// arbitrary x in [0, (size-1) h], using parity ghosts near the ends.
double lagrange_sample(std::span<const double> f, double h, double x, Parity p);

/// Sixth-order interpolation weights and stencil start; shared by multi-field
/// samplers so the weights are computed once per point.
struct LagrangeWeights {
  long first = 0;
  double w[6] = {};
};
LagrangeWeights lagrange_weights(double h, double x);
double apply_weights(std::span<const double> f, const LagrangeWeights& lw, Parity p);

}  // namespace rmcf
