#pragma once

#include <array>

#include "rmcf/warped_geometry.hpp"

namespace rmcf {

/// Brute-force curvature of a three-dimensional warped product (n = 2) at a
/// grid node: the coordinate metric diag(b^2, phi^2, phi^2 sin^2 alpha) is
/// differentiated numerically in (x, alpha), Christoffel symbols and the
/// Riemann tensor come from the generic coordinate formulas, and everything is
/// reported in the orthonormal frame (d_x/b, d_alpha/phi, d_beta/(phi sin alpha)).
///
/// x-derivatives are eighth-order centered differences on the grid (nested
/// three deep for nabla Rm, so the node needs 12 grid points on either side);
/// alpha-derivatives are eighth-order differences about alpha = pi/2.
struct OracleTensors {
  std::array<double, 81> rm{};    // R_{abcd}, index ((a*3+b)*3+c)*3+d
  std::array<double, 243> drm{};  // (nabla_e R)_{abcd}, e outermost
  std::array<double, 9> ric{};
  double K_rad = 0.0;
  double K_orb = 0.0;
  double R = 0.0;
  double rm2 = 0.0;
  double ric2 = 0.0;
  double gradRm2 = 0.0;

  double component(int a, int b, int c, int d) const { return rm[static_cast<std::size_t>(((a * 3 + b) * 3 + c) * 3 + d)]; }
  double derivative(int e, int a, int b, int c, int d) const {
    return drm[static_cast<std::size_t>((((e * 3 + a) * 3 + b) * 3 + c) * 3 + d)];
  }
};

inline constexpr int kOracleHalfWidth = 12;

/// Throws InvalidArgument for n != 2 or a node closer than kOracleHalfWidth to
/// a pole.
OracleTensors frame_oracle(const AmbientMetric& metric, int node);

}  // namespace rmcf
