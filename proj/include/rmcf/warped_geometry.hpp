#pragma once

#include <iosfwd>
#include <vector>

#include "rmcf/exec.hpp"

namespace rmcf {

/// Rotationally symmetric metric b(x)^2 dx^2 + phi(x)^2 g_{S^n} on S^{n+1},
/// sampled on x_j = j/M, j = 0..M. The coordinate x is fixed in time; the
/// arclength s with ds = b dx is derived.
struct AmbientMetric {
  int n = 2;
  std::vector<double> b;
  std::vector<double> phi;

  int cells() const noexcept { return static_cast<int>(b.size()) - 1; }
  double dx() const noexcept { return 1.0 / cells(); }
  double x(int j) const noexcept { return static_cast<double>(j) / cells(); }

  /// Throws InvalidArgument unless n >= 2, M >= 16, phi vanishes exactly at the
  /// poles, phi > 0 inside and b > 0 everywhere.
  void validate() const;
};

inline constexpr int kMinCells = 16;
/// |phi_s(pole)| must stay within this distance of 1.
inline constexpr double kPoleSlopeTolerance = 0.1;

AmbientMetric build_round(int n, double radius, int cells);

/// Pole-smooth perturbation of the unit round metric:
///   phi = sin(pi x) (1 + amplitude sin^2(pi x) q(x)),
///   b   = pi (1 + b_amplitude sin^2(pi x) q_b(x)),
/// with q, q_b cosine series sum_k c_k cos(k pi x) (even about both poles).
/// The sin^2 factor keeps the pole slopes exactly +-1.
struct ProfileShape {
  double amplitude = 0.0;
  std::vector<double> phi_modes{0.0, 1.0};  // c_k for k = 0, 1, ...
  double b_amplitude = 0.0;
  std::vector<double> b_modes{};
};

AmbientMetric build_perturbed(int n, int cells, const ProfileShape& shape);

/// Every pointwise curvature quantity of the ambient, plus the s-derivatives
/// the hypersurface and verification code reuse.
struct AmbientCurvature {
  int n = 2;
  std::vector<double> K_rad;   // planes containing d/ds
  std::vector<double> K_orb;   // planes tangent to the orbit
  std::vector<double> ric_rad;
  std::vector<double> ric_orb;
  std::vector<double> R;
  std::vector<double> rm2;      // |Rm|^2
  std::vector<double> ric2;     // |Ric|^2
  std::vector<double> E2;       // |Rm - rbar/(n(n+1)) g*g|^2
  std::vector<double> gradRm2;  // |nabla Rm|^2
  std::vector<double> rm0_2;    // |Rm - R/(n(n+1)) g*g|^2 (pointwise traceless part)
  std::vector<double> unit_dev2;  // |Rm - g*g|^2, the curvature side of the ambient pinching
  std::vector<double> phi_x;
  std::vector<double> b_x;
  std::vector<double> phi_s;
  std::vector<double> dK_rad;  // d/ds
  std::vector<double> dK_orb;
  double rbar = 0.0;
};

/// Warped-product curvature. K_rad = -phi_ss/phi at interior nodes by fitted
/// centered differences; K_orb = (1 - phi_s^2)/phi^2 evaluated through
/// (1 - phi_s^2)' = K_rad (phi^2)' integrated from the poles; at the poles
/// K_rad = K_orb, extrapolated as an even function of s. Throws PoleSingularity
/// if |phi_s| at a pole is further than kPoleSlopeTolerance from 1.
AmbientCurvature curvature(const AmbientMetric& metric, Exec exec = Exec::parallel);

/// r-bar = int R dmu / int dmu with dmu proportional to b phi^n dx.
double average_scalar_curvature(const AmbientMetric& metric, const std::vector<double>& R);

/// Sectional-curvature sums of squares by plane multiplicity: n planes of type
/// (radial, orbit) and n(n-1)/2 of type (orbit, orbit). 4x for the tensor norm.
double curvature_norm2(int n, double k_rad, double k_orb);

struct PinchingReport {
  bool holds = false;
  double lhs_curv = 0.0;  // max |Rm - g*g|
  double lhs_grad = 0.0;  // max |nabla Rm|
};

PinchingReport pinching_check(const AmbientMetric& metric, double eps0);

/// Largest eps0 allowed for dimension n: 1/(4(n+1)).
double max_admissible_eps0(int n);

struct VolumeDiameter {
  double volume = 0.0;
  double diameter = 0.0;
};

/// Volume omega_n int b phi^n dx and a diameter estimate: the larger of the
/// pole-to-pole length L and, over all orbits, the half-circumference pi*phi
/// capped by the detour through the nearer pole. Exact for round metrics.
VolumeDiameter volume_and_diameter(const AmbientMetric& metric);

/// Volume of the unit k-sphere.
double unit_sphere_volume(int k);

/// Profile text: header `n M version`, then M+1 lines `x b phi`.
inline constexpr int kProfileVersion = 1;
void write_profile(std::ostream& out, const AmbientMetric& metric);
AmbientMetric read_profile(std::istream& in);

}  // namespace rmcf
