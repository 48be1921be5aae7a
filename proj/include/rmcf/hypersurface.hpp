#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmcf/ambient_sampler.hpp"
#include "rmcf/exec.hpp"
#include "rmcf/warped_geometry.hpp"

namespace rmcf {

/// An SO(n)-invariant hypersurface is described by its profile curve in the
/// quotient half-plane (x, alpha), alpha in [0, pi], carrying the metric
/// b^2 dx^2 + phi^2 dalpha^2. The orbit of a point has radius rho = phi sin(alpha).
enum class Topology {
  sphere,             // endpoints on the axis alpha = 0 and alpha = pi
  coordinate_sphere,  // x = const, the full orbit
};

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Nodes u = 0..P. The first node sits on alpha = 0, the last on alpha = pi.
struct ProfileCurve {
  Topology topology = Topology::sphere;
  std::vector<double> x;
  std::vector<double> alpha;
  /// +1: nu = (T2, -T1) in the frame (d_s, d_alpha/phi), so a coordinate sphere
  /// around the pole x = 0 has its normal pointing towards x = 1 and H > 0 while
  /// it is closer to that pole than the equator. -1 flips the normal.
  int orientation = 1;

  int segments() const noexcept { return static_cast<int>(x.size()) - 1; }
  /// Throws InvalidArgument on size mismatch, fewer than 3 nodes, endpoints off
  /// the axis, alpha outside (0, pi) inside or x outside (0, 1).
  void validate() const;
};

inline constexpr int kMinCurveNodes = 16;

ProfileCurve coordinate_sphere(double x0, int segments);
/// Curve x = x_of_alpha(alpha), sampled at uniform alpha.
ProfileCurve graph_curve(const std::function<double(double)>& x_of_alpha, int segments);

/// Geodesic radius pi*x0 <-> coordinate x0 in the unit round metric.
double round_coordinate_of_radius(double rho);

/// Constants of the hypersurface pinching |A|^2 <= alpha_n H^2 + 1 and the
/// quantities built from it.
struct PinchingParams {
  int n = 2;
  double alpha_n = 11.0 / 16.0;
  double a = 11.0 / 16.0 - 0.5;  // alpha_n - 1/n
  double sigma = 0.1;
  double eps0 = 1.0 / 512.0;
  double eps1 = 1.0 / 256.0;  // (C + 1) eps0 with the surrogate C = 1

  static PinchingParams for_dimension(int n, double sigma = 0.1);
  /// Throws InvalidArgument unless alpha_n and a match n, 0 < sigma < 1 and
  /// eps1 <= 1/(2^7 n).
  void validate() const;
};

/// alpha_2 = 11/16, alpha_n = 4/(4n-3) for n >= 3.
double pinching_alpha(int n);

struct ShapeReport {
  int n = 2;
  // Per node.
  std::vector<double> kappa_prof;
  std::vector<double> kappa_orb;
  std::vector<double> H;
  std::vector<double> A2;
  std::vector<double> traceless;
  std::vector<double> gradH2;
  std::vector<double> P;
  std::vector<double> W;
  std::vector<double> f_sigma;
  std::vector<double> minSectional;
  // Per-node geometry reused by the flow and the identity checks.
  std::vector<double> speed;        // |d gamma/du| in the quotient metric
  std::vector<double> T1, T2;       // unit tangent in the frame (d_s, d_alpha/phi)
  std::vector<double> N1, N2;       // unit normal, same frame
  std::vector<double> rho;          // orbit radius phi sin(alpha)
  std::vector<double> rho_s_over_rho;  // (log rho)_s; 0 at the axis nodes
  std::vector<double> H_s;          // arclength derivatives along the profile
  std::vector<double> kappa_prof_s;
  std::vector<double> kappa_orb_s;
  std::vector<double> gradA2;       // |nabla A|^2
  std::vector<double> b, phi;       // ambient metric at the nodes
  // Scalars.
  double Hmax = 0.0;
  double Hmin = 0.0;
  double maxA2 = 0.0;
  double maxTraceless = 0.0;
  double maxP = 0.0;
  double max_f_sigma = 0.0;
  double maxGradH2 = 0.0;
  double minSectionalMin = 0.0;
  double area = 0.0;  // omega_{n-1} int rho^{n-1} ds
};

/// Extrinsic geometry with h(X, Y) = <nabla_X nu, Y>, so H = n cot(rho) on the
/// geodesic sphere of radius rho in the unit round metric. The two axis nodes
/// take kappa_orb = kappa_prof (umbilic on the axis). Throws DegenerateNode if
/// a tangent has norm below 1e-12.
ShapeReport shape(const ProfileCurve& curve, const AmbientSampler& ambient, const PinchingParams& params,
                  Exec exec = Exec::parallel);
ShapeReport shape(const ProfileCurve& curve, const AmbientMetric& metric, const PinchingParams& params,
                  Exec exec = Exec::parallel);

/// Arclength derivative and Laplacian of a node field along the surface:
/// f_s and f_ss + (n-1) (log rho)_s f_s, with n f_ss on the axis.
std::vector<double> surface_derivative(const ShapeReport& rep, const std::vector<double>& f);
std::vector<double> surface_laplacian(const ShapeReport& rep, const std::vector<double>& f);
/// h_ij nabla_i nabla_j f = kappa_prof f_ss + (n-1) kappa_orb (log rho)_s f_s.
std::vector<double> hessian_along_A(const ShapeReport& rep, const std::vector<double>& f);

/// Smallest induced spacing between neighbouring nodes.
double min_curve_spacing(const ProfileCurve& curve, const AmbientMetric& metric);
double curve_dt_limit(const ProfileCurve& curve, const AmbientMetric& metric, double cfl_factor);
/// max spacing / min spacing.
double spacing_ratio(const ProfileCurve& curve, const AmbientMetric& metric);

/// Forward Euler step of dX/dt = -H nu. Axis nodes move along the axis only.
/// Throws StepRejected("hypersurface", t, ...) when dt exceeds the CFL bound or
/// an orbit radius collapses (extinction is left to the caller to detect).
ProfileCurve mcf_step(const ProfileCurve& curve, const AmbientSampler& ambient, double dt, double cfl_factor,
                      double t = 0.0, Exec exec = Exec::parallel);
ProfileCurve mcf_step(const ProfileCurve& curve, const ShapeReport& rep, double dt, double t = 0.0);

/// Redistributes nodes to uniform induced arclength. x and alpha are
/// interpolated against arclength (with mirrored ghost nodes past the axis) by
/// fourth-order barycentric rational interpolation; if that ever breaks the
/// monotonicity of alpha, monotone cubic (pchip) interpolation is used instead.
/// Rejects curves with fewer than kMinCurveNodes nodes.
ProfileCurve resample(const ProfileCurve& curve, const AmbientMetric& metric);

/// Curve text: header `P topology version`, then P+1 lines `u x alpha`.
inline constexpr int kCurveVersion = 1;
void write_curve(std::ostream& out, const ProfileCurve& curve);
ProfileCurve read_curve(std::istream& in);

}  // namespace rmcf
