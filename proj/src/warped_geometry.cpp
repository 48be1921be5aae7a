#include "rmcf/warped_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "rmcf/error.hpp"
#include "rmcf/stencil.hpp"

namespace rmcf {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dimension_and_grid(int n, int cells) {
  if (n < 2) throw InvalidArgument("hypersurface dimension n must be >= 2");
  if (cells < kMinCells)
    throw InvalidArgument("grid too coarse for pole stencils: M = " + std::to_string(cells) +
                          " < " + std::to_string(kMinCells));
}

double cosine_series(const std::vector<double>& modes, double x) {
  double q = 0.0;
  for (std::size_t k = 0; k < modes.size(); ++k) q += modes[k] * std::cos(static_cast<double>(k) * kPi * x);
  return q;
}

// sin(pi j/M) evaluated from the nearer pole, so values next to x = 1 keep
// full relative precision.
double sin_pi_node(int j, int cells) {
  const int k = std::min(j, cells - j);
  return std::sin(kPi * static_cast<double>(k) / cells);
}

double pow_int(double v, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= v;
  return r;
}

}  // namespace

void AmbientMetric::validate() const {
  check_dimension_and_grid(n, cells());
  if (phi.size() != b.size()) throw InvalidArgument("b and phi must have the same length");
  const int m = cells();
  if (phi[0] != 0.0 || phi[static_cast<std::size_t>(m)] != 0.0)
    throw InvalidArgument("phi must vanish exactly at both poles");
  for (int j = 0; j <= m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (!(b[ju] > 0.0) || !std::isfinite(b[ju]))
      throw InvalidArgument("b must be positive at node " + std::to_string(j));
    if (j > 0 && j < m && (!(phi[ju] > 0.0) || !std::isfinite(phi[ju])))
      throw InvalidArgument("phi must be positive at interior node " + std::to_string(j));
  }
}

AmbientMetric build_round(int n, double radius, int cells) {
  check_dimension_and_grid(n, cells);
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  AmbientMetric m;
  m.n = n;
  m.b.assign(static_cast<std::size_t>(cells) + 1, kPi * radius);
  m.phi.resize(static_cast<std::size_t>(cells) + 1);
  for (int j = 0; j <= cells; ++j) m.phi[static_cast<std::size_t>(j)] = radius * sin_pi_node(j, cells);
  m.phi.front() = 0.0;
  m.phi.back() = 0.0;
  return m;
}

AmbientMetric build_perturbed(int n, int cells, const ProfileShape& shape) {
  AmbientMetric m = build_round(n, 1.0, cells);
  for (int j = 1; j < cells; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double x = m.x(j);
    const double s2 = sin_pi_node(j, cells) * sin_pi_node(j, cells);
    m.phi[ju] *= 1.0 + shape.amplitude * s2 * cosine_series(shape.phi_modes, x);
    m.b[ju] *= 1.0 + shape.b_amplitude * s2 * cosine_series(shape.b_modes, x);
  }
  m.validate();
  return m;
}

double curvature_norm2(int n, double k_rad, double k_orb) {
  return 4.0 * (n * k_rad * k_rad + 0.5 * n * (n - 1) * k_orb * k_orb);
}

double average_scalar_curvature(const AmbientMetric& metric, const std::vector<double>& R) {
  // Trapezoid weights; the end terms vanish with phi.
  double num = 0.0;
  double den = 0.0;
  for (int j = 1; j < metric.cells(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double w = metric.b[ju] * pow_int(metric.phi[ju], metric.n);
    num += w * R[ju];
    den += w;
  }
  return num / den;
}

namespace {

// Radial curvature at an interior node from the local second derivative.
double interior_k_rad(const AmbientMetric& m, const FittedStencil& st, int j, double phi_x, double b_x) {
  const std::span<const double> phi(m.phi);
  const double bj = m.b[static_cast<std::size_t>(j)];
  const double phi_xx = st.d2(phi, j, Parity::odd_zero());
  const double phi_ss = phi_xx / (bj * bj) - phi_x * b_x / (bj * bj * bj);
  return -phi_ss / phi[static_cast<std::size_t>(j)];
}

double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

// Orbit curvature from (1 - phi_s^2)' = K_rad (phi^2)' integrated inward from
// each pole, blended across the middle third. Pole regularity is built in, so
// an O(h^2) drift of the pole slope cannot feed back through 1/phi^2.
void integrated_k_orb(const AmbientMetric& m, const std::vector<double>& k_rad, std::vector<double>& k_orb) {
  const int cells = m.cells();
  const auto& phi = m.phi;
  std::vector<double> q0(phi.size(), 0.0);
  std::vector<double> q1(phi.size(), 0.0);
  for (std::size_t j = 1; j < phi.size(); ++j)
    q0[j] = q0[j - 1] + 0.5 * (k_rad[j - 1] + k_rad[j]) * (phi[j] * phi[j] - phi[j - 1] * phi[j - 1]);
  for (std::size_t j = phi.size() - 1; j-- > 0;)
    q1[j] = q1[j + 1] + 0.5 * (k_rad[j + 1] + k_rad[j]) * (phi[j] * phi[j] - phi[j + 1] * phi[j + 1]);
  for (int j = 1; j < cells; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double w = smoothstep5(3.0 * m.x(j) - 1.0);
    k_orb[ju] = ((1.0 - w) * q0[ju] + w * q1[ju]) / (phi[ju] * phi[ju]);
  }
  k_orb.front() = k_rad.front();
  k_orb.back() = k_rad.back();
}

}  // namespace

AmbientCurvature curvature(const AmbientMetric& metric, Exec exec) {
  metric.validate();
  const int m = metric.cells();
  const int n = metric.n;
  const auto size = static_cast<std::size_t>(m) + 1;
  const FittedStencil st(metric.dx(), kPi);

  AmbientCurvature out;
  out.n = n;
  for (auto* v : {&out.K_rad, &out.K_orb, &out.ric_rad, &out.ric_orb, &out.R, &out.rm2, &out.ric2,
                  &out.E2, &out.gradRm2, &out.rm0_2, &out.unit_dev2, &out.phi_x, &out.b_x, &out.phi_s,
                  &out.dK_rad, &out.dK_orb})
    v->resize(size);

  for (int pole : {0, m}) {
    const double slope = std::abs(st.d1_wide(metric.phi, pole, Parity::odd_zero()) / metric.b[static_cast<std::size_t>(pole)]);
    if (!(std::abs(slope - 1.0) <= kPoleSlopeTolerance))
      throw PoleSingularity("orbit curvature diverges at pole x=" + std::to_string(metric.x(pole)) +
                            ": |phi_s| = " + std::to_string(slope));
  }

  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (int j = 0; j <= m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    out.phi_x[ju] = st.d1_wide(metric.phi, j, Parity::odd_zero());
    out.b_x[ju] = (j == 0 || j == m) ? 0.0 : st.d1(metric.b, j, Parity::even());
    out.phi_s[ju] = out.phi_x[ju] / metric.b[ju];
    if (j != 0 && j != m) out.K_rad[ju] = interior_k_rad(metric, st, j, out.phi_x[ju], out.b_x[ju]);
  }
  // Pole values: K_rad is even in arclength, extrapolate in s^2 from the two
  // nearest interior nodes (the direct third-derivative limit is unstable under the flow).
  out.K_rad[0] = (4.0 * out.K_rad[1] - out.K_rad[2]) / 3.0;
  out.K_rad[size - 1] = (4.0 * out.K_rad[size - 2] - out.K_rad[size - 3]) / 3.0;
  integrated_k_orb(metric, out.K_rad, out.K_orb);

  for (std::size_t j = 0; j < size; ++j) {
    out.ric_rad[j] = n * out.K_rad[j];
    out.ric_orb[j] = out.K_rad[j] + (n - 1) * out.K_orb[j];
    out.R[j] = 2.0 * n * out.K_rad[j] + n * (n - 1.0) * out.K_orb[j];
  }

  out.rbar = average_scalar_curvature(metric, out.R);
  const double nn1 = n * (n + 1.0);
  const double c_bar = out.rbar / nn1;

#pragma omp parallel for if (par) schedule(static)
  for (int j = 0; j <= m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double kr = out.K_rad[ju];
    const double ko = out.K_orb[ju];
    const double dkr = st.d1(out.K_rad, j, Parity::even()) / metric.b[ju];
    const double dko = st.d1(out.K_orb, j, Parity::even()) / metric.b[ju];
    out.dK_rad[ju] = dkr;
    out.dK_orb[ju] = dko;
    out.rm2[ju] = curvature_norm2(n, kr, ko);
    out.ric2[ju] = out.ric_rad[ju] * out.ric_rad[ju] + n * out.ric_orb[ju] * out.ric_orb[ju];
    out.E2[ju] = curvature_norm2(n, kr - c_bar, ko - c_bar);
    const double c_loc = out.R[ju] / nn1;
    out.rm0_2[ju] = curvature_norm2(n, kr - c_loc, ko - c_loc);
    out.unit_dev2[ju] = curvature_norm2(n, kr - 1.0, ko - 1.0);

    // Radial derivatives of the two sectional curvatures, plus the rotation of
    // the radial direction along the orbits (Hess s = (phi_s/phi)(g - ds^2)).
    double grad2 = curvature_norm2(n, dkr, dko);
    if (j != 0 && j != m) {
      const double hr = out.phi_s[ju] / metric.phi[ju];
      const double d = kr - ko;
      grad2 += 8.0 * n * (n - 1.0) * d * d * hr * hr;
    }
    out.gradRm2[ju] = grad2;
  }
  return out;
}

double max_admissible_eps0(int n) { return 1.0 / (4.0 * (n + 1)); }

PinchingReport pinching_check(const AmbientMetric& metric, double eps0) {
  const AmbientCurvature c = curvature(metric);
  PinchingReport r;
  r.lhs_curv = std::sqrt(*std::max_element(c.unit_dev2.begin(), c.unit_dev2.end()));
  r.lhs_grad = std::sqrt(*std::max_element(c.gradRm2.begin(), c.gradRm2.end()));
  r.holds = r.lhs_curv <= eps0 && r.lhs_grad <= eps0;
  return r;
}

double unit_sphere_volume(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

VolumeDiameter volume_and_diameter(const AmbientMetric& metric) {
  metric.validate();
  const int m = metric.cells();
  const double dx = metric.dx();
  VolumeDiameter out;

  double vol = 0.0;
  for (int j = 1; j < m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    vol += metric.b[ju] * pow_int(metric.phi[ju], metric.n);
  }
  out.volume = unit_sphere_volume(metric.n) * vol * dx;

  std::vector<double> s(static_cast<std::size_t>(m) + 1, 0.0);
  for (int j = 1; j <= m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    s[ju] = s[ju - 1] + 0.5 * (metric.b[ju] + metric.b[ju - 1]) * dx;
  }
  const double length = s.back();
  double diam = length;
  for (int j = 0; j <= m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double via_pole = 2.0 * std::min(s[ju], length - s[ju]);
    diam = std::max(diam, std::min(kPi * metric.phi[ju], via_pole));
  }
  out.diameter = diam;
  return out;
}

void write_profile(std::ostream& out, const AmbientMetric& metric) {
  metric.validate();
  std::ostringstream os;
  os << metric.n << ' ' << metric.cells() << ' ' << kProfileVersion << '\n';
  os << std::fixed << std::setprecision(20);
  for (int j = 0; j <= metric.cells(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    os << metric.x(j) << ' ' << metric.b[ju] << ' ' << metric.phi[ju] << '\n';
  }
  out << os.str();
}

AmbientMetric read_profile(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("profile: missing header");
  std::istringstream hs(header);
  int n = 0;
  int cells = 0;
  int version = 0;
  if (!(hs >> n >> cells >> version)) throw FormatError("profile: header must be `n M version`");
  if (version != kProfileVersion)
    throw FormatError("profile: unsupported version " + std::to_string(version));
  if (cells < kMinCells) throw FormatError("profile: M too small");
  AmbientMetric m;
  m.n = n;
  m.b.resize(static_cast<std::size_t>(cells) + 1);
  m.phi.resize(static_cast<std::size_t>(cells) + 1);
  for (int j = 0; j <= cells; ++j) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("profile: truncated at node " + std::to_string(j));
    std::istringstream ls(line);
    double x = 0.0;
    auto ju = static_cast<std::size_t>(j);
    if (!(ls >> x >> m.b[ju] >> m.phi[ju])) throw FormatError("profile: bad line for node " + std::to_string(j));
    if (std::abs(x - m.x(j)) > 1e-12) throw FormatError("profile: grid is not x_j = j/M at node " + std::to_string(j));
  }
  m.validate();
  return m;
}

}  // namespace rmcf
