#include "rmcf/hypersurface.hpp"

#include <algorithm>
#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rmcf/error.hpp"
#include "rmcf/stencil.hpp"

namespace rmcf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinSpeed = 1e-12;
constexpr Parity kAlphaParity = Parity::odd_about(0.0, kPi);

double pow_int(double v, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= v;
  return r;
}

}  // namespace

std::string to_string(Topology t) { return t == Topology::sphere ? "sphere" : "coordinate_sphere"; }

Topology topology_from_string(const std::string& s) {
  if (s == "sphere") return Topology::sphere;
  if (s == "coordinate_sphere") return Topology::coordinate_sphere;
  throw FormatError("unknown curve topology '" + s + "'");
}

void ProfileCurve::validate() const {
  if (x.size() != alpha.size()) throw InvalidArgument("curve x and alpha differ in length");
  if (x.size() < 3) throw InvalidArgument("curve needs at least 3 nodes");
  if (orientation != 1 && orientation != -1) throw InvalidArgument("curve orientation must be +1 or -1");
  if (alpha.front() != 0.0 || alpha.back() != kPi)
    throw InvalidArgument("curve endpoints must lie on the axis alpha = 0 and alpha = pi");
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0 && x[k] < 1.0))
      throw InvalidArgument("curve node " + std::to_string(k) + " has x outside (0,1)");
    if (k > 0 && k + 1 < x.size() && !(alpha[k] > 0.0 && alpha[k] < kPi))
      throw InvalidArgument("curve node " + std::to_string(k) + " has alpha outside (0,pi)");
  }
}

ProfileCurve coordinate_sphere(double x0, int segments) {
  ProfileCurve c = graph_curve([x0](double) { return x0; }, segments);
  c.topology = Topology::coordinate_sphere;
  return c;
}

ProfileCurve graph_curve(const std::function<double(double)>& x_of_alpha, int segments) {
  if (segments < 2) throw InvalidArgument("curve needs at least 2 segments");
  ProfileCurve c;
  c.x.resize(static_cast<std::size_t>(segments) + 1);
  c.alpha.resize(c.x.size());
  for (int k = 0; k <= segments; ++k) {
    const double a = k == segments ? kPi : kPi * k / segments;
    c.alpha[static_cast<std::size_t>(k)] = a;
    c.x[static_cast<std::size_t>(k)] = x_of_alpha(a);
  }
  c.validate();
  return c;
}

double round_coordinate_of_radius(double rho) { return rho / kPi; }

double pinching_alpha(int n) {
  if (n < 2) throw InvalidArgument("hypersurface dimension must be at least 2");
  return n == 2 ? 11.0 / 16.0 : 4.0 / (4.0 * n - 3.0);
}

PinchingParams PinchingParams::for_dimension(int n, double sigma) {
  PinchingParams p;
  p.n = n;
  p.alpha_n = pinching_alpha(n);
  p.a = p.alpha_n - 1.0 / n;
  p.sigma = sigma;
  p.eps1 = 1.0 / (128.0 * n);
  p.eps0 = 0.5 * p.eps1;
  p.validate();
  return p;
}

void PinchingParams::validate() const {
  if (std::abs(alpha_n - pinching_alpha(n)) > 1e-15) throw InvalidArgument("alpha_n does not match n");
  if (std::abs(a - (alpha_n - 1.0 / n)) > 1e-15) throw InvalidArgument("a must equal alpha_n - 1/n");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidArgument("sigma must lie in (0,1)");
  if (!(eps1 > 0.0 && eps1 <= 1.0 / (128.0 * n))) throw InvalidArgument("eps1 must lie in (0, 1/(2^7 n)]");
}

ShapeReport shape(const ProfileCurve& curve, const AmbientMetric& metric, const PinchingParams& params, Exec exec) {
  return shape(curve, AmbientSampler(metric), params, exec);
}

ShapeReport shape(const ProfileCurve& curve, const AmbientSampler& ambient, const PinchingParams& params, Exec exec) {
  curve.validate();
  params.validate();
  const int n = ambient.n();
  if (params.n != n) throw InvalidArgument("pinching parameters are for a different dimension");
  const int P = curve.segments();
  const auto size = static_cast<std::size_t>(P) + 1;
  const double du = 1.0 / P;
  const std::span<const double> xs(curve.x);
  const std::span<const double> as(curve.alpha);
  const double o = curve.orientation;

  ShapeReport r;
  r.n = n;
  for (auto* v : {&r.kappa_prof, &r.kappa_orb, &r.H, &r.A2, &r.traceless, &r.gradH2, &r.P, &r.W, &r.f_sigma,
                  &r.minSectional, &r.speed, &r.T1, &r.T2, &r.N1, &r.N2, &r.rho, &r.rho_s_over_rho, &r.H_s,
                  &r.kappa_prof_s, &r.kappa_orb_s, &r.gradA2, &r.b, &r.phi})
    v->resize(size);

  const bool par = exec == Exec::parallel;
  int degenerate = -1;
  std::vector<double> k_rad(size), k_orb(size), t1sq(size);

#pragma omp parallel for if (par) schedule(static)
  for (int k = 0; k <= P; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const AmbientPoint pt = ambient.at(xs[ku]);
    const double xu = centered_d1(xs, k, du, Parity::even());
    const double xuu = centered_d2(xs, k, du, Parity::even());
    const double au = centered_d1(as, k, du, kAlphaParity);
    const double auu = centered_d2(as, k, du, kAlphaParity);
    const double sigma = std::hypot(pt.b * xu, pt.phi * au);
    if (!(sigma >= kMinSpeed)) {
#pragma omp critical
      degenerate = k;
      continue;
    }
    const double T1 = pt.b * xu / sigma;
    const double T2 = pt.phi * au / sigma;
    const double N1 = o * T2;
    const double N2 = -o * T1;
    // Covariant acceleration in the quotient metric.
    const double acc_x = xuu + (pt.b_x / pt.b) * xu * xu - (pt.phi * pt.phi_x / (pt.b * pt.b)) * au * au;
    const double acc_a = auu + 2.0 * (pt.phi_x / pt.phi) * xu * au;
    const double kp = -(pt.b * acc_x * N1 + pt.phi * acc_a * N2) / (sigma * sigma);

    double ko = kp;
    double rho = 0.0;
    double log_rho_s = 0.0;
    if (k != 0 && k != P) {
      const double sa = std::sin(as[ku]);
      const double ca = std::cos(as[ku]);
      rho = pt.phi * sa;
      ko = (N1 * pt.phi_s * sa + N2 * ca) / rho;
      log_rho_s = (T1 * pt.phi_s * sa + T2 * ca) / rho;
    }
    r.speed[ku] = sigma;
    r.T1[ku] = T1;
    r.T2[ku] = T2;
    r.N1[ku] = N1;
    r.N2[ku] = N2;
    r.rho[ku] = rho;
    r.rho_s_over_rho[ku] = log_rho_s;
    r.kappa_prof[ku] = kp;
    r.kappa_orb[ku] = ko;
    r.b[ku] = pt.b;
    r.phi[ku] = pt.phi;
    k_rad[ku] = pt.K_rad;
    k_orb[ku] = pt.K_orb;
    t1sq[ku] = T1 * T1;
  }
  if (degenerate >= 0)
    throw DegenerateNode("profile tangent vanishes at node " + std::to_string(degenerate), degenerate);

  r.kappa_prof_s = surface_derivative(r, r.kappa_prof);
  r.kappa_orb_s = surface_derivative(r, r.kappa_orb);

  const double nm1 = n - 1.0;
  for (std::size_t k = 0; k < size; ++k) {
    const double kp = r.kappa_prof[k];
    const double ko = r.kappa_orb[k];
    r.H[k] = kp + nm1 * ko;
    r.A2[k] = kp * kp + nm1 * ko * ko;
    r.traceless[k] = nm1 / n * (kp - ko) * (kp - ko);
    r.P[k] = r.A2[k] - params.alpha_n * r.H[k] * r.H[k] - 1.0;
    r.W[k] = params.a * r.H[k] * r.H[k] + 1.0;
    r.f_sigma[k] = r.traceless[k] / std::pow(r.W[k], 1.0 - params.sigma);
    double ks = k_orb[k] + (k_rad[k] - k_orb[k]) * t1sq[k] + kp * ko;
    if (n >= 3) ks = std::min(ks, k_orb[k] + ko * ko);
    r.minSectional[k] = ks;
    const double rot = (kp - ko) * r.rho_s_over_rho[k];
    r.gradA2[k] = r.kappa_prof_s[k] * r.kappa_prof_s[k] + nm1 * r.kappa_orb_s[k] * r.kappa_orb_s[k] +
                  2.0 * nm1 * rot * rot;
  }
  r.H_s = surface_derivative(r, r.H);
  for (std::size_t k = 0; k < size; ++k) r.gradH2[k] = r.H_s[k] * r.H_s[k];

  r.Hmax = *std::max_element(r.H.begin(), r.H.end());
  r.Hmin = *std::min_element(r.H.begin(), r.H.end());
  r.maxA2 = *std::max_element(r.A2.begin(), r.A2.end());
  r.maxTraceless = *std::max_element(r.traceless.begin(), r.traceless.end());
  r.maxP = *std::max_element(r.P.begin(), r.P.end());
  r.max_f_sigma = *std::max_element(r.f_sigma.begin(), r.f_sigma.end());
  r.maxGradH2 = *std::max_element(r.gradH2.begin(), r.gradH2.end());
  r.minSectionalMin = *std::min_element(r.minSectional.begin(), r.minSectional.end());

  double area = 0.0;
  for (int k = 1; k < P; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    area += pow_int(r.rho[ku], n - 1) * r.speed[ku] * du;
  }
  r.area = area * unit_sphere_volume(n - 1);
  return r;
}

std::vector<double> surface_derivative(const ShapeReport& rep, const std::vector<double>& f) {
  const auto size = f.size();
  const int P = static_cast<int>(size) - 1;
  const double du = 1.0 / P;
  std::vector<double> out(size);
  for (int k = 0; k <= P; ++k)
    out[static_cast<std::size_t>(k)] = centered_d1(f, k, du, Parity::even()) / rep.speed[static_cast<std::size_t>(k)];
  return out;
}

namespace {

// f_ss and f_s at every node for a field even about both axis points.
void second_arclength(const ShapeReport& rep, const std::vector<double>& f, std::vector<double>& fs,
                      std::vector<double>& fss) {
  const auto size = f.size();
  const int P = static_cast<int>(size) - 1;
  const double du = 1.0 / P;
  fs.resize(size);
  fss.resize(size);
  for (int k = 0; k <= P; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double sig = rep.speed[ku];
    const double fu = centered_d1(f, k, du, Parity::even());
    const double fuu = centered_d2(f, k, du, Parity::even());
    const double sig_u = centered_d1(rep.speed, k, du, Parity::even());
    fs[ku] = fu / sig;
    fss[ku] = (fuu - fu * sig_u / sig) / (sig * sig);
  }
}

}  // namespace

std::vector<double> surface_laplacian(const ShapeReport& rep, const std::vector<double>& f) {
  std::vector<double> fs, fss;
  second_arclength(rep, f, fs, fss);
  const auto last = f.size() - 1;
  const double nm1 = rep.n - 1.0;
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    out[k] = (k == 0 || k == last) ? rep.n * fss[k] : fss[k] + nm1 * rep.rho_s_over_rho[k] * fs[k];
  return out;
}

std::vector<double> hessian_along_A(const ShapeReport& rep, const std::vector<double>& f) {
  std::vector<double> fs, fss;
  second_arclength(rep, f, fs, fss);
  const auto last = f.size() - 1;
  const double nm1 = rep.n - 1.0;
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double orbit = (k == 0 || k == last) ? fss[k] : rep.rho_s_over_rho[k] * fs[k];
    out[k] = rep.kappa_prof[k] * fss[k] + nm1 * rep.kappa_orb[k] * orbit;
  }
  return out;
}

namespace {

std::vector<double> segment_lengths(const ProfileCurve& curve, const AmbientMetric& metric) {
  const std::span<const double> b(metric.b);
  const std::span<const double> phi(metric.phi);
  std::vector<double> len(curve.x.size() - 1);
  for (std::size_t k = 0; k + 1 < curve.x.size(); ++k) {
    const double xm = 0.5 * (curve.x[k] + curve.x[k + 1]);
    const LagrangeWeights lw = lagrange_weights(metric.dx(), xm);
    const double bm = apply_weights(b, lw, Parity::even());
    const double pm = apply_weights(phi, lw, Parity::odd_zero());
    len[k] = std::hypot(bm * (curve.x[k + 1] - curve.x[k]), pm * (curve.alpha[k + 1] - curve.alpha[k]));
  }
  return len;
}

}  // namespace

double min_curve_spacing(const ProfileCurve& curve, const AmbientMetric& metric) {
  const auto len = segment_lengths(curve, metric);
  return *std::min_element(len.begin(), len.end());
}

double curve_dt_limit(const ProfileCurve& curve, const AmbientMetric& metric, double cfl_factor) {
  const double ds = min_curve_spacing(curve, metric);
  return cfl_factor * ds * ds;
}

double spacing_ratio(const ProfileCurve& curve, const AmbientMetric& metric) {
  const auto len = segment_lengths(curve, metric);
  const auto [lo, hi] = std::minmax_element(len.begin(), len.end());
  return *hi / *lo;
}

ProfileCurve mcf_step(const ProfileCurve& curve, const AmbientSampler& ambient, double dt, double cfl_factor,
                      double t, Exec exec) {
  const double limit = curve_dt_limit(curve, ambient.metric(), cfl_factor);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds CFL bound " << limit;
    throw StepRejected("hypersurface", t, msg.str());
  }
  ShapeReport rep;
  try {
    rep = shape(curve, ambient, PinchingParams::for_dimension(ambient.n()), exec);
  } catch (const DegenerateNode& e) {
    throw StepRejected("hypersurface", t, e.what());
  }
  return mcf_step(curve, rep, dt, t);
}

ProfileCurve mcf_step(const ProfileCurve& curve, const ShapeReport& rep, double dt, double t) {
  ProfileCurve out = curve;
  const std::size_t last = curve.x.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const double h = rep.H[k];
    out.x[k] -= dt * h * rep.N1[k] / rep.b[k];
    if (k != 0 && k != last) out.alpha[k] -= dt * h * rep.N2[k] / rep.phi[k];
  }
  out.alpha.front() = 0.0;
  out.alpha.back() = kPi;
  for (std::size_t k = 0; k <= last; ++k) {
    const bool inside = out.x[k] > 0.0 && out.x[k] < 1.0 &&
                        (k == 0 || k == last || (out.alpha[k] > 0.0 && out.alpha[k] < kPi));
    if (!inside)
      throw StepRejected("hypersurface", t, "orbit radius collapsed at node " + std::to_string(k));
  }
  return out;
}

namespace {

constexpr int kGhosts = 4;

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] > v[k - 1])) return false;
  return true;
}

}  // namespace

ProfileCurve resample(const ProfileCurve& curve, const AmbientMetric& metric) {
  curve.validate();
  const int P = curve.segments();
  if (P + 1 < kMinCurveNodes) throw InvalidArgument("resample needs at least 16 curve nodes");
  const auto len = segment_lengths(curve, metric);
  std::vector<double> s(curve.x.size(), 0.0);
  for (std::size_t k = 0; k < len.size(); ++k) s[k + 1] = s[k] + len[k];
  const double L = s.back();

  ProfileCurve out = curve;
  if (curve.topology == Topology::coordinate_sphere) {
    // x is constant; only alpha needs redistributing, and it is linear in s.
    for (int k = 1; k < P; ++k) out.alpha[static_cast<std::size_t>(k)] = kPi * k / P;
    return out;
  }

  // Mirror a few nodes past each axis point: x is even and alpha odd in s there.
  std::vector<double> se, xe, ae;
  for (int g = kGhosts; g >= 1; --g) {
    se.push_back(-s[static_cast<std::size_t>(g)]);
    xe.push_back(curve.x[static_cast<std::size_t>(g)]);
    ae.push_back(-curve.alpha[static_cast<std::size_t>(g)]);
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    se.push_back(s[k]);
    xe.push_back(curve.x[k]);
    ae.push_back(curve.alpha[k]);
  }
  for (int g = 1; g <= kGhosts; ++g) {
    const auto k = static_cast<std::size_t>(P - g);
    se.push_back(2.0 * L - s[k]);
    xe.push_back(curve.x[k]);
    ae.push_back(2.0 * kPi - curve.alpha[k]);
  }

  auto sample_with = [&](auto&& fx, auto&& fa) {
    for (int k = 1; k < P; ++k) {
      const double sk = L * k / P;
      out.x[static_cast<std::size_t>(k)] = fx(sk);
      out.alpha[static_cast<std::size_t>(k)] = fa(sk);
    }
    out.x.front() = fx(0.0);
    out.x.back() = fx(L);
  };

  {
    using boost::math::barycentric_rational;
    barycentric_rational<double> fx(se.data(), xe.data(), se.size(), 3);
    barycentric_rational<double> fa(se.data(), ae.data(), se.size(), 3);
    sample_with(fx, fa);
  }
  if (!strictly_increasing(out.alpha)) {
    using boost::math::interpolators::pchip;
    auto sx = se, sa = se;
    pchip<std::vector<double>> fx(std::move(sx), std::move(xe));
    pchip<std::vector<double>> fa(std::move(sa), std::move(ae));
    sample_with(fx, fa);
  }
  out.alpha.front() = 0.0;
  out.alpha.back() = kPi;
  out.validate();
  return out;
}

void write_curve(std::ostream& out, const ProfileCurve& curve) {
  curve.validate();
  const int P = curve.segments();
  out << P << ' ' << to_string(curve.topology) << ' ' << kCurveVersion << '\n';
  out << std::fixed << std::setprecision(20);
  for (int k = 0; k <= P; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out << static_cast<double>(k) / P << ' ' << curve.x[ku] << ' ' << curve.alpha[ku] << '\n';
  }
  out << std::defaultfloat;
}

ProfileCurve read_curve(std::istream& in) {
  int P = 0;
  std::string topo;
  int version = 0;
  if (!(in >> P >> topo >> version)) throw FormatError("curve header must be `P topology version`");
  if (version != kCurveVersion) throw FormatError("unsupported curve version " + std::to_string(version));
  if (P < 2) throw FormatError("curve must have at least 2 segments");
  ProfileCurve c;
  c.topology = topology_from_string(topo);
  c.x.resize(static_cast<std::size_t>(P) + 1);
  c.alpha.resize(c.x.size());
  for (int k = 0; k <= P; ++k) {
    double u = 0.0;
    if (!(in >> u >> c.x[static_cast<std::size_t>(k)] >> c.alpha[static_cast<std::size_t>(k)]))
      throw FormatError("curve line " + std::to_string(k + 2) + " must be `u x alpha`");
  }
  // The text carries 20 decimals; snap the axis endpoints back onto the axis.
  if (std::abs(c.alpha.front()) > 1e-15 || std::abs(c.alpha.back() - kPi) > 1e-15)
    throw FormatError("curve endpoints are not on the axis");
  c.alpha.front() = 0.0;
  c.alpha.back() = kPi;
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid curve: ") + e.what());
  }
  return c;
}

}  // namespace rmcf
