#include "rmcf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/frame_oracle.hpp"
#include "rmcf/frame_tensors.hpp"
#include "rmcf/ricci_flow.hpp"
#include "rmcf/stencil.hpp"

namespace rmcf {

namespace {

void resize_all(AdaptedContractions& c, std::size_t size) {
  for (auto* v : {&c.ric_h, &c.ric_hh, &c.ric00, &c.rm0i0j_h, &c.d0ric00, &c.d0rm0i0j_h, &c.rkikp_hh, &c.rkipj_hh,
                  &c.drm_0ijk_h, &c.dric_0j_h, &c.S2})
    v->assign(size, 0.0);
}

}  // namespace

ReactionTerms reaction_terms(const ProfileCurve& curve, const ShapeReport& rep, const AmbientSampler& ambient,
                             Exec exec) {
  const int n = ambient.n();
  const auto size = curve.x.size();
  if (rep.H.size() != size) throw InvalidArgument("shape report does not match the curve");
  const double rbar = ambient.rbar();

  ReactionTerms out;
  resize_all(out.c, size);
  out.u.assign(size, 0.0);
  out.v.assign(size, 0.0);
  out.P_contract.assign(size, 0.0);
  out.Z.assign(size, 0.0);
  AdaptedContractions& c = out.c;

  const bool par = exec == Exec::parallel;
#pragma omp parallel for if (par) schedule(static)
  for (long k = 0; k < static_cast<long>(size); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const AmbientPoint pt = ambient.at(curve.x[ku]);
    const FrameTensors ft(pt.point_curvature(n), {rep.N1[ku], rep.T1[ku]});
    // h is diagonal in this frame.
    std::vector<double> kap(static_cast<std::size_t>(n) + 1, rep.kappa_orb[ku]);
    kap[0] = 0.0;
    kap[1] = rep.kappa_prof[ku];
    auto h = [&](int i) { return kap[static_cast<std::size_t>(i)]; };

    double ric_h = 0, ric_hh = 0, rm0i0j_h = 0, d0rm = 0, rkikp = 0, rkipj = 0, drm0ijk = 0, dric0j = 0, s2 = 0;
    double pc = 0;
    for (int i = 1; i <= n; ++i) {
      ric_h += ft.ric(i, i) * h(i);
      ric_hh += ft.ric(i, i) * h(i) * h(i);
      rm0i0j_h += ft.rm(0, i, 0, i) * h(i);
      d0rm += ft.drm(0, 0, i, 0, i) * h(i);
      dric0j += ft.dric(i, 0, i) * h(i);
      s2 += ft.ric(0, i) * ft.ric(0, i);
      for (int kk = 1; kk <= n; ++kk) {
        rkikp += ft.rm(kk, i, kk, i) * h(i) * h(i);
        rkipj += ft.rm(kk, i, kk, i) * h(kk) * h(i);
        drm0ijk += ft.drm(kk, 0, i, i, kk) * h(i);
        // P_ij h_ij for diagonal h: 2 h_k h_i R_kiki - 2 h_i^2 R_ikik
        pc += 2.0 * h(kk) * h(i) * ft.rm(kk, i, kk, i) - 2.0 * h(i) * h(i) * ft.rm(i, kk, i, kk);
      }
    }
    c.ric_h[ku] = ric_h;
    c.ric_hh[ku] = ric_hh;
    c.ric00[ku] = ft.ric(0, 0);
    c.rm0i0j_h[ku] = rm0i0j_h;
    c.d0ric00[ku] = ft.dric(0, 0, 0);
    c.d0rm0i0j_h[ku] = d0rm;
    c.rkikp_hh[ku] = rkikp;
    c.rkipj_hh[ku] = rkipj;
    c.drm_0ijk_h[ku] = drm0ijk;
    c.dric_0j_h[ku] = dric0j;
    c.S2[ku] = s2;

    const double H = rep.H[ku];
    const double A2 = rep.A2[ku];
    out.P_contract[ku] = pc;
    out.u[ku] = 2.0 * ric_h - rbar * H / (n + 1) - ft.dric(0, 0, 0);
    out.v[ku] = 2.0 * pc + 4.0 * ric_hh - 2.0 * rbar * A2 / (n + 1) - 2.0 * d0rm;
    double trA3 = 0.0;
    for (int i = 1; i <= n; ++i) trA3 += h(i) * h(i) * h(i);
    out.Z[ku] = H * trA3 - A2 * A2;
  }
  return out;
}

double centered_time_derivative(double t0, double t1, double t2, double f0, double f1, double f2) {
  const double h1 = t1 - t0;
  const double h2 = t2 - t1;
  if (!(h1 > 0.0 && h2 > 0.0)) throw InvalidArgument("sample times must increase");
  return -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
}

std::vector<double> warped_laplacian(const AmbientMetric& metric, const AmbientCurvature& curv,
                                     const std::vector<double>& f) {
  const FittedStencil st(metric.dx(), std::numbers::pi);
  const int M = metric.cells();
  const int n = metric.n;
  std::vector<double> out(f.size());
  for (int j = 0; j <= M; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double b = metric.b[ju];
    const double fx = st.d1(f, j, Parity::even());
    const double fxx = st.d2(f, j, Parity::even());
    const double fss = (fxx - fx * curv.b_x[ju] / b) / (b * b);
    if (j == 0 || j == M)
      out[ju] = (n + 1) * fss;
    else
      out[ju] = fss + n * (curv.phi_s[ju] / metric.phi[ju]) * fx / b;
  }
  return out;
}

std::vector<double> residual_scalar_curvature(std::span<const AmbientMetric> snapshots, std::span<const double> times,
                                              std::size_t k, Exec exec) {
  if (snapshots.size() != times.size()) throw InvalidArgument("one time per snapshot is required");
  if (k == 0 || k + 1 >= snapshots.size()) throw InvalidArgument("residual needs a sample with neighbours on both sides");
  const auto& m = snapshots[k];
  for (std::size_t i = k - 1; i <= k + 1; ++i)
    if (snapshots[i].b.size() != m.b.size() || snapshots[i].n != m.n)
      throw InvalidArgument("snapshots are on different grids");

  const AmbientCurvature c0 = curvature(snapshots[k - 1], exec);
  const AmbientCurvature c1 = curvature(m, exec);
  const AmbientCurvature c2 = curvature(snapshots[k + 1], exec);
  const std::vector<double> lap = warped_laplacian(m, c1, c1.R);
  const int n = m.n;
  std::vector<double> res(m.b.size());
  for (std::size_t j = 0; j < res.size(); ++j) {
    const double dR = centered_time_derivative(times[k - 1], times[k], times[k + 1], c0.R[j], c1.R[j], c2.R[j]);
    const double rhs = lap[j] + 2.0 * c1.ric2[j] - 2.0 * c1.rbar * c1.R[j] / (n + 1);
    res[j] = std::abs(dR - rhs);
  }
  return res;
}

namespace {

struct WindowShapes {
  ShapeReport before, mid, after;
  AmbientSampler ambient;
};

WindowShapes window_shapes(std::span<const FlowState> states, std::size_t k, const PinchingParams& params, Exec exec) {
  if (k == 0 || k + 1 >= states.size()) throw InvalidArgument("residual needs a sample with neighbours on both sides");
  const auto& s = states[k];
  for (std::size_t i = k - 1; i <= k + 1; ++i) {
    if (states[i].resamples != s.resamples)
      throw InvalidArgument("residual window contains a resample; node labels are not matched");
    if (states[i].curve.x.size() != s.curve.x.size()) throw InvalidArgument("curves in the window differ in size");
  }
  AmbientSampler ambient(s.metric, curvature(s.metric, exec));
  return {shape(states[k - 1].curve, states[k - 1].metric, params, exec), shape(s.curve, ambient, params, exec),
          shape(states[k + 1].curve, states[k + 1].metric, params, exec), std::move(ambient)};
}

}  // namespace

std::vector<double> residual_H(std::span<const FlowState> states, std::size_t k, const PinchingParams& params,
                               Exec exec) {
  const WindowShapes w = window_shapes(states, k, params, exec);
  const ReactionTerms rt = reaction_terms(states[k].curve, w.mid, w.ambient, exec);
  const std::vector<double> lap = surface_laplacian(w.mid, w.mid.H);
  std::vector<double> res(lap.size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double dH = centered_time_derivative(states[k - 1].t, states[k].t, states[k + 1].t, w.before.H[i],
                                               w.mid.H[i], w.after.H[i]);
    res[i] = std::abs(dH - (lap[i] + w.mid.A2[i] * w.mid.H[i] + rt.u[i]));
  }
  return res;
}

std::vector<double> residual_A2(std::span<const FlowState> states, std::size_t k, const PinchingParams& params,
                                Exec exec) {
  const WindowShapes w = window_shapes(states, k, params, exec);
  const ReactionTerms rt = reaction_terms(states[k].curve, w.mid, w.ambient, exec);
  const std::vector<double> lap = surface_laplacian(w.mid, w.mid.A2);
  std::vector<double> res(lap.size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double dA = centered_time_derivative(states[k - 1].t, states[k].t, states[k + 1].t, w.before.A2[i],
                                               w.mid.A2[i], w.after.A2[i]);
    const double a2 = w.mid.A2[i];
    res[i] = std::abs(dA - (lap[i] - 2.0 * w.mid.gradA2[i] + 2.0 * a2 * a2 + rt.v[i]));
  }
  return res;
}

std::vector<double> residual_simons(const FlowState& state, const PinchingParams& params, Exec exec) {
  const AmbientSampler ambient(state.metric, curvature(state.metric, exec));
  const ShapeReport rep = shape(state.curve, ambient, params, exec);
  const ReactionTerms rt = reaction_terms(state.curve, rep, ambient, exec);
  const AdaptedContractions& c = rt.c;
  const std::vector<double> lap = surface_laplacian(rep, rep.A2);
  const std::vector<double> hess = hessian_along_A(rep, rep.H);
  std::vector<double> res(lap.size(), 0.0);
  for (std::size_t i = 1; i + 1 < res.size(); ++i) {
    const double rhs = 2.0 * hess[i] + 2.0 * rep.gradA2[i] + 2.0 * rt.Z[i] + 2.0 * rep.H[i] * c.rm0i0j_h[i] -
                       2.0 * c.ric00[i] * rep.A2[i] + 4.0 * c.rkikp_hh[i] - 4.0 * c.rkipj_hh[i] +
                       2.0 * c.drm_0ijk_h[i] + 2.0 * c.dric_0j_h[i];
    res[i] = std::abs(lap[i] - rhs);
  }
  return res;
}

std::vector<FlowState> coupled_window(const FlowState& state, int steps, double dt, CoupledOptions options) {
  if (steps < 0) throw InvalidArgument("window length must be non-negative");
  options.resample_ratio = 0.0;
  std::vector<FlowState> out{state};
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i < steps; ++i) out.push_back(coupled_step(out.back(), dt, options));
  return out;
}

std::vector<AmbientMetric> ambient_window(const AmbientMetric& metric, int steps, double dt,
                                          std::vector<double>& times, Exec exec) {
  if (steps < 0) throw InvalidArgument("window length must be non-negative");
  std::vector<AmbientMetric> out{metric};
  times.assign(1, 0.0);
  for (int i = 0; i < steps; ++i) {
    out.push_back(nrf_step(out.back(), dt, kDefaultCfl, times.back(), exec));
    times.push_back(times.back() + dt);
  }
  return out;
}

double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

ConvergenceResult convergence_order(std::span<const int> resolutions, std::span<const double> errors) {
  if (resolutions.size() < 3) throw InvalidArgument("convergence study needs at least three resolutions");
  if (resolutions.size() != errors.size()) throw InvalidArgument("one error per resolution is required");
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] != 2 * resolutions[i - 1]) throw InvalidArgument("each resolution must double the previous");

  ConvergenceResult r;
  r.resolutions.assign(resolutions.begin(), resolutions.end());
  r.errors.assign(errors.begin(), errors.end());
  r.converged = true;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i] < errors[i - 1]) || !(errors[i] > 0.0)) {
      r.converged = false;
      r.orders.push_back(0.0);
      continue;
    }
    r.orders.push_back(std::log2(errors[i - 1] / errors[i]));
  }
  r.order = r.converged ? r.orders.back() : 0.0;
  return r;
}

ConvergenceResult convergence_order(std::span<const int> resolutions, const std::function<double(int)>& max_error) {
  std::vector<double> errors;
  for (int m : resolutions) errors.push_back(max_error(m));
  return convergence_order(resolutions, errors);
}

OracleDeviation oracle_deviation(const AmbientMetric& metric, Exec exec) {
  const AmbientCurvature c = curvature(metric, exec);
  const int M = metric.cells();
  const int lo = std::max((M + 3) / 4, kOracleHalfWidth);
  const int hi = std::min(3 * M / 4, M - kOracleHalfWidth);
  if (lo > hi) throw InvalidArgument("grid too coarse for the oracle comparison");
  OracleDeviation d;
  for (int j = lo; j <= hi; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const OracleTensors o = frame_oracle(metric, j);
    const FrameTensors ft({metric.n, c.K_rad[ju], c.K_orb[ju], c.dK_rad[ju], c.dK_orb[ju], c.phi_s[ju] / metric.phi[ju]},
                          {1.0, 0.0});
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int e = 0; e < 3; ++e)
          for (int f = 0; f < 3; ++f) {
            d.rm = std::max(d.rm, std::abs(ft.rm(a, b, e, f) - o.component(a, b, e, f)));
            for (int g = 0; g < 3; ++g)
              d.drm = std::max(d.drm, std::abs(ft.drm(g, a, b, e, f) - o.derivative(g, a, b, e, f)));
          }
    for (double diff : {c.K_rad[ju] - o.K_rad, c.K_orb[ju] - o.K_orb, c.R[ju] - o.R, c.rm2[ju] - o.rm2,
                        c.ric2[ju] - o.ric2, c.gradRm2[ju] - o.gradRm2})
      d.scalars = std::max(d.scalars, std::abs(diff));
  }
  return d;
}

double kato_eta(int n) { return n == 2 ? 1.0 / 32.0 : 1.0 / (8.0 * (n + 2)); }

double kato_lower_bound(int n, double eta, double gradH2, double S2) {
  const double np2 = n + 2.0;
  return (3.0 / np2 - eta) * gradH2 - (2.0 / np2) * (2.0 / (np2 * eta) - n / (n - 1.0)) * S2;
}

InequalityReport inequality_report(const FlowState& state, const PinchingParams& params, double eps0, Exec exec) {
  const int n = state.metric.n;
  const AmbientSampler ambient(state.metric, curvature(state.metric, exec));
  const ShapeReport rep = shape(state.curve, ambient, params, exec);
  const ReactionTerms rt = reaction_terms(state.curve, rep, ambient, exec);
  const double eta = kato_eta(n);

  InequalityReport r;
  r.kato_slack = std::numeric_limits<double>::infinity();
  r.gauss_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.H.size(); ++i) {
    r.kato_slack = std::min(r.kato_slack, rep.gradA2[i] - kato_lower_bound(n, eta, rep.gradH2[i], rt.c.S2[i]));
    const double bound = (rep.H[i] * rep.H[i] + 1.0) / (8.0 * n * n);
    r.gauss_slack = std::min(r.gauss_slack, rep.minSectional[i] - bound);
  }
  r.rbar = ambient.rbar();
  const double nn = n * (n + 1.0);
  r.rbar_in_band = r.rbar >= nn * (1.0 - eps0) && r.rbar <= nn * (1.0 + eps0);
  r.maxP = rep.maxP;
  return r;
}

namespace {

std::string order_text(double order) {
  if (std::isnan(order)) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << order;
  return s.str();
}

}  // namespace

void write_verify_table(std::ostream& out, std::span<const VerifyRow> rows) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.check.size());
  out << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(14) << "maxResidual"
      << std::setw(8) << "order" << "pass\n";
  for (const auto& r : rows) {
    std::ostringstream res;
    res << std::scientific << std::setprecision(3) << r.max_residual;
    out << std::left << std::setw(static_cast<int>(width)) << r.check << "  " << std::setw(14) << res.str()
        << std::setw(8) << order_text(r.order) << (r.pass ? "yes" : "NO") << '\n';
  }
}

void write_verify_csv(std::ostream& out, std::span<const VerifyRow> rows) {
  out << "check,maxResidual,order,pass\n";
  for (const auto& r : rows)
    out << r.check << ',' << format_number(r.max_residual) << ',' << (std::isnan(r.order) ? "" : format_number(r.order))
        << ',' << (r.pass ? 1 : 0) << '\n';
}

}  // namespace rmcf
