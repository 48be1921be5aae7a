#include "rmcf/ricci_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/stencil.hpp"

namespace rmcf {

NrfRates nrf_rhs(const AmbientMetric& metric, const AmbientCurvature& curv) {
  const auto size = metric.b.size();
  NrfRates r;
  r.rbar = curv.rbar;
  r.db.resize(size);
  r.dphi.resize(size);
  const double shift = curv.rbar / (metric.n + 1.0);
  for (std::size_t j = 0; j < size; ++j) {
    r.db[j] = metric.b[j] * (shift - curv.ric_rad[j]);
    r.dphi[j] = metric.phi[j] * (shift - curv.ric_orb[j]);
  }
  r.dphi.front() = 0.0;
  r.dphi.back() = 0.0;
  return r;
}

NrfRates nrf_rhs(const AmbientMetric& metric, Exec exec) { return nrf_rhs(metric, curvature(metric, exec)); }

double min_arclength_spacing(const AmbientMetric& metric) {
  double ds = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < metric.b.size(); ++j)
    ds = std::min(ds, 0.5 * (metric.b[j] + metric.b[j + 1]) * metric.dx());
  return ds;
}

double ambient_dt_limit(const AmbientMetric& metric, double cfl_factor) {
  const double ds = min_arclength_spacing(metric);
  return cfl_factor * ds * ds;
}

namespace {

AmbientMetric axpy(const AmbientMetric& base, double h, const NrfRates& k) {
  AmbientMetric out = base;
  for (std::size_t j = 0; j < out.b.size(); ++j) {
    out.b[j] += h * k.db[j];
    out.phi[j] += h * k.dphi[j];
  }
  out.phi.front() = 0.0;
  out.phi.back() = 0.0;
  return out;
}

NrfRates stage(const AmbientMetric& m, double t, Exec exec) {
  try {
    return nrf_rhs(m, exec);
  } catch (const InvalidArgument& e) {
    throw StepRejected("ambient", t, e.what());
  } catch (const PoleSingularity& e) {
    throw StepRejected("ambient", t, e.what());
  }
}

}  // namespace

AmbientMetric nrf_step(const AmbientMetric& metric, double dt, double cfl_factor, double t, Exec exec) {
  const double limit = ambient_dt_limit(metric, cfl_factor);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw StepRejected("ambient", t, "dt = " + std::to_string(dt) + " exceeds CFL bound " + std::to_string(limit));

  const NrfRates k1 = stage(metric, t, exec);
  const NrfRates k2 = stage(axpy(metric, 0.5 * dt, k1), t, exec);
  const NrfRates k3 = stage(axpy(metric, 0.5 * dt, k2), t, exec);
  const NrfRates k4 = stage(axpy(metric, dt, k3), t, exec);

  AmbientMetric out = metric;
  for (std::size_t j = 0; j < out.b.size(); ++j) {
    out.b[j] += dt / 6.0 * (k1.db[j] + 2.0 * k2.db[j] + 2.0 * k3.db[j] + k4.db[j]);
    out.phi[j] += dt / 6.0 * (k1.dphi[j] + 2.0 * k2.dphi[j] + 2.0 * k3.dphi[j] + k4.dphi[j]);
  }
  out.phi.front() = 0.0;
  out.phi.back() = 0.0;

  const int m = out.cells();
  for (int j = 1; j < m; ++j)
    if (!(out.phi[static_cast<std::size_t>(j)] > 0.0))
      throw StepRejected("ambient", t + dt, "phi became non-positive at node " + std::to_string(j));
  for (int j = 0; j <= m; ++j)
    if (!(out.b[static_cast<std::size_t>(j)] > 0.0))
      throw StepRejected("ambient", t + dt, "b became non-positive at node " + std::to_string(j));
  const FittedStencil st(out.dx(), std::numbers::pi);
  for (int pole : {0, m}) {
    const double slope = st.d1_wide(out.phi, pole, Parity::odd_zero()) / out.b[static_cast<std::size_t>(pole)];
    const double target = pole == 0 ? 1.0 : -1.0;
    if (std::abs(slope - target) > kPoleSlopeTolerance)
      throw StepRejected("ambient", t + dt, "pole slope drifted to " + std::to_string(slope));
  }
  return out;
}

std::vector<double> default_delta0_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

AmbientMonitor ambient_monitor(double t, const AmbientMetric& metric, const AmbientCurvature& curv,
                               std::span<const double> delta0_grid) {
  AmbientMonitor mon;
  mon.t = t;
  mon.rbar = curv.rbar;
  const int n = metric.n;
  const double nn1 = n * (n + 1.0);
  double e2 = 0.0;
  double g2 = 0.0;
  double excess = -std::numeric_limits<double>::infinity();
  mon.maxR = -std::numeric_limits<double>::infinity();
  mon.C0_candidates.assign(delta0_grid.size(), 0.0);
  for (std::size_t j = 0; j < curv.R.size(); ++j) {
    e2 = std::max(e2, curv.E2[j]);
    g2 = std::max(g2, curv.gradRm2[j]);
    const double R = curv.R[j];
    mon.maxR = std::max(mon.maxR, R);
    excess = std::max(excess, curv.rm0_2[j] - R * R / (4.0 * nn1 * nn1));
    if (R > 0.0)
      for (std::size_t k = 0; k < delta0_grid.size(); ++k)
        mon.C0_candidates[k] = std::max(mon.C0_candidates[k], curv.rm0_2[j] * std::pow(R, delta0_grid[k] - 2.0));
  }
  mon.maxE = std::sqrt(e2);
  mon.maxGradRm = std::sqrt(g2);
  mon.traceless_excess = excess;
  const VolumeDiameter vd = volume_and_diameter(metric);
  mon.volume = vd.volume;
  mon.diameter = vd.diameter;
  return mon;
}

AmbientFlowSeries run_nrf(const AmbientMetric& initial, const NrfRunConfig& config, AmbientSink* sink) {
  if (!(config.horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (config.stride < 1) throw InvalidArgument("stride must be >= 1");

  AmbientFlowSeries series;
  series.outside_hypothesis = !pinching_check(initial, config.eps0).holds;

  AmbientMetric metric = initial;
  double t = 0.0;
  long step = 0;
  AmbientCurvature curv = curvature(metric, config.exec);
  series.rbar_per_step.push_back(curv.rbar);

  auto record = [&]() {
    AmbientMonitor mon = ambient_monitor(t, metric, curv, config.delta0_grid);
    series.times.push_back(t);
    if (config.keep_snapshots) series.snapshots.push_back(metric);
    if (sink != nullptr) sink->on_sample(mon);
    series.monitors.push_back(std::move(mon));
  };
  record();

  while (t < config.horizon * (1.0 - 1e-14)) {
    const double dt = std::min(ambient_dt_limit(metric, config.cfl_factor), config.horizon - t);
    metric = nrf_step(metric, dt, config.cfl_factor, t, config.exec);
    t += dt;
    ++step;
    curv = curvature(metric, config.exec);
    series.rbar_per_step.push_back(curv.rbar);
    const bool done = t >= config.horizon * (1.0 - 1e-14);
    double maxE = 0.0;
    if (config.maxE_floor > 0.0) maxE = std::sqrt(*std::max_element(curv.E2.begin(), curv.E2.end()));
    const bool floor_hit = config.maxE_floor > 0.0 && maxE < config.maxE_floor;
    if (step % config.stride == 0 || done || floor_hit) record();
    if (floor_hit) break;
  }
  series.final_metric = std::move(metric);
  series.final_time = t;
  return series;
}

DecayFit decay_fit(std::span<const double> t, std::span<const double> q, double t0, double t1) {
  if (t.size() != q.size()) throw InvalidArgument("decay_fit: time and quantity lengths differ");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    if (!(q[i] > 0.0)) throw InvalidArgument("decay_fit: window contains a non-positive sample");
    xs.push_back(t[i]);
    ys.push_back(std::log(q[i]));
  }
  if (xs.size() < 10) throw InvalidArgument("decay_fit: fewer than 10 samples in window");

  const double count = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("decay_fit: all samples at the same time");
  const double slope = sxy / sxx;
  DecayFit fit;
  fit.lambda_hat = -slope;
  const double ss_res = syy - slope * sxy;
  fit.r2 = syy <= 1e-300 ? 1.0 : 1.0 - std::max(ss_res, 0.0) / syy;
  return fit;
}

void write_ambient_csv(std::ostream& out, std::span<const AmbientMonitor> rows) {
  CsvWriter csv(out, {"t", "rbar", "maxE", "maxGradRm", "V", "diam"});
  for (const auto& r : rows) csv.row({r.t, r.rbar, r.maxE, r.maxGradRm, r.volume, r.diameter});
}

}  // namespace rmcf
