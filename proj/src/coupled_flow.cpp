#include "rmcf/coupled_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "rmcf/ambient_sampler.hpp"
#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/stencil.hpp"

namespace rmcf {

double coupled_dt_limit(const FlowState& state, const CoupledOptions& options) {
  double dt = curve_dt_limit(state.curve, state.metric, options.cfl_factor);
  if (!options.freeze_ambient) dt = std::min(dt, ambient_dt_limit(state.metric, options.cfl_factor));
  return dt;
}

namespace {

// With a frozen ambient, `frozen` and `rep` (optional) are the curvature of the
// fixed metric and the shape of the current curve in it; they are reused.
FlowState step_with(const FlowState& state, double dt, const CoupledOptions& options, const AmbientCurvature* frozen,
                    const ShapeReport* rep) {
  FlowState next = state;
  if (options.freeze_ambient && frozen != nullptr && rep != nullptr) {
    const double limit = curve_dt_limit(state.curve, state.metric, options.cfl_factor);
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
      throw StepRejected("hypersurface", state.t, "dt exceeds the CFL bound");
    next.curve = mcf_step(state.curve, *rep, dt, state.t);
  } else {
    if (!options.freeze_ambient)
      next.metric = nrf_step(state.metric, dt, options.cfl_factor, state.t, options.exec);
    const AmbientSampler ambient(next.metric, curvature(next.metric, options.exec));
    next.curve = mcf_step(state.curve, ambient, dt, options.cfl_factor, state.t, options.exec);
  }
  next.t = state.t + dt;
  ++next.step;
  if (options.regauge) next = regauge_arclength(next);
  if (options.resample_ratio > 0.0 && spacing_ratio(next.curve, next.metric) > options.resample_ratio) {
    next.curve = resample(next.curve, next.metric);
    ++next.resamples;
  }
  return next;
}

}  // namespace

FlowState coupled_step(const FlowState& state, double dt, const CoupledOptions& options) {
  return step_with(state, dt, options, nullptr, nullptr);
}

namespace {

// Three-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 3> kGaussNodes{0.1127016653792583, 0.5, 0.8872983346207417};
constexpr std::array<double, 3> kGaussWeights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

class ArclengthMap {
 public:
  explicit ArclengthMap(const AmbientMetric& m) : m_(m), cum_(m.b.size(), 0.0) {
    for (int j = 0; j < m.cells(); ++j)
      cum_[static_cast<std::size_t>(j) + 1] = cum_[static_cast<std::size_t>(j)] + partial(j, m.dx());
  }

  double length() const { return cum_.back(); }
  double b(double x) const { return lagrange_sample(m_.b, m_.dx(), x, Parity::even()); }

  double s(double x) const {
    const int j = std::clamp(static_cast<int>(std::floor(x / m_.dx())), 0, m_.cells() - 1);
    return cum_[static_cast<std::size_t>(j)] + partial(j, x - m_.x(j));
  }

  // Inverse by safeguarded Newton inside the bracketing cell.
  double x_of_s(double target) const {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    const int j = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, m_.cells() - 1);
    double lo = m_.x(j);
    double hi = m_.x(j + 1);
    double x = lo + (target - cum_[static_cast<std::size_t>(j)]) / b(lo);
    for (int it2 = 0; it2 < 50; ++it2) {
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      const double f = s(x) - target;
      if (f > 0.0) hi = x; else lo = x;
      const double step = f / b(x);
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return std::clamp(x, 0.0, 1.0);
  }

 private:
  double partial(int j, double width) const {
    double acc = 0.0;
    for (std::size_t g = 0; g < 3; ++g) acc += kGaussWeights[g] * b(m_.x(j) + kGaussNodes[g] * width);
    return acc * width;
  }

  const AmbientMetric& m_;
  std::vector<double> cum_;
};

}  // namespace

FlowState regauge_arclength(const FlowState& state) {
  const AmbientMetric& m = state.metric;
  const ArclengthMap map(m);
  const double L = map.length();
  FlowState out = state;
  const int cells = m.cells();
  out.metric.b.assign(m.b.size(), L);
  for (int j = 1; j < cells; ++j) {
    const double x = map.x_of_s(L * j / cells);
    out.metric.phi[static_cast<std::size_t>(j)] = lagrange_sample(m.phi, m.dx(), x, Parity::odd_zero());
  }
  out.metric.phi.front() = 0.0;
  out.metric.phi.back() = 0.0;
  for (auto& x : out.curve.x) x = map.s(x) / L;
  out.metric.validate();
  out.curve.validate();
  return out;
}

CoupledMonitor coupled_monitor(double t, const ShapeReport& rep, const AmbientCurvature& curv) {
  CoupledMonitor mon;
  mon.t = t;
  mon.Hmax = rep.Hmax;
  mon.Hmin = rep.Hmin;
  mon.maxA2 = rep.maxA2;
  mon.maxTraceless = rep.maxTraceless;
  mon.maxP = rep.maxP;
  mon.maxFsigma = rep.max_f_sigma;
  mon.maxGradH2 = rep.maxGradH2;
  mon.minSectional = rep.minSectionalMin;
  mon.maxE_ambient = std::sqrt(*std::max_element(curv.E2.begin(), curv.E2.end()));
  mon.rbar = curv.rbar;
  return mon;
}

void write_coupled_csv(std::ostream& out, std::span<const CoupledMonitor> rows) {
  CsvWriter w(out, {"t", "Hmax", "Hmin", "maxA2", "maxTraceless", "maxP", "maxFsigma", "maxGradH2", "minSectional",
                    "maxE_ambient", "rbar"});
  for (const auto& r : rows)
    w.row({r.t, r.Hmax, r.Hmin, r.maxA2, r.maxTraceless, r.maxP, r.maxFsigma, r.maxGradH2, r.minSectional,
           r.maxE_ambient, r.rbar});
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::ShrinkToRoundPoint: return "ShrinkToRoundPoint";
    case Outcome::TotallyGeodesicLimit: return "TotallyGeodesicLimit";
    case Outcome::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Horizon: return "horizon";
    case StopReason::BlowUp: return "blowup";
    case StopReason::StepLimit: return "step_limit";
  }
  return "horizon";
}

Outcome classify_outcome(std::span<const CoupledMonitor> series, int n, const ClassifyThresholds& th) {
  if (series.empty()) return Outcome::Undetermined;
  const CoupledMonitor& last = series.back();
  if (last.Hmax >= th.blowup_H) {
    const double roundness = n * last.maxTraceless / (last.Hmax * last.Hmax);
    return roundness <= th.roundness ? Outcome::ShrinkToRoundPoint : Outcome::Undetermined;
  }
  const double t0 = series.front().t;
  const double span = last.t - t0;
  if (span < th.min_geodesic_time) return Outcome::Undetermined;
  const double from = last.t - th.sustain_fraction * span;
  for (const auto& s : series) {
    if (s.t < from) continue;
    const double h = std::max(std::abs(s.Hmax), std::abs(s.Hmin));
    if (h > th.geodesic || std::sqrt(s.maxA2) > th.geodesic) return Outcome::Undetermined;
  }
  return Outcome::TotallyGeodesicLimit;
}

CoupledSeries run_coupled(const FlowState& initial, const CoupledRunConfig& config, CoupledSink* sink) {
  if (config.stride < 1) throw InvalidArgument("stride must be >= 1");
  if (!(config.dt_safety > 0.0 && config.dt_safety <= 1.0)) throw InvalidArgument("dt_safety must lie in (0,1]");

  CoupledSeries series;
  FlowState state = initial;
  const int n = state.metric.n;
  const auto delta0 = default_delta0_grid();

  AmbientCurvature curv = curvature(state.metric, config.options.exec);
  ShapeReport rep = shape(state.curve, AmbientSampler(state.metric, curv), config.pinching, config.options.exec);

  auto record = [&]() {
    CoupledMonitor mon = coupled_monitor(state.t, rep, curv);
    series.ambient.push_back(ambient_monitor(state.t, state.metric, curv, delta0));
    if (sink != nullptr) sink->on_sample(mon, series.ambient.back(), state);
    series.monitors.push_back(mon);
  };
  record();
  series.rbar_per_step.push_back(curv.rbar);
  series.maxP_per_step.push_back(rep.maxP);

  const double t_end = config.horizon;
  if (!(t_end > initial.t)) throw InvalidArgument("horizon must lie after the initial time");
  series.stop = StopReason::Horizon;
  while (state.t < t_end * (1.0 - 1e-14)) {
    if (rep.Hmax >= config.thresholds.blowup_H) {
      series.stop = StopReason::BlowUp;
      break;
    }
    if (state.step - initial.step >= config.max_steps) {
      series.stop = StopReason::StepLimit;
      break;
    }
    const double dt = std::min(config.dt_safety * coupled_dt_limit(state, config.options), t_end - state.t);
    const bool reuse = config.options.freeze_ambient && !config.options.regauge;
    state = step_with(state, dt, config.options, reuse ? &curv : nullptr, reuse ? &rep : nullptr);
    if (!config.options.freeze_ambient || config.options.regauge) curv = curvature(state.metric, config.options.exec);
    series.rbar_per_step.push_back(curv.rbar);
    rep = shape(state.curve, AmbientSampler(state.metric, curv), config.pinching, config.options.exec);
    series.maxP_per_step.push_back(rep.maxP);
    const bool done = state.t >= t_end * (1.0 - 1e-14) || rep.Hmax >= config.thresholds.blowup_H;
    if (state.step % config.stride == 0 || done) record();
  }
  if (series.stop == StopReason::Horizon && rep.Hmax >= config.thresholds.blowup_H) series.stop = StopReason::BlowUp;
  series.final_state = std::move(state);
  series.outcome = classify_outcome(series.monitors, n, config.thresholds);
  return series;
}

}  // namespace rmcf
