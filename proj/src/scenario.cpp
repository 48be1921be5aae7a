#include "rmcf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/plot.hpp"

namespace rmcf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VerifyRow row(std::string check, double value, bool pass) { return {std::move(check), value, kNaN, pass}; }

bool is_frozen(const FlowConfig& c) { return c.freeze_ambient; }

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

// Collects per-sample diagnostics and periodic checkpoints.
class ScenarioSink : public CoupledSink {
 public:
  ScenarioSink(const FlowConfig& config, const PinchingParams& params, Exec exec, std::string checkpoint_path)
      : config_(config), params_(params), exec_(exec), checkpoint_path_(std::move(checkpoint_path)) {}

  void on_sample(const CoupledMonitor& sample, const AmbientMonitor& ambient, const FlowState& state) override {
    monitors.push_back(sample);
    ambient_monitors.push_back(ambient);
    inequalities.push_back(inequality_report(state, params_, config_.eps0, exec_));
    double mean_x = 0.0;
    for (double x : state.curve.x) mean_x += x;
    radius_t.push_back(state.t);
    radius.push_back(std::numbers::pi * mean_x / static_cast<double>(state.curve.x.size()));
    tail.push_back(sample);
    if (tail.size() > kCheckpointTail) tail.erase(tail.begin());
    ++samples_;
    if (!checkpoint_path_.empty() && config_.checkpoint_every > 0 && samples_ % config_.checkpoint_every == 0)
      save_checkpoint_file(checkpoint_path_, Checkpoint{state, tail});
    last_state = state;
  }

  std::vector<InequalityReport> inequalities;
  std::vector<double> radius_t;
  std::vector<double> radius;
  std::vector<CoupledMonitor> tail;
  // Kept so that an aborted run still reports what it sampled.
  std::vector<CoupledMonitor> monitors;
  std::vector<AmbientMonitor> ambient_monitors;
  FlowState last_state;

 private:
  const FlowConfig& config_;
  PinchingParams params_;
  Exec exec_;
  std::string checkpoint_path_;
  long samples_ = 0;
};

void log_line(const RunOptions& o, const std::string& s) {
  if (o.log != nullptr) *o.log << s << '\n';
}

double max_spread(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - v.front()));
  return worst;
}

}  // namespace

ProfileShape perturbation_shape(const FlowConfig& config) {
  ProfileShape shape;
  shape.amplitude = config.amplitude;
  shape.b_amplitude = config.b_amplitude;
  if (config.seed == 0) {
    shape.phi_modes = {0.0, 0.0, 1.0};
    shape.b_modes = {0.0, 0.0, 1.0};
    return shape;
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto draw = [&]() {
    std::vector<double> c(5, 0.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < c.size(); k += 2) {
      c[k] = coef(rng);
      sum += std::abs(c[k]);
    }
    for (double& v : c) v /= sum;
    return c;
  };
  shape.phi_modes = draw();
  shape.b_modes = draw();
  return shape;
}

FlowState initial_state(const FlowConfig& c) {
  FlowState s;
  s.metric = (c.amplitude == 0.0 && c.b_amplitude == 0.0) ? build_round(c.n, 1.0, c.M)
                                                            : build_perturbed(c.n, c.M, perturbation_shape(c));
  if (c.scenario == "round_fixed_point") {
    s.curve = coordinate_sphere(0.5, c.P);
  } else if (c.scenario == "geodesic_sphere_shrink" || c.scenario == "dichotomy_sweep") {
    s.curve = coordinate_sphere(round_coordinate_of_radius(c.rho0), c.P);
  } else if (c.scenario == "near_equator_converge" || c.scenario == "pinched_convergence") {
    const double eps = c.curve_eps;
    const double k = c.curve_mode;
    s.curve = graph_curve([eps, k](double a) { return 0.5 + eps * std::cos(k * a); }, c.P);
  } else {
    throw InvalidArgument("unknown scenario '" + c.scenario + "'");
  }
  return s;
}

CoupledRunConfig run_config(const FlowConfig& c, Exec exec) {
  CoupledRunConfig rc;
  rc.horizon = c.horizon;
  rc.stride = c.stride;
  rc.dt_safety = c.dt_safety;
  rc.options.cfl_factor = c.cfl_factor;
  rc.options.freeze_ambient = c.freeze_ambient;
  rc.options.regauge = c.regauge;
  rc.options.resample_ratio = c.resample_ratio;
  rc.options.exec = exec;
  rc.pinching = PinchingParams::for_dimension(c.n, c.sigma);
  rc.thresholds = c.thresholds;
  return rc;
}

DecayFit monitor_decay(std::span<const double> t, std::span<const double> q) {
  // The fit runs over the leading stretch of positive samples.
  std::size_t end = 0;
  while (end < q.size() && q[end] > 0.0) ++end;
  if (end < 10) return {kNaN, kNaN};
  return decay_fit(t.first(end), q.first(end), t.front(), t[end - 1]);
}

AmbientDecay ambient_decay(std::span<const AmbientMonitor> ambient) {
  AmbientDecay d;
  if (ambient.size() < 2) {
    d.fit = {kNaN, kNaN};
    return d;
  }
  const double t0 = ambient.front().t;
  const double t1 = ambient.back().t;
  const double transient = t0 + 0.1 * (t1 - t0);
  for (std::size_t i = 1; i < ambient.size(); ++i) {
    if (ambient[i - 1].t < transient) continue;
    const double prev = ambient[i - 1].maxE;
    if (prev > 0.0) d.worst_increase = std::max(d.worst_increase, (ambient[i].maxE - prev) / prev);
  }
  std::vector<double> t;
  std::vector<double> q;
  for (const auto& a : ambient) {
    t.push_back(a.t);
    q.push_back(a.maxE);
  }
  try {
    d.fit = decay_fit(t, q, 0.5 * (t0 + t1), t1);
  } catch (const InvalidArgument&) {
    d.fit = {kNaN, kNaN};
  }
  return d;
}

std::vector<VerifyRow> scenario_checks(const FlowConfig& c, const ScenarioResult& r) {
  std::vector<VerifyRow> rows;
  const auto& mons = r.series.monitors;
  const auto& amb = r.series.ambient;
  if (mons.empty()) return rows;

  auto classification = [&](Outcome want) {
    rows.push_back(row("classification_" + to_string(want), r.outcome == want ? 0.0 : 1.0, r.outcome == want));
  };

  if (c.scenario == "round_fixed_point") {
    std::vector<std::vector<double>> cols(10);
    for (const auto& m : mons) {
      const double v[] = {m.Hmax, m.Hmin, m.maxA2, m.maxTraceless, m.maxP,
                          m.maxFsigma, m.maxGradH2, m.minSectional, m.maxE_ambient, m.rbar};
      for (std::size_t k = 0; k < cols.size(); ++k) cols[k].push_back(v[k]);
    }
    std::vector<std::vector<double>> acols(4);
    for (const auto& a : amb) {
      const double v[] = {a.maxE, a.maxGradRm, a.volume, a.diameter};
      for (std::size_t k = 0; k < acols.size(); ++k) acols[k].push_back(v[k]);
    }
    double drift = 0.0;
    for (const auto& col : cols) drift = std::max(drift, max_spread(col));
    for (const auto& col : acols) drift = std::max(drift, max_spread(col));
    rows.push_back(row("fixed_point_monitors", drift, drift <= kFixedPointTolerance));
    classification(Outcome::TotallyGeodesicLimit);
  }

  if (c.scenario == "geodesic_sphere_shrink") {
    const double exact_T = std::log(1.0 / std::cos(c.rho0)) / c.n;
    const double rel = std::abs(r.extinction_time - exact_T) / exact_T;
    rows.push_back(row("extinction_time", rel, std::isfinite(rel) && rel <= kExtinctionTolerance));
    double err = 0.0;
    for (std::size_t i = 0; i < r.radius.size(); ++i) {
      if (r.radius[i] < kTrajectoryCutoff) break;
      const double cos_rho = std::cos(c.rho0) * std::exp(c.n * r.radius_t[i]);
      if (cos_rho >= 1.0) break;
      err = std::max(err, std::abs(r.radius[i] - std::acos(cos_rho)));
    }
    rows.push_back(row("trajectory_error", err, err < kTrajectoryTolerance));
    classification(Outcome::ShrinkToRoundPoint);
  }

  if (c.scenario == "near_equator_converge") classification(Outcome::TotallyGeodesicLimit);

  if (c.scenario == "pinched_convergence") {
    const auto& P = r.series.maxP_per_step;
    double rise = -std::numeric_limits<double>::infinity();
    for (double p : P) rise = std::max(rise, p - P.front());
    rows.push_back(row("pinching_preserved", rise, rise <= kPinchingSlack));

    std::vector<double> t, f, g;
    for (const auto& m : mons) {
      t.push_back(m.t);
      f.push_back(m.maxFsigma);
      g.push_back(m.maxGradH2);
    }
    const DecayFit ff = monitor_decay(t, f);
    rows.push_back(row("fsigma_decay_rate", ff.lambda_hat, ff.lambda_hat > 0.0));
    const DecayFit fg = monitor_decay(t, g);
    rows.push_back(row("gradH2_decay_rate", fg.lambda_hat, fg.lambda_hat > 0.0));
  }

  if (!is_frozen(c) && c.scenario != "round_fixed_point") {
    const AmbientDecay d = ambient_decay(amb);
    if (c.amplitude > 0.0 || c.b_amplitude > 0.0) {
      rows.push_back(row("ambient_monotone", d.worst_increase, d.worst_increase <= 0.0));
      rows.push_back(row("ambient_fit_r2", d.fit.r2, d.fit.r2 >= kMinR2));
      rows.push_back(row("ambient_rate", d.fit.lambda_hat, d.fit.lambda_hat > 0.0));
    }
  }

  if (!is_frozen(c)) {
    const double target = c.n * (c.n + 1.0);
    double band = 0.0;
    for (const auto& a : amb) band = std::max(band, std::abs(a.rbar - target) / target);
    rows.push_back(row("rbar_band", band, band <= c.eps0));

    double drift = 0.0;
    for (const auto& a : amb) drift = std::max(drift, std::abs(a.volume - amb.front().volume) / amb.front().volume);
    rows.push_back(row("volume_drift", drift, drift <= kVolumeDriftTolerance));

    const auto& rb = r.series.rbar_per_step;
    double drop = 0.0;
    for (std::size_t i = 1; i < rb.size(); ++i) drop = std::max(drop, rb[i - 1] - rb[i]);
    rows.push_back(row("rbar_step_decrease", drop, drop <= kRbarStepTolerance));
  }

  if (c.scenario == "pinched_convergence" || c.scenario == "near_equator_converge") {
    double kato = std::numeric_limits<double>::infinity();
    double gauss = std::numeric_limits<double>::infinity();
    for (const auto& q : r.inequalities) {
      kato = std::min(kato, q.kato_slack);
      gauss = std::min(gauss, q.gauss_slack);
    }
    rows.push_back(row("kato_slack", kato, kato >= -kResidualTolerance));
    rows.push_back(row("gauss_slack", gauss, gauss >= -kResidualTolerance));
  }
  return rows;
}

ScenarioResult run_scenario(const FlowConfig& config, const RunOptions& options) {
  validate_config(config);
  ScenarioResult result;
  result.scenario = config.scenario;
  const std::string stem = options.stem.empty() ? config.scenario : options.stem;
  const bool write = !options.out_dir.empty();
  if (write) std::filesystem::create_directories(options.out_dir);
  const std::string checkpoint_path = write ? path_in(options.out_dir, stem + "_checkpoint.txt") : std::string();

  for (const auto& d : config.defaults_applied) log_line(options, "default " + d);

  FlowState initial = options.resume ? options.resume->state : initial_state(config);
  const CoupledRunConfig rc = run_config(config, options.exec);
  ScenarioSink sink(config, rc.pinching, options.exec, checkpoint_path);
  if (options.resume) {
    log_line(options, "resuming at t=" + format_number(initial.t) + " step " + std::to_string(initial.step));
    for (const auto& m : options.resume->tail)
      if (m.t < initial.t) sink.tail.push_back(m);
  }

  try {
    result.series = run_coupled(initial, rc, &sink);
    result.stop = result.series.stop;
  } catch (const StepRejected& e) {
    result.aborted = true;
    result.abort_reason = e.what();
    result.series.monitors = sink.monitors;
    result.series.ambient = sink.ambient_monitors;
    result.series.final_state = sink.last_state;
    log_line(options, std::string("aborted: ") + e.what());
  }

  if (options.resume) {
    std::vector<CoupledMonitor> merged;
    for (const auto& m : options.resume->tail)
      if (m.t < initial.t) merged.push_back(m);
    merged.insert(merged.end(), result.series.monitors.begin(), result.series.monitors.end());
    result.series.monitors = std::move(merged);
  }
  result.inequalities = std::move(sink.inequalities);
  result.radius_t = std::move(sink.radius_t);
  result.radius = std::move(sink.radius);

  const auto& mons = result.series.monitors;
  result.extinction_time = kNaN;
  if (!mons.empty() && mons.back().Hmax >= config.thresholds.blowup_H) {
    const double H = mons.back().Hmax;
    result.extinction_time = mons.back().t + config.n / (2.0 * H * H);
  }
  result.outcome = result.aborted ? Outcome::Undetermined : classify_outcome(mons, config.n, config.thresholds);
  if (!result.aborted) result.checks = scenario_checks(config, result);

  if (write) {
    auto emit = [&](const std::string& name, const std::string& text) {
      const std::string p = path_in(options.out_dir, stem + name);
      write_text(p, text);
      result.files.push_back(p);
    };
    std::ostringstream coupled, ambient, checks_csv, checks_txt, summary;
    write_coupled_csv(coupled, result.series.monitors);
    emit("_coupled.csv", coupled.str());
    write_ambient_csv(ambient, result.series.ambient);
    emit("_ambient.csv", ambient.str());
    write_verify_csv(checks_csv, result.checks);
    emit("_checks.csv", checks_csv.str());
    write_verify_table(checks_txt, result.checks);
    emit("_checks.txt", checks_txt.str());

    summary << "scenario " << config.scenario << '\n'
            << "status " << (result.aborted ? "aborted" : "completed") << '\n'
            << "outcome " << to_string(result.outcome) << '\n'
            << "stop " << to_string(result.stop) << '\n'
            << "final_t " << format_number(mons.empty() ? initial.t : mons.back().t) << '\n'
            << "extinction_time " << format_number(result.extinction_time) << '\n';
    if (result.aborted) summary << "reason " << result.abort_reason << '\n';
    emit("_summary.txt", summary.str());

    if (!result.aborted) {
      save_checkpoint_file(checkpoint_path, Checkpoint{result.series.final_state, sink.tail});
      result.files.push_back(checkpoint_path);
    }
    if (options.plots && result.series.monitors.size() >= 2) {
      std::istringstream in(coupled.str());
      const CsvTable table = read_csv(in);
      std::vector<PlotSpec> specs;
      for (const auto& s : default_plot_specs(table))
        if (!s.log_scale || is_decay_quantity(s.column)) specs.push_back(s);
      for (auto& p : emit_plots(table, specs, options.out_dir, stem)) result.files.push_back(std::move(p));
    }
  }

  for (const auto& c : result.checks)
    log_line(options, "check " + c.check + " " + format_number(c.max_residual) + (c.pass ? " pass" : " FAIL"));
  log_line(options, "outcome " + to_string(result.outcome));
  return result;
}

int exit_code(const FlowConfig& config, const ScenarioResult& result) {
  if (result.aborted) return 3;
  if (config.require_outcome && result.outcome == Outcome::Undetermined) return 2;
  return 0;
}

namespace {

FlowState generic_state(int n, int M) {
  ProfileShape sh;
  sh.amplitude = 0.01;
  sh.phi_modes = {0.3, 0.5, 1.0};
  FlowState s;
  s.metric = build_perturbed(n, M, sh);
  s.curve = graph_curve([](double a) { return 0.45 + 0.05 * std::cos(a) + 0.03 * std::cos(2.0 * a); }, M);
  return s;
}

// Advances to t_target with resampling off and returns the window around it.
std::vector<FlowState> window_at(int n, int M, double t_target, Exec exec) {
  CoupledOptions opt;
  opt.resample_ratio = 0.0;
  opt.exec = exec;
  FlowState s = generic_state(n, M);
  const double dt = 0.5 * coupled_dt_limit(s, opt);
  while (s.t < t_target * (1.0 - 1e-14)) s = coupled_step(s, std::min(dt, t_target - s.t), opt);
  return coupled_window(s, 2, dt, opt);
}

VerifyRow order_row(const std::string& name, const ConvergenceResult& cr, double min_order) {
  VerifyRow r;
  r.check = name;
  r.max_residual = cr.errors.empty() ? kNaN : cr.errors.back();
  r.order = cr.converged ? cr.order : kNaN;
  r.pass = cr.converged && cr.order >= min_order;
  return r;
}

}  // namespace

std::vector<VerifyRow> verify_suite(const FlowConfig& config, Exec exec) {
  std::vector<VerifyRow> rows;
  const int n = config.n;
  const auto params = PinchingParams::for_dimension(n, config.sigma);

  // Fixed point: round metric with the equator.
  {
    FlowState s;
    s.metric = build_round(n, 1.0, config.M);
    s.curve = coordinate_sphere(0.5, config.P);
    CoupledOptions opt;
    opt.exec = exec;
    opt.resample_ratio = 0.0;
    const double dt = config.dt_safety * coupled_dt_limit(s, opt);
    auto w = coupled_window(s, 3, dt, opt);
    std::vector<double> times;
    auto amb = ambient_window(s.metric, 3, dt, times, exec);
    const double sc = max_abs(residual_scalar_curvature(amb, times, 1, exec));
    const double rh = max_abs(residual_H(w, 1, params, exec));
    const double ra = max_abs(residual_A2(w, 1, params, exec));
    const double rs = max_abs(residual_simons(w[1], params, exec));
    rows.push_back(row("fixed_point_scalar_curvature", sc, sc <= kResidualTolerance));
    rows.push_back(row("fixed_point_H", rh, rh <= kResidualTolerance));
    rows.push_back(row("fixed_point_A2", ra, ra <= kResidualTolerance));
    rows.push_back(row("fixed_point_simons", rs, rs <= kResidualTolerance));
  }

  const std::vector<int>& res = config.verify_resolutions;
  std::vector<double> e_sc, e_h, e_a, e_s;
  for (int M : res) {
    auto w = window_at(n, M, config.verify_time, exec);
    std::vector<double> times;
    auto amb = ambient_window(w[0].metric, 2, w[1].t - w[0].t, times, exec);
    e_sc.push_back(max_abs(residual_scalar_curvature(amb, times, 1, exec)));
    e_h.push_back(max_abs(residual_H(w, 1, params, exec)));
    e_a.push_back(max_abs(residual_A2(w, 1, params, exec)));
    e_s.push_back(max_abs(residual_simons(w[1], params, exec)));
  }
  rows.push_back(order_row("refine_scalar_curvature", convergence_order(res, e_sc), kMinOrder));
  rows.push_back(order_row("refine_H", convergence_order(res, e_h), kMinOrder));
  rows.push_back(order_row("refine_A2", convergence_order(res, e_a), kMinOrder));
  rows.push_back(order_row("refine_simons", convergence_order(res, e_s), kMinOrderSimons));

  if (n == 2) {
    const OracleDeviation round = oracle_deviation(build_round(2, 1.0, config.M), exec);
    rows.push_back(row("oracle_round", round.max(), round.max() <= kFixedPointTolerance));
    ProfileShape sh;
    sh.amplitude = 0.05;
    sh.phi_modes = {0.3, 0.5, -0.4, 0.2};
    sh.b_amplitude = 0.03;
    sh.b_modes = {0.1, 0.0, 0.7};
    std::vector<double> e_o;
    for (int M : res) e_o.push_back(oracle_deviation(build_perturbed(2, M, sh), exec).max());
    rows.push_back(order_row("oracle_perturbed", convergence_order(res, e_o), kMinOrder));
  }
  return rows;
}

}  // namespace rmcf
