#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rmcf/exec.hpp"
#include "rmcf/warped_geometry.hpp"

namespace rmcf {

/// Time derivatives of (b, phi) under the normalized Ricci flow
///   dg/dt = -2 Ric + (2 rbar/(n+1)) g
/// in the fixed coordinate x:
///   db/dt   = b   (rbar/(n+1) - ric_rad)  = n (phi_ss/phi) b + rbar b/(n+1)
///   dphi/dt = phi (rbar/(n+1) - ric_orb)  = phi_ss - (n-1)(1-phi_s^2)/phi + rbar phi/(n+1)
struct NrfRates {
  std::vector<double> db;
  std::vector<double> dphi;
  double rbar = 0.0;
};

NrfRates nrf_rhs(const AmbientMetric& metric, Exec exec = Exec::parallel);
NrfRates nrf_rhs(const AmbientMetric& metric, const AmbientCurvature& curv);

inline constexpr double kDefaultCfl = 0.2;

/// Smallest grid spacing in arclength.
double min_arclength_spacing(const AmbientMetric& metric);

/// Largest dt accepted by nrf_step: cfl_factor * (min arclength spacing)^2.
double ambient_dt_limit(const AmbientMetric& metric, double cfl_factor = kDefaultCfl);

/// One classical RK4 step; rbar is recomputed at every stage. Throws
/// StepRejected("ambient", t, ...) when dt violates the CFL bound, phi
/// becomes non-positive inside, or a pole slope leaves 1 +- kPoleSlopeTolerance.
AmbientMetric nrf_step(const AmbientMetric& metric, double dt, double cfl_factor = kDefaultCfl,
                       double t = 0.0, Exec exec = Exec::parallel);

/// Default grid of delta_0 values for the C0 candidates: 0.1, 0.2, ..., 0.9.
std::vector<double> default_delta0_grid();

struct AmbientMonitor {
  double t = 0.0;
  double rbar = 0.0;
  double maxE = 0.0;       // sup |E|
  double maxGradRm = 0.0;  // sup |nabla Rm|
  double volume = 0.0;
  double diameter = 0.0;
  double maxR = 0.0;
  /// sup (|Rm|^2 - 2R^2/(n(n+1))) - R^2/(4 n^2 (n+1)^2); <= 0 on pinched metrics.
  double traceless_excess = 0.0;
  std::vector<double> C0_candidates;  // sup |Rm_0|^2 R^(delta0-2), one per delta0
};

AmbientMonitor ambient_monitor(double t, const AmbientMetric& metric, const AmbientCurvature& curv,
                               std::span<const double> delta0_grid);

/// Receives monitor records as they are produced.
class AmbientSink {
 public:
  virtual ~AmbientSink() = default;
  virtual void on_sample(const AmbientMonitor& sample) = 0;
};

struct NrfRunConfig {
  double horizon = 1.0;
  double cfl_factor = kDefaultCfl;
  int stride = 100;          // steps between monitor samples
  double eps0 = 1.0 / 12.0;  // pinching level checked at t = 0
  double maxE_floor = 0.0;   // stop once sup |E| drops below this (0: never)
  std::vector<double> delta0_grid = default_delta0_grid();
  bool keep_snapshots = false;
  Exec exec = Exec::parallel;
};

struct AmbientFlowSeries {
  std::vector<double> times;
  std::vector<AmbientMonitor> monitors;
  std::vector<AmbientMetric> snapshots;  // filled only with keep_snapshots
  std::vector<double> rbar_per_step;     // rbar after every accepted step (t = 0 first)
  bool outside_hypothesis = false;       // initial metric failed pinching_check
  AmbientMetric final_metric;
  double final_time = 0.0;
};

/// Integrates to the horizon (or until sup |E| < maxE_floor). Monitors are
/// taken at t = 0, every `stride` steps and at the final time. Step
/// rejections propagate as StepRejected carrying the failing time.
AmbientFlowSeries run_nrf(const AmbientMetric& initial, const NrfRunConfig& config, AmbientSink* sink = nullptr);

struct DecayFit {
  double lambda_hat = 0.0;  // -slope of log q against t
  double r2 = 1.0;
};

/// Least-squares fit of log q(t) on the samples with t0 <= t <= t1. Needs at
/// least 10 samples in the window, all positive.
DecayFit decay_fit(std::span<const double> t, std::span<const double> q, double t0, double t1);

/// Monitor CSV: `t,rbar,maxE,maxGradRm,V,diam`, 15 significant digits.
void write_ambient_csv(std::ostream& out, std::span<const AmbientMonitor> rows);

}  // namespace rmcf
