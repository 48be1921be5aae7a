#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rmcf/exec.hpp"
#include "rmcf/hypersurface.hpp"
#include "rmcf/ricci_flow.hpp"
#include "rmcf/warped_geometry.hpp"

namespace rmcf {

/// Ambient metric and hypersurface at one time; owned by a single run.
struct FlowState {
  AmbientMetric metric;
  ProfileCurve curve;
  double t = 0.0;
  long step = 0;
  long resamples = 0;  // incremented whenever resample() moved the nodes
};

struct CoupledOptions {
  double cfl_factor = kDefaultCfl;
  bool freeze_ambient = false;
  /// Re-map x -> s/L after every step (metric and curve through the same map).
  bool regauge = false;
  /// Resample the curve once max/min induced spacing exceeds this (0: never).
  double resample_ratio = 1.5;
  Exec exec = Exec::parallel;
};

/// Largest dt both sub-steps accept.
double coupled_dt_limit(const FlowState& state, const CoupledOptions& options);

/// Lie splitting: nrf_step on the metric, then mcf_step against the updated
/// metric, then the optional regauge and resample. Sub-step rejections
/// propagate as StepRejected tagged "ambient" or "hypersurface".
FlowState coupled_step(const FlowState& state, double dt, const CoupledOptions& options);

/// Pulls metric and curve back by the arclength map x -> s(x)/L, after which
/// b is constant. Geometry is unchanged up to interpolation error.
FlowState regauge_arclength(const FlowState& state);

struct CoupledMonitor {
  double t = 0.0;
  double Hmax = 0.0;
  double Hmin = 0.0;
  double maxA2 = 0.0;
  double maxTraceless = 0.0;
  double maxP = 0.0;
  double maxFsigma = 0.0;
  double maxGradH2 = 0.0;
  double minSectional = 0.0;
  double maxE_ambient = 0.0;
  double rbar = 0.0;
};

CoupledMonitor coupled_monitor(double t, const ShapeReport& rep, const AmbientCurvature& curv);

/// Coupled CSV: `t,Hmax,Hmin,maxA2,maxTraceless,maxP,maxFsigma,maxGradH2,minSectional,maxE_ambient,rbar`.
void write_coupled_csv(std::ostream& out, std::span<const CoupledMonitor> rows);

enum class Outcome { ShrinkToRoundPoint, TotallyGeodesicLimit, Undetermined };
std::string to_string(Outcome o);

struct ClassifyThresholds {
  double blowup_H = 50.0;
  double roundness = 0.05;        // n * traceless / H^2 at the final sample
  double geodesic = 0.02;         // max(|H|, |A|)
  double sustain_fraction = 0.2;  // final share of the run that must stay geodesic
  double min_geodesic_time = 0.5; // shorter runs cannot establish "stays there"
};

Outcome classify_outcome(std::span<const CoupledMonitor> series, int n, const ClassifyThresholds& thresholds = {});

struct CoupledRunConfig {
  double horizon = 1.0;  // absolute end time, so a resumed run stops where the original would
  int stride = 50;       // sample when the absolute step count is a multiple
  double dt_safety = 0.9;  // fraction of the CFL limit actually used
  CoupledOptions options;
  PinchingParams pinching = PinchingParams::for_dimension(2);
  ClassifyThresholds thresholds;
  long max_steps = 50'000'000;
};

enum class StopReason { Horizon, BlowUp, StepLimit };
std::string to_string(StopReason r);

struct CoupledSeries {
  std::vector<CoupledMonitor> monitors;
  std::vector<AmbientMonitor> ambient;  // same sample times
  std::vector<double> rbar_per_step;    // after every accepted step, initial state first
  std::vector<double> maxP_per_step;    // same
  FlowState final_state;
  StopReason stop = StopReason::Horizon;
  Outcome outcome = Outcome::Undetermined;
};

class CoupledSink {
 public:
  virtual ~CoupledSink() = default;
  virtual void on_sample(const CoupledMonitor& sample, const AmbientMonitor& ambient, const FlowState& state) = 0;
};

/// Steps with dt = dt_safety * coupled_dt_limit until t = horizon, or until
/// Hmax reaches the blow-up threshold (extinction is detected, never stepped
/// through). Samples at the initial state, every `stride` steps and at the end.
CoupledSeries run_coupled(const FlowState& initial, const CoupledRunConfig& config, CoupledSink* sink = nullptr);

}  // namespace rmcf
