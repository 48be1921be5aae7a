#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rmcf/checkpoint.hpp"
#include "rmcf/config.hpp"
#include "rmcf/coupled_flow.hpp"
#include "rmcf/verify.hpp"

namespace rmcf {

/// Ambient perturbation used by a config: amplitude on phi and b, with the
/// single mode cos(2 pi x) for seed 0 and otherwise even modes k <= 4 drawn
/// from mt19937_64(seed), normalized to unit sum of |c_k|.
ProfileShape perturbation_shape(const FlowConfig& config);

/// Initial metric and curve of a scenario:
///   round_fixed_point       round metric, equator x = 1/2
///   geodesic_sphere_shrink  coordinate sphere x = rho0/pi
///   dichotomy_sweep         same as geodesic_sphere_shrink
///   near_equator_converge   x = 1/2 + curve_eps cos(curve_mode alpha)
///   pinched_convergence     same curve
/// The metric is round when both amplitudes are 0.
FlowState initial_state(const FlowConfig& config);

CoupledRunConfig run_config(const FlowConfig& config, Exec exec);

struct RunOptions {
  std::string out_dir;  // empty: nothing is written
  std::string stem;     // file prefix; the scenario name when empty
  std::ostream* log = nullptr;
  bool plots = true;
  Exec exec = Exec::parallel;
  std::optional<Checkpoint> resume;
};

struct ScenarioResult {
  std::string scenario;
  bool aborted = false;
  std::string abort_reason;
  Outcome outcome = Outcome::Undetermined;
  StopReason stop = StopReason::Horizon;
  CoupledSeries series;  // monitors include the checkpoint tail on resumed runs
  std::vector<InequalityReport> inequalities;  // per monitor sample
  std::vector<double> radius_t;                // sample times of this run segment
  std::vector<double> radius;                  // pi * mean x at those times (coordinate spheres)
  double extinction_time = 0.0;                // t_last + n/(2 Hmax^2) after a blow-up, else NaN
  std::vector<VerifyRow> checks;
  std::vector<std::string> files;
};

/// Runs the coupled loop with the scenario's checks. Files (when out_dir is
/// set): <stem>_coupled.csv, <stem>_ambient.csv, <stem>_checks.csv,
/// <stem>_checks.txt, <stem>_summary.txt, <stem>_checkpoint.txt and one SVG per
/// monitor column. A StepRejected is caught: the partial series is written and
/// the result carries aborted = true. Other errors propagate.
ScenarioResult run_scenario(const FlowConfig& config, const RunOptions& options = {});

/// Checks applied to a finished run (also used by run_scenario).
std::vector<VerifyRow> scenario_checks(const FlowConfig& config, const ScenarioResult& result);

/// Fixed-point residuals plus refinement studies over config.verify_resolutions:
/// identity residuals evaluated at t = verify_time on a generic state (ambient
/// amplitude 0.01 with phi modes {0.3, 0.5, 1}, curve
/// x = 0.45 + 0.05 cos(alpha) + 0.03 cos(2 alpha)) and the frame-oracle
/// deviation on a perturbed profile. Requires n = 2 for the oracle rows.
std::vector<VerifyRow> verify_suite(const FlowConfig& config, Exec exec = Exec::parallel);

/// 0 success, 2 Undetermined while require_outcome is set, 3 aborted.
int exit_code(const FlowConfig& config, const ScenarioResult& result);

/// Pass thresholds shared with the acceptance checks.
inline constexpr double kFixedPointTolerance = 1e-10;
inline constexpr double kResidualTolerance = 1e-9;
inline constexpr double kMinOrder = 1.8;
inline constexpr double kMinOrderSimons = 1.5;
inline constexpr double kExtinctionTolerance = 0.01;
inline constexpr double kTrajectoryTolerance = 1e-3;
inline constexpr double kTrajectoryCutoff = 0.1;
inline constexpr double kPinchingSlack = 1e-3;
inline constexpr double kVolumeDriftTolerance = 1e-5;
inline constexpr double kRbarStepTolerance = 1e-8;
inline constexpr double kMinR2 = 0.99;

/// Ambient decay diagnostics on a monitor series: maxE is monotone after the
/// transient (first tenth of the run) and the final half fits log-linearly.
struct AmbientDecay {
  double worst_increase = 0.0;  // largest relative step-up of maxE after the transient
  DecayFit fit;
};
AmbientDecay ambient_decay(std::span<const AmbientMonitor> ambient);

/// Fitted rate of a monitor over its positive samples (NaN with fewer than 10).
DecayFit monitor_decay(std::span<const double> t, std::span<const double> q);

}  // namespace rmcf
