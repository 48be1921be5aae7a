#pragma once

#include <string>
#include <vector>

#include "rmcf/coupled_flow.hpp"

namespace rmcf {

/// One sweep axis: a numeric config key and the values it takes.
struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

/// Every run parameter. Text form: `key = value` lines, `#` comments and
/// optional `[section]` headers (run, ambient, curve, flow, thresholds, verify,
/// sweep). Keys may appear before any header or under their own section;
/// inside [sweep] each line `key = v1, v2, ...` declares an axis instead.
struct FlowConfig {
  std::string scenario;  // required
  int n = 2;
  int M = 400;  // ambient cells
  int P = 400;  // curve segments
  double eps0 = 1.0 / 12.0;  // defaults to 1/(4(n+1))
  double amplitude = 0.0;    // ambient perturbation of phi
  double b_amplitude = 0.0;  // ambient perturbation of b
  unsigned seed = 0;         // 0: the single mode cos(2 pi x); otherwise random even modes
  double rho0 = 1.0471975511965976;  // initial geodesic radius, pi/3
  double curve_eps = 0.02;           // near-equator curve x = 1/2 + curve_eps cos(curve_mode alpha)
  int curve_mode = 3;
  double sigma = 0.1;
  double horizon = 1.0;  // end time
  double cfl_factor = kDefaultCfl;
  double dt_safety = 0.9;
  int stride = 50;
  bool freeze_ambient = false;
  bool regauge = false;
  double resample_ratio = 1.5;
  ClassifyThresholds thresholds;
  bool require_outcome = false;  // exit code 2 when the run ends Undetermined
  long checkpoint_every = 0;     // monitor samples between checkpoints (0: final only)
  std::vector<int> verify_resolutions{100, 200, 400};
  double verify_time = 0.01;  // window time for refinement studies
  std::vector<SweepAxis> axes;

  /// `key = value` for every key that was not given explicitly, in table order.
  std::vector<std::string> defaults_applied;
};

inline constexpr int kMaxSweepCells = 10000;

/// Parses and validates. Throws ConfigError carrying the offending line for
/// unknown keys or sections, malformed or out-of-range values and a missing
/// scenario (reported at line 0).
FlowConfig parse_config(const std::string& text);
FlowConfig load_config(const std::string& path);

/// Axes used by dichotomy_sweep when the config declares none: rho0 in
/// {pi/6, pi/3, 5pi/12, pi/2} times amplitude in {0, 2.5e-4, 5e-4}.
std::vector<SweepAxis> default_dichotomy_axes();

/// Scenario names known to the driver.
const std::vector<std::string>& scenario_names();

/// Sets one numeric key from a double; used by sweeps. Throws ConfigError for
/// unknown or non-numeric keys and range violations (line 0).
void set_numeric(FlowConfig& config, const std::string& key, double value);

/// Range checks on a fully populated config (throws ConfigError, line 0).
void validate_config(const FlowConfig& config);

/// Canonical text of a config (all keys), parseable by parse_config.
std::string to_text(const FlowConfig& config);

}  // namespace rmcf
