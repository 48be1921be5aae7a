#include "rmcf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/warped_geometry.hpp"

namespace rmcf {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct BadValue {
  std::string what;
};

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) throw BadValue{"expected a number, got '" + v + "'"};
  return out;
}

long to_long(const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw BadValue{"expected an integer, got '" + v + "'"};
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw BadValue{"expected true or false, got '" + v + "'"};
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw BadValue{"empty list entry in '" + v + "'"};
    out.push_back(item);
  }
  if (out.empty()) throw BadValue{"empty list"};
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

// One config key: its section, how to set it from text, how to print it, and
// (for numeric keys) how to set it from a double.
struct KeySpec {
  const char* name;
  const char* section;
  std::function<void(FlowConfig&, const std::string&)> set;
  std::function<std::string(const FlowConfig&)> get;
  std::function<void(FlowConfig&, double)> set_number;  // empty for non-numeric keys
};

template <class T>
KeySpec real_key(const char* name, const char* section, T FlowConfig::*field) {
  return {name, section, [field](FlowConfig& c, const std::string& v) { c.*field = to_double(v); },
          [field](const FlowConfig& c) { return format_number(c.*field); },
          [field](FlowConfig& c, double v) { c.*field = v; }};
}

template <class T>
KeySpec int_key(const char* name, const char* section, T FlowConfig::*field) {
  return {name, section,
          [field](FlowConfig& c, const std::string& v) {
            const long l = to_long(v);
            if (l < 0 && std::is_unsigned_v<T>) throw BadValue{"must be non-negative"};
            c.*field = static_cast<T>(l);
          },
          [field](const FlowConfig& c) { return std::to_string(c.*field); },
          [field](FlowConfig& c, double v) {
            if (v != std::floor(v)) throw BadValue{"must be an integer"};
            c.*field = static_cast<T>(v);
          }};
}

KeySpec bool_key(const char* name, const char* section, bool FlowConfig::*field) {
  return {name, section, [field](FlowConfig& c, const std::string& v) { c.*field = to_bool(v); },
          [field](const FlowConfig& c) { return bool_text(c.*field); }, {}};
}

KeySpec threshold_key(const char* name, double ClassifyThresholds::*field) {
  return {name, "thresholds", [field](FlowConfig& c, const std::string& v) { c.thresholds.*field = to_double(v); },
          [field](const FlowConfig& c) { return format_number(c.thresholds.*field); },
          [field](FlowConfig& c, double v) { c.thresholds.*field = v; }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back({"scenario", "run", [](FlowConfig& c, const std::string& v) { c.scenario = v; },
                 [](const FlowConfig& c) { return c.scenario; }, {}});
    t.push_back(int_key("n", "run", &FlowConfig::n));
    t.push_back(real_key("horizon", "run", &FlowConfig::horizon));
    t.push_back(int_key("stride", "run", &FlowConfig::stride));
    t.push_back(bool_key("require_outcome", "run", &FlowConfig::require_outcome));
    t.push_back(int_key("checkpoint_every", "run", &FlowConfig::checkpoint_every));
    t.push_back(int_key("M", "ambient", &FlowConfig::M));
    t.push_back(real_key("eps0", "ambient", &FlowConfig::eps0));
    t.push_back(real_key("amplitude", "ambient", &FlowConfig::amplitude));
    t.push_back(real_key("b_amplitude", "ambient", &FlowConfig::b_amplitude));
    t.push_back(int_key("seed", "ambient", &FlowConfig::seed));
    t.push_back(bool_key("freeze_ambient", "ambient", &FlowConfig::freeze_ambient));
    t.push_back(bool_key("regauge", "ambient", &FlowConfig::regauge));
    t.push_back(int_key("P", "curve", &FlowConfig::P));
    t.push_back(real_key("rho0", "curve", &FlowConfig::rho0));
    t.push_back(real_key("curve_eps", "curve", &FlowConfig::curve_eps));
    t.push_back(int_key("curve_mode", "curve", &FlowConfig::curve_mode));
    t.push_back(real_key("sigma", "curve", &FlowConfig::sigma));
    t.push_back(real_key("resample_ratio", "curve", &FlowConfig::resample_ratio));
    t.push_back(real_key("cfl_factor", "flow", &FlowConfig::cfl_factor));
    t.push_back(real_key("dt_safety", "flow", &FlowConfig::dt_safety));
    t.push_back(threshold_key("blowup_H", &ClassifyThresholds::blowup_H));
    t.push_back(threshold_key("roundness", &ClassifyThresholds::roundness));
    t.push_back(threshold_key("geodesic", &ClassifyThresholds::geodesic));
    t.push_back(threshold_key("sustain_fraction", &ClassifyThresholds::sustain_fraction));
    t.push_back(threshold_key("min_geodesic_time", &ClassifyThresholds::min_geodesic_time));
    t.push_back({"resolutions", "verify",
                 [](FlowConfig& c, const std::string& v) {
                   c.verify_resolutions.clear();
                   for (const auto& item : split_list(v)) c.verify_resolutions.push_back(static_cast<int>(to_long(item)));
                 },
                 [](const FlowConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.verify_resolutions.size(); ++i)
                     s += (i ? ", " : "") + std::to_string(c.verify_resolutions[i]);
                   return s;
                 },
                 {}});
    t.push_back(real_key("verify_time", "verify", &FlowConfig::verify_time));
    return t;
  }();
  return table;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (name == k.name) return &k;
  return nullptr;
}

const std::vector<std::string> kSections{"run", "ambient", "curve", "flow", "thresholds", "verify", "sweep"};

// Defaults that depend on the scenario or on n, applied to keys not given.
void apply_dependent_defaults(FlowConfig& c, const std::vector<std::string>& given) {
  auto unset = [&](const char* key) { return std::find(given.begin(), given.end(), key) == given.end(); };
  if (unset("eps0")) c.eps0 = max_admissible_eps0(c.n);
  if (c.scenario == "geodesic_sphere_shrink") {
    if (unset("freeze_ambient")) c.freeze_ambient = true;
    if (unset("stride")) c.stride = 200;
  } else if (c.scenario == "near_equator_converge") {
    if (unset("horizon")) c.horizon = 3.0;
  } else if (c.scenario == "pinched_convergence") {
    if (unset("amplitude")) c.amplitude = 5e-4;
    if (unset("horizon")) c.horizon = 2.0;
  } else if (c.scenario == "dichotomy_sweep") {
    if (unset("horizon")) c.horizon = 3.0;
    if (unset("M")) c.M = 100;
    if (unset("P")) c.P = 100;
    if (unset("stride")) c.stride = 100;
    if (c.axes.empty()) c.axes = default_dichotomy_axes();
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw BadValue{what};
}

}  // namespace

std::vector<SweepAxis> default_dichotomy_axes() {
  using std::numbers::pi;
  return {{"rho0", {pi / 6.0, pi / 3.0, 5.0 * pi / 12.0, pi / 2.0}}, {"amplitude", {0.0, 2.5e-4, 5e-4}}};
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"round_fixed_point", "geodesic_sphere_shrink", "near_equator_converge",
                                              "pinched_convergence", "dichotomy_sweep"};
  return names;
}

namespace {

// Throws BadValue naming the offending key.
void check_ranges(const FlowConfig& c, std::string& key) {
  const auto& names = scenario_names();
  key = "scenario";
  require(std::find(names.begin(), names.end(), c.scenario) != names.end(), "unknown scenario '" + c.scenario + "'");
  key = "n";
  require(c.n >= 2 && c.n <= 8, "n must lie in [2, 8]");
  key = "M";
  require(c.M >= kMinCells && c.M <= 100000, "M must lie in [16, 100000]");
  key = "P";
  require(c.P >= kMinCurveNodes && c.P <= 100000, "P must lie in [16, 100000]");
  key = "eps0";
  require(c.eps0 > 0.0 && c.eps0 <= max_admissible_eps0(c.n) * (1.0 + 1e-12),
          "eps0 must lie in (0, 1/(4(n+1))] = (0, " + format_number(max_admissible_eps0(c.n)) + "]");
  key = "amplitude";
  require(c.amplitude >= 0.0 && c.amplitude < 0.5, "amplitude must lie in [0, 0.5)");
  key = "b_amplitude";
  require(c.b_amplitude >= 0.0 && c.b_amplitude < 0.5, "b_amplitude must lie in [0, 0.5)");
  key = "rho0";
  require(c.rho0 > 0.0 && c.rho0 < std::numbers::pi, "rho0 must lie in (0, pi)");
  key = "curve_eps";
  require(c.curve_eps >= 0.0 && c.curve_eps < 0.25, "curve_eps must lie in [0, 0.25)");
  key = "curve_mode";
  require(c.curve_mode >= 0 && c.curve_mode <= 32, "curve_mode must lie in [0, 32]");
  key = "sigma";
  require(c.sigma > 0.0 && c.sigma < 1.0, "sigma must lie in (0, 1)");
  key = "horizon";
  require(c.horizon > 0.0 && c.horizon <= 1e4, "horizon must lie in (0, 1e4]");
  key = "cfl_factor";
  require(c.cfl_factor > 0.0 && c.cfl_factor <= 0.5, "cfl_factor must lie in (0, 0.5]");
  key = "dt_safety";
  require(c.dt_safety > 0.0 && c.dt_safety <= 1.0, "dt_safety must lie in (0, 1]");
  key = "stride";
  require(c.stride >= 1, "stride must be >= 1");
  key = "resample_ratio";
  require(c.resample_ratio == 0.0 || c.resample_ratio > 1.0, "resample_ratio must be 0 (off) or > 1");
  key = "checkpoint_every";
  require(c.checkpoint_every >= 0, "checkpoint_every must be >= 0");
  key = "blowup_H";
  require(c.thresholds.blowup_H > 0.0, "blowup_H must be positive");
  key = "roundness";
  require(c.thresholds.roundness > 0.0, "roundness must be positive");
  key = "geodesic";
  require(c.thresholds.geodesic > 0.0, "geodesic must be positive");
  key = "sustain_fraction";
  require(c.thresholds.sustain_fraction > 0.0 && c.thresholds.sustain_fraction <= 1.0,
          "sustain_fraction must lie in (0, 1]");
  key = "min_geodesic_time";
  require(c.thresholds.min_geodesic_time >= 0.0, "min_geodesic_time must be >= 0");
  key = "resolutions";
  require(c.verify_resolutions.size() >= 3, "at least three resolutions are required");
  for (std::size_t i = 0; i < c.verify_resolutions.size(); ++i) {
    require(c.verify_resolutions[i] >= kMinCells, "resolutions must be >= 16");
    if (i > 0) require(c.verify_resolutions[i] == 2 * c.verify_resolutions[i - 1], "each resolution must double the previous");
  }
  key = "verify_time";
  require(c.verify_time > 0.0 && c.verify_time < c.horizon, "verify_time must lie in (0, horizon)");
  key = "sweep";
  std::size_t cells = 1;
  for (const auto& a : c.axes) {
    require(!a.values.empty(), "sweep axis '" + a.key + "' has no values");
    cells *= a.values.size();
    require(cells <= static_cast<std::size_t>(kMaxSweepCells), "sweep exceeds 10000 cells");
  }
}

}  // namespace

void validate_config(const FlowConfig& config) {
  std::string key;
  try {
    check_ranges(config, key);
  } catch (const BadValue& e) {
    throw ConfigError(key + ": " + e.what, 0);
  }
}

void set_numeric(FlowConfig& config, const std::string& key, double value) {
  const KeySpec* k = find_key(key);
  if (k == nullptr) throw ConfigError("unknown key '" + key + "'", 0);
  if (!k->set_number) throw ConfigError("key '" + key + "' is not numeric", 0);
  try {
    k->set_number(config, value);
  } catch (const BadValue& e) {
    throw ConfigError(key + ": " + e.what, 0);
  }
}

FlowConfig parse_config(const std::string& text) {
  FlowConfig c;
  std::vector<std::string> given;
  std::vector<std::pair<std::string, int>> lines_of;  // key -> line, for range errors
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header at line " + std::to_string(line), line);
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
        throw ConfigError("unknown section '" + section + "' at line " + std::to_string(line), line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value' at line " + std::to_string(line), line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) throw ConfigError("unknown key '" + key + "' at line " + std::to_string(line), line);
    if (value.empty()) throw ConfigError("missing value for '" + key + "' at line " + std::to_string(line), line);
    try {
      if (section == "sweep") {
        if (!spec->set_number) throw BadValue{"'" + key + "' cannot be swept"};
        SweepAxis axis{key, {}};
        for (const auto& item : split_list(value)) axis.values.push_back(to_double(item));
        for (const auto& a : c.axes)
          if (a.key == key) throw BadValue{"duplicate sweep axis"};
        c.axes.push_back(std::move(axis));
        continue;
      }
      if (!section.empty() && section != spec->section)
        throw BadValue{"belongs to section [" + std::string(spec->section) + "], not [" + section + "]"};
      if (std::find(given.begin(), given.end(), key) != given.end()) throw BadValue{"given twice"};
      spec->set(c, value);
    } catch (const BadValue& e) {
      throw ConfigError(key + ": " + e.what + " at line " + std::to_string(line), line);
    }
    given.push_back(key);
    lines_of.emplace_back(key, line);
  }
  if (c.scenario.empty()) throw ConfigError("missing required key 'scenario'", 0);

  const bool axes_given = !c.axes.empty();
  apply_dependent_defaults(c, given);
  std::string bad_key;
  try {
    check_ranges(c, bad_key);
  } catch (const BadValue& e) {
    int at = 0;
    for (const auto& [k, l] : lines_of)
      if (k == bad_key) at = l;
    throw ConfigError(bad_key + ": " + e.what + (at ? " at line " + std::to_string(at) : std::string(" (default)")),
                      at);
  }
  for (const auto& k : key_table())
    if (std::find(given.begin(), given.end(), k.name) == given.end())
      c.defaults_applied.push_back(std::string(k.name) + " = " + k.get(c));
  if (c.scenario == "dichotomy_sweep" && !axes_given) {
    for (const auto& a : c.axes) {
      std::string v;
      for (std::size_t i = 0; i < a.values.size(); ++i) v += (i ? ", " : "") + format_number(a.values[i]);
      c.defaults_applied.push_back("[sweep] " + a.key + " = " + v);
    }
  }
  return c;
}

FlowConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const FlowConfig& config) {
  std::ostringstream out;
  for (const auto& k : key_table()) out << k.name << " = " << k.get(config) << '\n';
  if (!config.axes.empty()) {
    out << "[sweep]\n";
    for (const auto& a : config.axes) {
      out << a.key << " = ";
      for (std::size_t i = 0; i < a.values.size(); ++i) out << (i ? ", " : "") << format_number(a.values[i]);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace rmcf
