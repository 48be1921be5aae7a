#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "rmcf/config.hpp"
#include "rmcf/error.hpp"

using namespace rmcf;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool has_default(const FlowConfig& c, const std::string& entry) {
  for (const auto& d : c.defaults_applied)
    if (d == entry) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const auto c = parse_config("scenario = round_fixed_point\n");
  CHECK(c.n == 2);
  CHECK(c.M == 400);
  CHECK(c.P == 400);
  CHECK(c.eps0 == doctest::Approx(1.0 / 12.0));
  CHECK(c.rho0 == doctest::Approx(std::numbers::pi / 3));
  CHECK(c.verify_resolutions == std::vector<int>{100, 200, 400});
  CHECK(has_default(c, "M = 400"));
  CHECK_FALSE(has_default(c, "scenario = round_fixed_point"));
}

TEST_CASE("scenario-dependent defaults") {
  const auto g = parse_config("scenario = geodesic_sphere_shrink\n");
  CHECK(g.freeze_ambient);
  const auto p = parse_config("scenario = pinched_convergence\n");
  CHECK(p.amplitude == 5e-4);
  CHECK(p.horizon == 2.0);
  const auto e = parse_config("scenario = geodesic_sphere_shrink\nfreeze_ambient = false\n");
  CHECK_FALSE(e.freeze_ambient);
  // eps0 follows n unless given.
  CHECK(parse_config("scenario = round_fixed_point\nn = 3\n").eps0 == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("sections, comments and sweep axes") {
  const auto c = parse_config(
      "# comment\n"
      "scenario = dichotomy_sweep\n"
      "[ambient]\n"
      "M = 64   # trailing comment\n"
      "[curve]\n"
      "P = 64\n"
      "[sweep]\n"
      "rho0 = 0.5, 1.5\n"
      "amplitude = 0, 1e-4, 2e-4\n");
  CHECK(c.M == 64);
  CHECK(c.P == 64);
  REQUIRE(c.axes.size() == 2);
  CHECK(c.axes[0].key == "rho0");
  CHECK(c.axes[0].values == std::vector<double>{0.5, 1.5});
  CHECK(c.axes[1].values.size() == 3);
  for (const auto& d : c.defaults_applied) CHECK(d.rfind("[sweep]", 0) != 0);
}

TEST_CASE("dichotomy sweep falls back to the default grid and reports it") {
  const auto c = parse_config("scenario = dichotomy_sweep\n");
  REQUIRE(c.axes.size() == 2);
  CHECK(c.axes[0].values.size() == 4);
  CHECK(c.axes[1].values.size() == 3);
  int sweep_lines = 0;
  for (const auto& d : c.defaults_applied) sweep_lines += d.rfind("[sweep]", 0) == 0;
  CHECK(sweep_lines == 2);
}

TEST_CASE("errors carry the offending line") {
  CHECK(error_text("scenario = round_fixed_point\nbogus = 1\n") == "unknown key 'bogus' at line 2");
  CHECK(error_line("scenario = round_fixed_point\n\n[nope]\n") == 3);
  CHECK(error_line("scenario = round_fixed_point\nM = ten\n") == 2);
  CHECK(error_line("scenario = round_fixed_point\nM = 8\n") == 2);
  CHECK(error_line("scenario = round_fixed_point\nM\n") == 2);
  CHECK(error_line("scenario = round_fixed_point\n[curve]\nM = 64\n") == 3);
  CHECK(error_line("scenario = round_fixed_point\nM = 64\nM = 128\n") == 3);
  CHECK(error_line("scenario = nonsense\n") == 1);
  CHECK(error_line("M = 64\n") == 0);
  CHECK(error_line("scenario = round_fixed_point\n[sweep]\nscenario = a, b\n") == 3);
  // verify_time was not given, so the clash is reported against its default.
  CHECK(error_text("scenario = round_fixed_point\nhorizon = 0.001\n").rfind("verify_time", 0) == 0);
  CHECK(error_line("scenario = round_fixed_point\n[verify]\nresolutions = 100, 300, 400\n") == 3);
  CHECK_THROWS_AS(load_config("/nonexistent/file.conf"), ConfigError);
}

TEST_CASE("to_text round trips") {
  auto c = parse_config("scenario = near_equator_converge\nM = 128\ncurve_eps = 0.01\n[sweep]\ncurve_mode = 2, 4\n");
  const auto again = parse_config(to_text(c));
  CHECK(to_text(again) == to_text(c));
  CHECK(again.M == 128);
  CHECK(again.curve_eps == 0.01);
  CHECK(again.axes.size() == 1);
}

TEST_CASE("set_numeric") {
  auto c = parse_config("scenario = round_fixed_point\n");
  set_numeric(c, "rho0", 0.7);
  CHECK(c.rho0 == 0.7);
  set_numeric(c, "M", 64);
  CHECK(c.M == 64);
  CHECK_THROWS_AS(set_numeric(c, "M", 64.5), ConfigError);
  CHECK_THROWS_AS(set_numeric(c, "scenario", 1.0), ConfigError);
  CHECK_THROWS_AS(set_numeric(c, "bogus", 1.0), ConfigError);
  set_numeric(c, "rho0", 4.0);
  CHECK_THROWS_AS(validate_config(c), ConfigError);
}
