#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rmcf/error.hpp"
#include "rmcf/scenario.hpp"
#include "rmcf/sweep.hpp"

using namespace rmcf;
using std::numbers::pi;

namespace {

const VerifyRow* find_check(const std::vector<VerifyRow>& rows, const std::string& name) {
  for (const auto& r : rows)
    if (r.check == name) return &r;
  return nullptr;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

RunOptions serial_options(const std::string& dir = {}) {
  RunOptions opt;
  opt.exec = Exec::serial;
  opt.out_dir = dir;
  opt.plots = false;
  return opt;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("perturbation shape") {
  auto c = parse_config("scenario = pinched_convergence\n");
  const auto s0 = perturbation_shape(c);
  CHECK(s0.amplitude == 5e-4);
  CHECK(s0.phi_modes == std::vector<double>{0.0, 0.0, 1.0});
  c.seed = 7;
  const auto s7 = perturbation_shape(c);
  CHECK(s7.phi_modes == perturbation_shape(c).phi_modes);
  double l1 = 0.0;
  for (std::size_t k = 0; k < s7.phi_modes.size(); ++k) {
    l1 += std::abs(s7.phi_modes[k]);
    if (k % 2 == 1) CHECK(s7.phi_modes[k] == 0.0);
  }
  CHECK(l1 == doctest::Approx(1.0));
  CHECK(s7.phi_modes.size() <= 5);
}

TEST_CASE("initial states") {
  auto c = parse_config("scenario = geodesic_sphere_shrink\nM = 32\nP = 32\n");
  const auto g = initial_state(c);
  for (double x : g.curve.x) CHECK(x == doctest::Approx(1.0 / 3.0));
  c = parse_config("scenario = near_equator_converge\nM = 32\nP = 32\n");
  const auto ne = initial_state(c);
  CHECK(ne.curve.x.front() == doctest::Approx(0.52));
  CHECK(ne.metric.phi == build_round(2, 1.0, 32).phi);
}

TEST_CASE("small geodesic run passes its scenario checks and writes its files") {
  const auto dir = fresh_dir("rmcf_test_geodesic");
  auto c = parse_config("scenario = geodesic_sphere_shrink\nM = 64\nP = 64\n");
  auto opt = serial_options(dir.string());
  opt.plots = true;
  std::ostringstream log;
  opt.log = &log;
  const auto r = run_scenario(c, opt);
  CHECK_FALSE(r.aborted);
  CHECK(r.outcome == Outcome::ShrinkToRoundPoint);
  CHECK(r.extinction_time == doctest::Approx(std::log(2.0) / 2.0).epsilon(0.01).scale(0.0));
  // The 1e-3 trajectory bound is for the default resolution; at M = 64 the
  // error is a few 1e-3.
  for (const auto& row : r.checks)
    if (row.check != "trajectory_error") CHECK_MESSAGE(row.pass, row.check << " " << row.max_residual);
  REQUIRE(find_check(r.checks, "trajectory_error") != nullptr);
  CHECK(find_check(r.checks, "trajectory_error")->max_residual < 5e-3);
  CHECK(exit_code(c, r) == 0);
  CHECK(log.str().find("outcome") != std::string::npos);
  CHECK(first_line(dir / "geodesic_sphere_shrink_coupled.csv") ==
        "t,Hmax,Hmin,maxA2,maxTraceless,maxP,maxFsigma,maxGradH2,minSectional,maxE_ambient,rbar");
  CHECK(first_line(dir / "geodesic_sphere_shrink_ambient.csv") == "t,rbar,maxE,maxGradRm,V,diam");
  CHECK(first_line(dir / "geodesic_sphere_shrink_checks.csv") == "check,maxResidual,order,pass");
  CHECK(std::filesystem::exists(dir / "geodesic_sphere_shrink_checkpoint.txt"));
  CHECK(std::filesystem::exists(dir / "geodesic_sphere_shrink_summary.txt"));
  CHECK(std::filesystem::exists(dir / "geodesic_sphere_shrink_Hmax.svg"));
  for (const auto& f : r.files) CHECK(std::filesystem::exists(f));
  std::filesystem::remove_all(dir);
}

TEST_CASE("runs are deterministic down to the bytes") {
  auto c = parse_config("scenario = near_equator_converge\nM = 32\nP = 32\nhorizon = 0.3\n");
  const auto a = fresh_dir("rmcf_test_det_a");
  const auto b = fresh_dir("rmcf_test_det_b");
  run_scenario(c, serial_options(a.string()));
  auto opt = serial_options(b.string());
  opt.exec = Exec::parallel;
  run_scenario(c, opt);
  for (const char* f : {"near_equator_converge_coupled.csv", "near_equator_converge_ambient.csv",
                        "near_equator_converge_checkpoint.txt"})
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("aborted runs keep their partial output and exit with 3") {
  const auto dir = fresh_dir("rmcf_test_abort");
  // With dt_safety = 1 the curve step can exceed its bound once the ambient
  // sub-step has changed the metric under it.
  auto c = parse_config(
      "scenario = geodesic_sphere_shrink\nM = 32\nP = 32\namplitude = 0.05\nb_amplitude = 0.2\n"
      "freeze_ambient = false\ndt_safety = 1\nstride = 5\n");
  const auto r = run_scenario(c, serial_options(dir.string()));
  CHECK(r.aborted);
  CHECK(r.abort_reason.find("hypersurface") != std::string::npos);
  CHECK(exit_code(c, r) == 3);
  CHECK(r.outcome == Outcome::Undetermined);
  REQUIRE(r.series.monitors.size() > 2);
  CHECK(r.series.final_state.t > 0.0);
  std::ifstream csv(dir / "geodesic_sphere_shrink_coupled.csv");
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == static_cast<int>(r.series.monitors.size()));
  CHECK(slurp(dir / "geodesic_sphere_shrink_summary.txt").find("status aborted") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("require_outcome turns Undetermined into exit code 2") {
  auto c = parse_config("scenario = near_equator_converge\nM = 32\nP = 32\nhorizon = 0.2\nrequire_outcome = true\n");
  const auto r = run_scenario(c, serial_options());
  CHECK(r.outcome == Outcome::Undetermined);
  CHECK(exit_code(c, r) == 2);
  c.require_outcome = false;
  CHECK(exit_code(c, r) == 0);
}

TEST_CASE("round fixed point at low resolution") {
  auto c = parse_config("scenario = round_fixed_point\nM = 32\nP = 32\nhorizon = 0.6\n");
  const auto r = run_scenario(c, serial_options());
  CHECK(r.outcome == Outcome::TotallyGeodesicLimit);
  const auto* fp = find_check(r.checks, "fixed_point_monitors");
  REQUIRE(fp != nullptr);
  CHECK(fp->max_residual < 1e-10);
  REQUIRE(find_check(r.checks, "volume_drift") != nullptr);
  CHECK(find_check(r.checks, "volume_drift")->pass);
}

TEST_CASE("ambient_decay and monitor_decay") {
  std::vector<AmbientMonitor> am;
  for (int i = 0; i <= 100; ++i) {
    AmbientMonitor m;
    m.t = 0.02 * i;
    m.maxE = std::exp(-3.0 * m.t) * (i < 5 ? 2.0 : 1.0);  // a transient before the decay
    am.push_back(m);
  }
  const auto d = ambient_decay(am);
  CHECK(d.worst_increase <= 0.0);
  CHECK(d.fit.lambda_hat == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(d.fit.r2 == doctest::Approx(1.0));
  am[60].maxE *= 1.5;
  CHECK(ambient_decay(am).worst_increase > 0.0);

  std::vector<double> t, q;
  for (int i = 0; i < 20; ++i) {
    t.push_back(0.1 * i);
    q.push_back(2.0 * std::exp(-0.5 * t.back()));
  }
  CHECK(monitor_decay(t, q).lambda_hat == doctest::Approx(0.5).epsilon(1e-9));
  const std::vector<double> t5(t.begin(), t.begin() + 5), q5(q.begin(), q.begin() + 5);
  CHECK(std::isnan(monitor_decay(t5, q5).lambda_hat));
}

TEST_CASE("sweep without axes is a single cell") {
  auto c = parse_config("scenario = near_equator_converge\nM = 32\nP = 32\nhorizon = 0.2\n");
  const auto r = run_sweep(c, "", Exec::serial);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].status == "completed");
  CHECK(r.aborted() == 0);
}

TEST_CASE("dichotomy at low resolution: shrink below the equator, totally geodesic at it") {
  auto c = parse_config(
      "scenario = dichotomy_sweep\nM = 32\nP = 32\nhorizon = 1\n[sweep]\nrho0 = 1.0471975511965976, "
      "1.5707963267948966\n");
  const auto r = run_sweep(c, "", Exec::serial);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0].outcome == Outcome::ShrinkToRoundPoint);
  CHECK(r.cells[1].outcome == Outcome::TotallyGeodesicLimit);
  CHECK(monotone_boundary(r, "rho0"));
  CHECK_THROWS_AS(monotone_boundary(r, "amplitude"), InvalidArgument);
}

TEST_CASE("sweep isolates an invalid cell") {
  const auto dir = fresh_dir("rmcf_test_sweep");
  // (horizon 0.05, verify_time 0.08) is the only combination that fails validation.
  auto c = parse_config(
      "scenario = near_equator_converge\nM = 16\nP = 16\n[sweep]\nhorizon = 0.05, 0.1, 0.2\n"
      "verify_time = 0.001, 0.01, 0.08\n");
  const auto r = run_sweep(c, dir.string(), Exec::parallel);
  REQUIRE(r.cells.size() == 9);
  CHECK(r.aborted() == 1);
  int bad = -1;
  for (const auto& cell : r.cells)
    if (cell.status == "aborted") bad = cell.index;
  CHECK(bad == 2);
  CHECK(r.cells[2].reason.find("verify_time") != std::string::npos);
  CHECK_FALSE(monotone_boundary(SweepResult{{{"horizon", {}}, {"verify_time", {}}}, r.cells}, "horizon"));

  std::ostringstream csv;
  write_sweep_csv(csv, r);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "cell,horizon,verify_time,outcome,status,final_t,final_Hmax,final_maxA2,extinction_time,checks_failed");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 9);
  CHECK(std::filesystem::exists(dir / "cell_0"));

  // Same sweep serially: identical table.
  std::ostringstream again;
  write_sweep_csv(again, run_sweep(c, "", Exec::serial));
  CHECK(again.str() == csv.str());
  std::filesystem::remove_all(dir);
}
