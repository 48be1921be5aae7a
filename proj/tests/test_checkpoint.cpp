#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "doctest.h"
#include "rmcf/checkpoint.hpp"
#include "rmcf/error.hpp"
#include "rmcf/scenario.hpp"

using namespace rmcf;

namespace {

Checkpoint sample_checkpoint() {
  ProfileShape sh;
  sh.amplitude = 0.01;
  sh.phi_modes = {0.3, 0.5, 1.0};
  Checkpoint cp;
  cp.state.metric = build_perturbed(2, 32, sh);
  cp.state.curve = graph_curve([](double a) { return 0.4 + 0.03 * std::cos(a); }, 32);
  cp.state.curve.orientation = -1;
  cp.state.t = 0.1 / 3.0;
  cp.state.step = 1234;
  cp.state.resamples = 2;
  CoupledMonitor m;
  m.t = 1.0 / 7.0;
  m.Hmax = std::sqrt(2.0);
  m.minSectional = -1e-300;
  cp.tail = {m, m};
  return cp;
}

std::string save(const Checkpoint& cp) {
  std::ostringstream out;
  save_checkpoint(out, cp);
  return out.str();
}

class Capture : public CoupledSink {
 public:
  explicit Capture(double t) : at_(t) {}
  void on_sample(const CoupledMonitor& m, const AmbientMonitor&, const FlowState& s) override {
    tail.push_back(m);
    if (!state && s.t >= at_) state = s;
  }
  std::vector<CoupledMonitor> tail;
  std::optional<FlowState> state;

 private:
  double at_;
};

}  // namespace

TEST_CASE("checkpoint round trip is exact and byte-stable") {
  const auto cp = sample_checkpoint();
  const std::string text = save(cp);
  CHECK(text.rfind("rmcf-checkpoint 1\n", 0) == 0);
  std::istringstream in(text);
  const auto back = load_checkpoint(in);
  CHECK(back.state.metric.b == cp.state.metric.b);
  CHECK(back.state.metric.phi == cp.state.metric.phi);
  CHECK(back.state.curve.x == cp.state.curve.x);
  CHECK(back.state.curve.alpha == cp.state.curve.alpha);
  CHECK(back.state.curve.orientation == -1);
  CHECK(back.state.t == cp.state.t);
  CHECK(back.state.step == 1234);
  CHECK(back.state.resamples == 2);
  REQUIRE(back.tail.size() == 2);
  CHECK(back.tail[1].Hmax == cp.tail[1].Hmax);
  CHECK(back.tail[1].minSectional == -1e-300);
  CHECK(save(back) == text);
}

TEST_CASE("exact_number") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-308, 6.02214076e23, 0.0}) CHECK(std::stod(exact_number(v)) == v);
}

TEST_CASE("foreign, mismatched and truncated checkpoints are rejected") {
  const std::string text = save(sample_checkpoint());
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return load_checkpoint(in);
  };
  CHECK_THROWS_AS(load("hello 1\n"), FormatError);
  CHECK_THROWS_AS(load("rmcf-checkpoint 2" + text.substr(text.find('\n'))), FormatError);
  CHECK_THROWS_AS(load(text.substr(0, text.size() / 2)), FormatError);
  CHECK_THROWS_AS(load(text.substr(0, text.rfind("end"))), FormatError);
  std::string garbled = text;
  garbled.replace(garbled.find("metric"), 6, "metrik");
  CHECK_THROWS_AS(load(garbled), FormatError);
  CHECK_THROWS_AS(load_checkpoint_file("/nonexistent/checkpoint.txt"), Error);
}

TEST_CASE("resuming from a mid-run checkpoint reproduces the uninterrupted run") {
  auto config = parse_config("scenario = geodesic_sphere_shrink\nM = 48\nP = 48\nstride = 20\n");
  RunOptions opt;
  opt.exec = Exec::serial;
  opt.plots = false;
  const auto full = run_scenario(config, opt);
  REQUIRE(full.stop == StopReason::BlowUp);

  // Capture a state near the middle of the run and send it through the text form.
  Capture cap(0.5 * full.extinction_time);
  run_coupled(initial_state(config), run_config(config, Exec::serial), &cap);
  REQUIRE(cap.state);
  const std::string text = save(Checkpoint{*cap.state, {}});
  std::istringstream in(text);
  opt.resume = load_checkpoint(in);
  const auto resumed = run_scenario(config, opt);

  CHECK(resumed.stop == StopReason::BlowUp);
  CHECK(resumed.outcome == full.outcome);
  CHECK(std::abs(resumed.extinction_time - full.extinction_time) <= 1e-12);
  CHECK(resumed.series.final_state.step == full.series.final_state.step);
  CHECK(resumed.series.final_state.curve.x == full.series.final_state.curve.x);
}
