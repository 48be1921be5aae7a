#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rmcf/error.hpp"
#include "rmcf/verify.hpp"

using namespace rmcf;
using std::numbers::pi;

namespace {

const PinchingParams kParams = PinchingParams::for_dimension(2);

ProfileCurve wavy_curve(int P) {
  return graph_curve([](double a) { return 0.45 + 0.05 * std::cos(a) + 0.03 * std::cos(2.0 * a); }, P);
}

AmbientMetric bumpy_metric(int M) {
  ProfileShape sh;
  sh.amplitude = 0.02;
  sh.phi_modes = {0.3, 0.5, 1.0};
  sh.b_amplitude = 0.01;
  sh.b_modes = {0.2, 0.0, 0.7};
  return build_perturbed(2, M, sh);
}

}  // namespace

// In a space form of curvature K: Ric = nK g, so u = nKH,
// v = 4K H^2 - 2nK |A|^2 and P_ij h_ij = 2K(H^2 - n|A|^2).
TEST_CASE("reaction terms reduce to the space-form expressions") {
  for (double radius : {1.0, 2.0}) {
    const double K = 1.0 / (radius * radius);
    const auto m = build_round(2, radius, 100);
    const AmbientSampler amb(m);
    const auto c = wavy_curve(100);
    const auto rep = shape(c, amb, kParams);
    const auto rt = reaction_terms(c, rep, amb);
    for (std::size_t k = 0; k < c.x.size(); ++k) {
      const double H = rep.H[k], A2 = rep.A2[k];
      CHECK(rt.u[k] == doctest::Approx(2.0 * K * H).scale(1.0).epsilon(1e-9));
      CHECK(rt.v[k] == doctest::Approx(4.0 * K * H * H - 4.0 * K * A2).scale(1.0).epsilon(1e-9));
      CHECK(rt.P_contract[k] == doctest::Approx(2.0 * K * (H * H - 2.0 * A2)).scale(1.0).epsilon(1e-9));
      CHECK(rt.c.S2[k] < 1e-18);
      CHECK(std::abs(rt.c.d0ric00[k]) < 1e-7);
      CHECK(rt.c.ric00[k] == doctest::Approx(2.0 * K).epsilon(1e-9));
    }
  }
}

// For n = 2: H tr(A^3) - |A|^4 = k1 k2 (k1 - k2)^2.
TEST_CASE("Z term in principal curvatures") {
  const auto m = bumpy_metric(100);
  const AmbientSampler amb(m);
  const auto c = wavy_curve(100);
  const auto rep = shape(c, amb, kParams);
  const auto rt = reaction_terms(c, rep, amb);
  for (std::size_t k = 0; k < c.x.size(); ++k) {
    const double k1 = rep.kappa_prof[k], k2 = rep.kappa_orb[k];
    CHECK(rt.Z[k] == doctest::Approx(k1 * k2 * (k1 - k2) * (k1 - k2)).scale(1.0).epsilon(1e-12));
  }
}

// Ric is diagonal in (d_s, orbit) with Ric_rad = n K_rad and
// Ric_orb = K_rad + (n-1) K_orb; rotating to (nu, T) gives closed forms.
TEST_CASE("adapted Ricci contractions against the rotated diagonal tensor") {
  const auto m = bumpy_metric(200);
  const AmbientSampler amb(m);
  const auto c = wavy_curve(200);
  const auto rep = shape(c, amb, kParams);
  const auto rt = reaction_terms(c, rep, amb, Exec::serial);
  for (std::size_t k = 1; k + 1 < c.x.size(); k += 9) {
    const auto pt = amb.at(c.x[k]);
    const double rr = 2.0 * pt.K_rad;
    const double ro = pt.K_rad + pt.K_orb;
    const double N1 = rep.N1[k], N2 = rep.N2[k], T1 = rep.T1[k], T2 = rep.T2[k];
    const double r01 = rr * N1 * T1 + ro * N2 * T2;
    const double r11 = rr * T1 * T1 + ro * T2 * T2;
    CHECK(rt.c.ric00[k] == doctest::Approx(rr * N1 * N1 + ro * N2 * N2).epsilon(1e-12));
    CHECK(rt.c.S2[k] == doctest::Approx(r01 * r01).scale(1e-12).epsilon(1e-10));
    CHECK(rt.c.ric_h[k] == doctest::Approx(r11 * rep.kappa_prof[k] + ro * rep.kappa_orb[k]).epsilon(1e-12));
  }
}

TEST_CASE("Kato lower bound") {
  CHECK(kato_lower_bound(2, 1.0 / 32.0, 1.0, 0.0) == doctest::Approx(0.75 - 1.0 / 32.0));
  // (2/4)(2/(4/32) - 2) = 7
  CHECK(kato_lower_bound(2, 1.0 / 32.0, 0.0, 1.0) == doctest::Approx(-7.0));
}

TEST_CASE("fixed-point identity residuals at small resolution") {
  FlowState s;
  s.metric = build_round(2, 1.0, 64);
  s.curve = coordinate_sphere(0.5, 64);
  CoupledOptions opt;
  opt.exec = Exec::serial;
  const double dt = 0.5 * coupled_dt_limit(s, opt);
  const auto w = coupled_window(s, 2, dt, opt);
  REQUIRE(w.size() == 3);
  CHECK(max_abs(residual_H(w, 1, kParams)) < 1e-12);
  CHECK(max_abs(residual_A2(w, 1, kParams)) < 1e-12);
  CHECK(max_abs(residual_simons(s, kParams)) < 1e-12);
  CHECK_THROWS_AS(residual_H(w, 0, kParams), InvalidArgument);
  CHECK_THROWS_AS(residual_A2(w, 2, kParams), InvalidArgument);
}

// dH/dt = n^2 cot(rho) / sin^2(rho) on a shrinking geodesic sphere.
TEST_CASE("mean curvature evolution on a geodesic sphere") {
  FlowState s;
  s.metric = build_round(2, 1.0, 100);
  s.curve = coordinate_sphere(1.0 / 3.0, 100);
  CoupledOptions opt;
  opt.freeze_ambient = true;
  opt.exec = Exec::serial;
  const double dt = 0.5 * coupled_dt_limit(s, opt);
  const auto w = coupled_window(s, 2, dt, opt);
  const auto H = [&](int i) { return shape(w[static_cast<std::size_t>(i)].curve, w[0].metric, kParams).H[50]; };
  const double dH = centered_time_derivative(w[0].t, w[1].t, w[2].t, H(0), H(1), H(2));
  const double rho = pi * w[1].curve.x[50];
  const double s2 = std::sin(rho) * std::sin(rho);
  CHECK(dH == doctest::Approx(4.0 * std::cos(rho) / std::sin(rho) / s2).epsilon(1e-3));
  CHECK(max_abs(residual_H(w, 1, kParams)) < 1e-2);
}

TEST_CASE("identity residuals converge under refinement") {
  std::vector<int> res{32, 64, 128};
  std::vector<double> eH, eA, eS;
  for (int M : res) {
    FlowState s;
    s.metric = bumpy_metric(M);
    s.curve = wavy_curve(M);
    CoupledOptions opt;
    opt.resample_ratio = 0.0;
    opt.exec = Exec::serial;
    const double dt = 0.5 * coupled_dt_limit(s, opt);
    // Let the axis initial layer decay before measuring.
    const int pre = static_cast<int>(std::ceil(0.005 / dt));
    FlowState mid = s;
    for (int i = 0; i < pre; ++i) mid = coupled_step(mid, dt, opt);
    const auto w = coupled_window(mid, 2, dt, opt);
    eH.push_back(max_abs(residual_H(w, 1, kParams)));
    eA.push_back(max_abs(residual_A2(w, 1, kParams)));
    eS.push_back(max_abs(residual_simons(w[1], kParams)));
  }
  MESSAGE("H " << eH[0] << " " << eH[1] << " " << eH[2]);
  CHECK(convergence_order(res, eH).order > 1.5);
  CHECK(convergence_order(res, eA).order > 1.5);
  CHECK(convergence_order(res, eS).order > 1.5);
}

TEST_CASE("convergence_order") {
  const std::vector<int> res{100, 200, 400};
  const auto c2 = convergence_order(res, std::vector<double>{4e-4, 1e-4, 2.5e-5});
  CHECK(c2.converged);
  CHECK(c2.order == doctest::Approx(2.0));
  REQUIRE(c2.orders.size() == 2);
  const auto bad = convergence_order(res, std::vector<double>{1e-4, 2e-4, 1e-5});
  CHECK_FALSE(bad.converged);
  CHECK(bad.order == 0.0);
  const auto fn = convergence_order(res, [](int N) { return 1.0 / (static_cast<double>(N) * N * N); });
  CHECK(fn.order == doctest::Approx(3.0));
  const std::vector<int> two{100, 200};
  CHECK_THROWS_AS(convergence_order(two, std::vector<double>{1.0, 0.5}), InvalidArgument);
  const std::vector<int> uneven{100, 300, 400};
  CHECK_THROWS_AS(convergence_order(uneven, std::vector<double>{1.0, 0.5, 0.2}), InvalidArgument);
}

TEST_CASE("centered time derivative is exact on quadratics") {
  auto f = [](double t) { return 3.0 * t * t - t + 2.0; };
  CHECK(centered_time_derivative(0.1, 0.13, 0.2, f(0.1), f(0.13), f(0.2)) == doctest::Approx(6.0 * 0.13 - 1.0));
}

TEST_CASE("verify table and csv") {
  const std::vector<VerifyRow> rows{{"a", 1e-12, std::numeric_limits<double>::quiet_NaN(), true},
                                    {"b", 0.5, 1.99, false}};
  std::ostringstream csv, txt;
  write_verify_csv(csv, rows);
  write_verify_table(txt, rows);
  CHECK(csv.str().rfind("check,maxResidual,order,pass\n", 0) == 0);
  CHECK(txt.str().find("b") != std::string::npos);
}
