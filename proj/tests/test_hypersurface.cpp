#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rmcf/error.hpp"
#include "rmcf/hypersurface.hpp"
#include "rmcf/verify.hpp"
#include "surface_oracle.hpp"

using namespace rmcf;
using std::numbers::pi;

namespace {

const PinchingParams kParams = PinchingParams::for_dimension(2);

double cot(double r) { return std::cos(r) / std::sin(r); }

double cos_series(const std::vector<double>& c, double x) {
  double q = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) q += c[k] * std::cos(static_cast<double>(k) * pi * x);
  return q;
}

// x = x(alpha) sampled at a non-uniform alpha(u), clustered towards alpha = pi/2.
ProfileCurve clustered_curve(const std::function<double(double)>& x_of_alpha, int P) {
  ProfileCurve c;
  for (int k = 0; k <= P; ++k) {
    const double u = static_cast<double>(k) / P;
    const double a = pi * (u - 0.12 * std::sin(2.0 * pi * u) / pi);
    c.alpha.push_back(a);
    c.x.push_back(x_of_alpha(a));
  }
  c.alpha.front() = 0.0;
  c.alpha.back() = pi;
  return c;
}

}  // namespace

TEST_CASE("geodesic spheres in the round metric") {
  const auto m = build_round(2, 1.0, 200);
  for (double rho : {pi / 6, pi / 3, pi / 2, 2 * pi / 3}) {
    const auto rep = shape(coordinate_sphere(rho / pi, 200), m, kParams);
    const double H = 2.0 * cot(rho);
    for (std::size_t k = 0; k < rep.H.size(); ++k) {
      CHECK(rep.H[k] == doctest::Approx(H).epsilon(1e-9).scale(1.0));
      CHECK(rep.A2[k] == doctest::Approx(0.5 * H * H).epsilon(1e-9).scale(1.0));
      CHECK(rep.traceless[k] < 1e-12);
      CHECK(rep.gradA2[k] < 1e-12);
    }
    CHECK(rep.area == doctest::Approx(4.0 * pi * std::sin(rho) * std::sin(rho)).epsilon(1e-4));
  }
  // |A|^2 - (11/16) H^2 - 1 at rho = pi/3: 2/3 - (11/16)(4/3) - 1.
  const auto rep = shape(coordinate_sphere(1.0 / 3.0, 200), m, kParams);
  CHECK(rep.maxP == doctest::Approx(-1.25).epsilon(1e-9));
  // Gauss equation on an umbilic sphere: every sectional curvature is 1 + cot^2.
  CHECK(rep.minSectionalMin == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("the equator is totally geodesic and does not move") {
  const auto m = build_round(2, 1.0, 64);
  const auto eq = coordinate_sphere(0.5, 64);
  const auto rep = shape(eq, m, kParams);
  CHECK(max_abs(rep.H) < 1e-13);
  CHECK(max_abs(rep.A2) < 1e-26);
  const AmbientSampler amb(m);
  auto c = eq;
  const double dt = 0.5 * curve_dt_limit(c, m, kDefaultCfl);
  for (int i = 0; i < 100; ++i) c = mcf_step(c, amb, dt, kDefaultCfl, i * dt);
  for (std::size_t k = 0; k < c.x.size(); ++k) {
    CHECK(c.x[k] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(c.alpha[k] == eq.alpha[k]);
  }
}

TEST_CASE("orientation flips the sign of H and keeps |A|^2") {
  const auto m = build_round(2, 1.0, 100);
  auto c = graph_curve([](double a) { return 0.4 + 0.05 * std::cos(2.0 * a); }, 100);
  const auto r1 = shape(c, m, kParams);
  c.orientation = -1;
  const auto r2 = shape(c, m, kParams);
  for (std::size_t k = 0; k < r1.H.size(); ++k) {
    CHECK(r2.H[k] == doctest::Approx(-r1.H[k]).scale(1.0));
    CHECK(r2.A2[k] == doctest::Approx(r1.A2[k]).scale(1.0));
  }
}

TEST_CASE("shape matches the brute-force surface oracle at second order") {
  const double a = 0.01;
  const std::vector<double> pm{0.3, 0.5, 1.0}, bm{0.2, 0.0, 0.7};
  oracle::Surface s;
  s.Phi = [&](double x) {
    const double S = std::sin(pi * x);
    return S * (1.0 + a * S * S * cos_series(pm, x));
  };
  s.B = [&](double x) {
    const double S = std::sin(pi * x);
    return pi * (1.0 + a * S * S * cos_series(bm, x));
  };
  s.x = [](double u) { return 0.45 + 0.05 * std::cos(u) + 0.03 * std::cos(2.0 * u); };
  s.dx = [](double u) { return -0.05 * std::sin(u) - 0.06 * std::sin(2.0 * u); };
  s.ddx = [](double u) { return -0.05 * std::cos(u) - 0.12 * std::cos(2.0 * u); };

  const std::vector<int> res{100, 200, 400};
  std::vector<double> eH, eA, eG;
  for (int M : res) {
    ProfileShape sh;
    sh.amplitude = a;
    sh.phi_modes = pm;
    sh.b_amplitude = a;
    sh.b_modes = bm;
    const auto c = graph_curve(s.x, M);
    const auto r = shape(c, build_perturbed(2, M, sh), kParams);
    double h = 0.0, a2 = 0.0, g = 0.0;
    for (int k = M / 8; k <= 7 * M / 8; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const auto p = oracle::at(s, c.alpha[ku]);
      // The oracle normal is only defined up to sign.
      h = std::max(h, std::abs(std::abs(p.H) - std::abs(r.H[ku])));
      a2 = std::max(a2, std::abs(p.A2 - r.A2[ku]));
      g = std::max(g, std::abs(p.gradA2 - r.gradA2[ku]));
    }
    eH.push_back(h);
    eA.push_back(a2);
    eG.push_back(g);
  }
  MESSAGE("H " << eH[2] << " A2 " << eA[2] << " gradA2 " << eG[2]);
  for (const auto& e : {eH, eA, eG}) {
    const auto cr = convergence_order(res, e);
    CHECK(cr.converged);
    CHECK(cr.order >= 1.8);
  }
}

TEST_CASE("shape does not depend on the parametrization") {
  const auto m = build_round(2, 1.0, 400);
  auto xa = [](double a) { return 0.45 + 0.04 * std::cos(a) + 0.02 * std::cos(2.0 * a); };
  const auto uni = shape(graph_curve(xa, 400), m, kParams);
  const auto cl = clustered_curve(xa, 400);
  const auto rep = shape(cl, m, kParams);
  // Linear interpolation of the uniform-alpha result at the clustered nodes.
  double e = 0.0;
  for (std::size_t k = 40; k < 360; k += 7) {
    const double idx = cl.alpha[k] / pi * 400.0;
    const auto j = static_cast<std::size_t>(idx);
    const double w = idx - static_cast<double>(j);
    const double Hi = (1.0 - w) * uni.H[j] + w * uni.H[j + 1];
    e = std::max(e, std::abs(rep.H[k] - Hi));
  }
  CHECK(e < 1e-4);
}

TEST_CASE("resample equalizes spacing without moving the surface") {
  const auto m = build_round(2, 1.0, 200);
  auto xa = [](double a) { return 0.4 + 0.05 * std::cos(a); };
  const auto cl = clustered_curve(xa, 200);
  REQUIRE(spacing_ratio(cl, m) > 1.5);
  const auto rs = resample(cl, m);
  CHECK(spacing_ratio(rs, m) < 1.01);
  CHECK(rs.alpha.front() == 0.0);
  CHECK(rs.alpha.back() == pi);
  double e = 0.0;
  for (std::size_t k = 0; k < rs.x.size(); ++k) e = std::max(e, std::abs(rs.x[k] - xa(rs.alpha[k])));
  CHECK(e < 1e-7);
  const double a1 = shape(cl, m, kParams).area;
  const double a2 = shape(rs, m, kParams).area;
  CHECK(a1 == doctest::Approx(a2).epsilon(1e-4));

  ProfileCurve tiny = coordinate_sphere(0.5, 8);
  CHECK_THROWS_AS(resample(tiny, m), InvalidArgument);
}

TEST_CASE("geodesic sphere shrinks along the closed-form trajectory") {
  // cos(rho(t)) = cos(rho0) e^{nt} in the frozen unit round metric.
  const int P = 100;
  const auto m = build_round(2, 1.0, P);
  const AmbientSampler amb(m);
  const double rho0 = pi / 3;
  auto c = coordinate_sphere(rho0 / pi, P);
  const double dt = 0.5 * curve_dt_limit(c, m, kDefaultCfl);
  const int steps = static_cast<int>(0.1 / dt);
  for (int i = 0; i < steps; ++i) c = mcf_step(c, amb, dt, kDefaultCfl, i * dt);
  const double want = std::acos(std::cos(rho0) * std::exp(2.0 * steps * dt));
  for (double x : c.x) CHECK(pi * x == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("mcf_step rejects steps beyond the CFL bound") {
  const auto m = build_round(2, 1.0, 64);
  const auto c = coordinate_sphere(0.3, 64);
  const double limit = curve_dt_limit(c, m, kDefaultCfl);
  try {
    mcf_step(c, AmbientSampler(m), 2.0 * limit, kDefaultCfl, 0.25);
    FAIL("expected StepRejected");
  } catch (const StepRejected& e) {
    CHECK(e.subsystem() == "hypersurface");
    CHECK(e.time() == 0.25);
  }
}

TEST_CASE("curve validation") {
  auto c = coordinate_sphere(0.5, 32);
  c.alpha[5] = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = coordinate_sphere(0.5, 32);
  c.x[3] = 1.2;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = coordinate_sphere(0.5, 32);
  c.alpha.front() = 0.1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = coordinate_sphere(0.5, 32);
  c.x.pop_back();
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  PinchingParams wrong;
  wrong.alpha_n = 0.5;
  CHECK_THROWS_AS(wrong.validate(), InvalidArgument);
  CHECK(pinching_alpha(2) == 11.0 / 16.0);
  CHECK(pinching_alpha(3) == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("curve text round trip") {
  const auto c = graph_curve([](double a) { return 0.5 + 0.02 * std::cos(3.0 * a); }, 40);
  std::stringstream ss;
  write_curve(ss, c);
  const auto back = read_curve(ss);
  CHECK(back.x == c.x);
  CHECK(back.alpha == c.alpha);
  CHECK(back.topology == c.topology);
  std::istringstream bad("40 sphere 99\n");
  CHECK_THROWS_AS(read_curve(bad), FormatError);
  std::istringstream cut("4 sphere 1\n0 0.5 0\n1 0.5 0.7\n");
  CHECK_THROWS_AS(read_curve(cut), FormatError);
}

TEST_CASE("Kato and Gauss slacks on an umbilic sphere") {
  FlowState s;
  s.metric = build_round(2, 1.0, 100);
  s.curve = coordinate_sphere(1.0 / 3.0, 100);
  const auto q = inequality_report(s, kParams, 1.0 / 12.0);
  // |nabla A| and |nabla H| both vanish, as does the ambient S term.
  CHECK(std::abs(q.kato_slack) < 1e-12);
  // 1 + cot^2 - (H^2 + 1)/(8 n^2) with H^2 = 4/3.
  CHECK(q.gauss_slack == doctest::Approx(4.0 / 3.0 - (4.0 / 3.0 + 1.0) / 32.0).epsilon(1e-9));
  CHECK(q.rbar_in_band);
  CHECK(kato_eta(2) == 1.0 / 32.0);
  CHECK(kato_eta(3) == 1.0 / 40.0);
}
