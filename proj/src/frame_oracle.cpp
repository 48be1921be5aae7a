#include "rmcf/frame_oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rmcf/error.hpp"

namespace rmcf {

namespace {

constexpr int kDim = 3;
constexpr double kAlpha0 = std::numbers::pi / 2.0;
constexpr double kAlphaStep = 0.02;
// Eighth-order first-derivative weights for offsets 1..4 (antisymmetric).
constexpr double kD8[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};

using Mat = std::array<std::array<double, kDim>, kDim>;
using Gamma = std::array<Mat, kDim>;  // Gamma[a][b][c] = Gamma^a_{bc}
using Riemann = std::array<double, 81>;

std::size_t r4(int a, int b, int c, int d) { return static_cast<std::size_t>(((a * 3 + b) * 3 + c) * 3 + d); }

class Oracle {
 public:
  explicit Oracle(const AmbientMetric& m) : m_(m), h_(m.dx()) {}

  // Metric diag(b^2, phi^2, phi^2 sin^2 a) and its partials at grid node j.
  void metric_at(int j, double alpha, Mat& g, std::array<Mat, kDim>& dg) const {
    const auto ju = static_cast<std::size_t>(j);
    const double b = m_.b[ju];
    const double p = m_.phi[ju];
    const double bx = d8(m_.b, j);
    const double px = d8(m_.phi, j);
    const double s = std::sin(alpha);
    const double c = std::cos(alpha);
    g = {};
    for (auto& row : dg) row = {};
    g[0][0] = b * b;
    g[1][1] = p * p;
    g[2][2] = p * p * s * s;
    dg[0][0][0] = 2.0 * b * bx;
    dg[0][1][1] = 2.0 * p * px;
    dg[0][2][2] = 2.0 * p * px * s * s;
    dg[1][2][2] = 2.0 * p * p * s * c;
  }

  Gamma christoffel(int j, double alpha) const {
    Mat g;
    std::array<Mat, kDim> dg;  // dg[k][a][b] = d_k g_ab
    metric_at(j, alpha, g, dg);
    Gamma gam{};
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c) {
          // g is diagonal so g^{ad} = delta^{ad} / g_aa.
          gam[a][b][c] = 0.5 / g[a][a] * (dg[b][a][c] + dg[c][a][b] - dg[a][b][c]);
        }
    return gam;
  }

  // Fully covariant Riemann tensor at (j, alpha).
  Riemann riemann(int j, double alpha) const {
    const Gamma gam = christoffel(j, alpha);
    std::array<Gamma, kDim> dgam{};  // dgam[k] = d_k Gamma
    for (int k = 1; k <= 4; ++k) {
      const Gamma xp = christoffel(j + k, alpha);
      const Gamma xm = christoffel(j - k, alpha);
      const Gamma ap = christoffel(j, alpha + k * kAlphaStep);
      const Gamma am = christoffel(j, alpha - k * kAlphaStep);
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b)
          for (int c = 0; c < kDim; ++c) {
            dgam[0][a][b][c] += kD8[k - 1] * (xp[a][b][c] - xm[a][b][c]) / h_;
            dgam[1][a][b][c] += kD8[k - 1] * (ap[a][b][c] - am[a][b][c]) / kAlphaStep;
          }
    }
    Mat g;
    std::array<Mat, kDim> dg;
    metric_at(j, alpha, g, dg);
    Riemann out{};
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c)
          for (int d = 0; d < kDim; ++d) {
            // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
            double up = dgam[c][a][d][b] - dgam[d][a][c][b];
            for (int e = 0; e < kDim; ++e) up += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
            out[r4(a, b, c, d)] = g[a][a] * up;
          }
    return out;
  }

 private:
  double d8(const std::vector<double>& f, int j) const {
    double acc = 0.0;
    for (int k = 1; k <= 4; ++k)
      acc += kD8[k - 1] * (f[static_cast<std::size_t>(j + k)] - f[static_cast<std::size_t>(j - k)]);
    return acc / h_;
  }

  const AmbientMetric& m_;
  double h_;
};

}  // namespace

OracleTensors frame_oracle(const AmbientMetric& metric, int node) {
  if (metric.n != 2) throw InvalidArgument("frame_oracle is specific to n = 2 (three-dimensional ambient)");
  metric.validate();
  if (node < kOracleHalfWidth || node > metric.cells() - kOracleHalfWidth)
    throw InvalidArgument("frame_oracle: node " + std::to_string(node) + " too close to a pole");

  const Oracle oracle(metric);
  const double alpha = kAlpha0;
  const Riemann rc = oracle.riemann(node, alpha);
  const Gamma gam = oracle.christoffel(node, alpha);

  std::array<Riemann, kDim> drc{};
  for (int k = 1; k <= 4; ++k) {
    const Riemann xp = oracle.riemann(node + k, alpha);
    const Riemann xm = oracle.riemann(node - k, alpha);
    const Riemann ap = oracle.riemann(node, alpha + k * kAlphaStep);
    const Riemann am = oracle.riemann(node, alpha - k * kAlphaStep);
    for (std::size_t i = 0; i < rc.size(); ++i) {
      drc[0][i] += kD8[k - 1] * (xp[i] - xm[i]) / metric.dx();
      drc[1][i] += kD8[k - 1] * (ap[i] - am[i]) / kAlphaStep;
    }
  }

  // Covariant derivative in coordinates.
  std::array<double, 243> nabla{};
  for (int e = 0; e < kDim; ++e)
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c)
          for (int d = 0; d < kDim; ++d) {
            double v = drc[e][r4(a, b, c, d)];
            for (int f = 0; f < kDim; ++f) {
              v -= gam[f][e][a] * rc[r4(f, b, c, d)];
              v -= gam[f][e][b] * rc[r4(a, f, c, d)];
              v -= gam[f][e][c] * rc[r4(a, b, f, d)];
              v -= gam[f][e][d] * rc[r4(a, b, c, f)];
            }
            nabla[static_cast<std::size_t>(e) * 81 + r4(a, b, c, d)] = v;
          }

  const auto nu = static_cast<std::size_t>(node);
  const double scale[kDim] = {metric.b[nu], metric.phi[nu], metric.phi[nu] * std::sin(alpha)};

  OracleTensors out;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c)
        for (int d = 0; d < kDim; ++d) {
          const double s4 = scale[a] * scale[b] * scale[c] * scale[d];
          out.rm[r4(a, b, c, d)] = rc[r4(a, b, c, d)] / s4;
          for (int e = 0; e < kDim; ++e)
            out.drm[static_cast<std::size_t>(e) * 81 + r4(a, b, c, d)] =
                nabla[static_cast<std::size_t>(e) * 81 + r4(a, b, c, d)] / (s4 * scale[e]);
        }

  for (double v : out.rm) out.rm2 += v * v;
  for (double v : out.drm) out.gradRm2 += v * v;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      double r = 0.0;
      for (int c = 0; c < kDim; ++c) r += out.component(c, a, c, b);
      out.ric[static_cast<std::size_t>(a * 3 + b)] = r;
      out.ric2 += r * r;
    }
  out.R = out.ric[0] + out.ric[4] + out.ric[8];
  out.K_rad = out.component(0, 1, 0, 1);
  out.K_orb = out.component(1, 2, 1, 2);
  return out;
}

}  // namespace rmcf
