#pragma once

#include <algorithm>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rmcf/ambient_sampler.hpp"
#include "rmcf/coupled_flow.hpp"
#include "rmcf/exec.hpp"
#include "rmcf/hypersurface.hpp"
#include "rmcf/warped_geometry.hpp"

namespace rmcf {

/// Ambient contractions along the hypersurface, per curve node, in the adapted
/// frame e0 = nu, e1 = profile tangent, e2..en = orbit directions. Indices
/// i, j, k, p run over the tangent directions 1..n.
struct AdaptedContractions {
  std::vector<double> ric_h;        // R_ij h_ij
  std::vector<double> ric_hh;       // R_ij h_ik h_jk
  std::vector<double> ric00;        // R_00
  std::vector<double> rm0i0j_h;     // R_0i0j h_ij
  std::vector<double> d0ric00;      // (nabla_0 Ric)_00
  std::vector<double> d0rm0i0j_h;   // (nabla_0 Rm)_0i0j h_ij
  std::vector<double> rkikp_hh;     // R_kikp h_pj h_ij
  std::vector<double> rkipj_hh;     // R_kipj h_kp h_ij
  std::vector<double> drm_0ijk_h;   // (nabla_k Rm)_0ijk h_ij
  std::vector<double> dric_0j_h;    // (nabla_i Ric)_0j h_ij
  std::vector<double> S2;           // sum_i R_0i^2
};

struct ReactionTerms {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> P_contract;  // P_ij h_ij
  std::vector<double> Z;           // H tr(A^3) - |A|^4
  AdaptedContractions c;
};

/// `rep` must come from shape(curve, ambient, ...).
ReactionTerms reaction_terms(const ProfileCurve& curve, const ShapeReport& rep, const AmbientSampler& ambient,
                             Exec exec = Exec::parallel);

/// d/dt at the middle of three (possibly unequally spaced) samples.
double centered_time_derivative(double t0, double t1, double t2, double f0, double f1, double f2);

/// Warped Laplacian f_ss + n (phi_s/phi) f_s of a grid field even about both
/// poles; (n+1) f_ss at the poles.
std::vector<double> warped_laplacian(const AmbientMetric& metric, const AmbientCurvature& curv,
                                     const std::vector<double>& f);

/// |dR/dt - (Lap R + 2|Ric|^2 - 2 rbar R/(n+1))| at every grid node of
/// snapshots[k], with dR/dt from snapshots k-1, k, k+1. Throws InvalidArgument
/// for a boundary index or mismatched grids.
std::vector<double> residual_scalar_curvature(std::span<const AmbientMetric> snapshots, std::span<const double> times,
                                              std::size_t k, Exec exec = Exec::parallel);

/// |dH/dt - (Lap H + |A|^2 H + u)| at every curve node of states[k]. Nodes are
/// matched by label, so the window must not contain a resample (throws
/// InvalidArgument otherwise, as for boundary indices).
std::vector<double> residual_H(std::span<const FlowState> states, std::size_t k, const PinchingParams& params,
                               Exec exec = Exec::parallel);

/// |d|A|^2/dt - (Lap |A|^2 - 2|nabla A|^2 + 2|A|^4 + v)|, same window rules.
std::vector<double> residual_A2(std::span<const FlowState> states, std::size_t k, const PinchingParams& params,
                                Exec exec = Exec::parallel);

/// Simons' identity for Lap |A|^2 on one snapshot. The two axis nodes are set
/// to zero: the one-sided second derivatives of H there are not resolved.
std::vector<double> residual_simons(const FlowState& state, const PinchingParams& params, Exec exec = Exec::parallel);

/// `state` followed by the results of `steps` coupled steps (steps + 1 states),
/// with resampling switched off so node labels stay matched.
std::vector<FlowState> coupled_window(const FlowState& state, int steps, double dt, CoupledOptions options);
/// Same for the ambient alone: steps + 1 nrf_step snapshots and their times.
std::vector<AmbientMetric> ambient_window(const AmbientMetric& metric, int steps, double dt,
                                          std::vector<double>& times, Exec exec = Exec::parallel);

double max_abs(std::span<const double> f);

struct ConvergenceResult {
  std::vector<int> resolutions;
  std::vector<double> errors;
  std::vector<double> orders;  // between successive resolutions
  bool converged = false;      // false when the errors do not decrease monotonically
  double order = 0.0;          // last observed order (0 if not converged)
};

/// Orders log2(e_k / e_{k+1}) for resolutions that double each time (at least
/// three). A non-decreasing step marks the sequence as not converged.
ConvergenceResult convergence_order(std::span<const int> resolutions, std::span<const double> errors);
ConvergenceResult convergence_order(std::span<const int> resolutions, const std::function<double(int)>& max_error);

/// Largest deviation of curvature() from the brute-force frame oracle (n = 2)
/// over the nodes with x in [1/4, 3/4]: every component of Rm and nabla Rm in
/// the frame (d_s, orbit, orbit), and the scalar fields K_rad, K_orb, R, |Rm|^2,
/// |Ric|^2, |nabla Rm|^2. Closer to the poles the oracle's own truncation
/// error (it differentiates 1/phi, which varies on the scale x) dominates.
struct OracleDeviation {
  double rm = 0.0;
  double drm = 0.0;
  double scalars = 0.0;
  double max() const { return std::max({rm, drm, scalars}); }
};
OracleDeviation oracle_deviation(const AmbientMetric& metric, Exec exec = Exec::parallel);

/// Inequality checks evaluated on one coupled snapshot.
struct InequalityReport {
  double kato_slack = 0.0;   // min over nodes of |nabla A|^2 - Kato lower bound
  double gauss_slack = 0.0;  // min over nodes of minSectional - (H^2+1)/(8n^2)
  double rbar = 0.0;
  bool rbar_in_band = false;
  double maxP = 0.0;
};

/// eta = 1/32 for n = 2 and 1/(8(n+2)) otherwise.
double kato_eta(int n);
/// (3/(n+2) - eta) |nabla H|^2 - (2/(n+2)) (2/((n+2) eta) - n/(n-1)) |S|^2.
double kato_lower_bound(int n, double eta, double gradH2, double S2);

InequalityReport inequality_report(const FlowState& state, const PinchingParams& params, double eps0,
                                   Exec exec = Exec::parallel);

struct VerifyRow {
  std::string check;
  double max_residual = 0.0;
  double order = 0.0;  // NaN when not a refinement check
  bool pass = false;
};

/// Aligned text table with header `check,maxResidual,order,pass` semantics.
void write_verify_table(std::ostream& out, std::span<const VerifyRow> rows);
/// CSV: `check,maxResidual,order,pass`.
void write_verify_csv(std::ostream& out, std::span<const VerifyRow> rows);

}  // namespace rmcf
