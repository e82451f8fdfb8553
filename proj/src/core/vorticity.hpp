#pragma once

#include <functional>
#include <vector>

#include "core/blowup.hpp"
#include "core/hodograph.hpp"
#include "core/initial_map.hpp"

namespace hodo {

// Relative tolerance under which a sigma component (or an expansion
// coefficient of the vorticity numerator) counts as vanishing. Applied
// against the largest adjugate entry in play.
inline constexpr double kSigmaTol = 1e-8;

struct VorticityRecord {
  Mat two_form;   // omega_ij = (adj_ji - adj_ij) / det, antisymmetric
  Vec axial;      // n=3: axial vector; n=2: single entry omega_3
  Vec direction;  // axial / |axial|; empty when |axial| = 0
  double norm = 0.0;
};

// Pointwise vorticity at a regular point. Throws errc::singular on the
// blowup surface and errc::invalid_argument unless dim == 3.
VorticityRecord vorticity_vector(MapRef map, double t, const Vec& u);

// 2D scalar omega_3 = (df1/du2 - df2/du1) / det M. Same singularity rule.
double vorticity_scalar_2d(MapRef map, double t, const Vec& u);

// Antisymmetric two-form and symmetric stress in any dimension.
Mat vorticity_two_form(MapRef map, double t, const Vec& u);
Mat stress_tensor(MapRef map, double t, const Vec& u);

struct SigmaCoeffs {
  Vec sigma;        // axial residue components: omega ~ sigma / (t - t_b)
  Vec sigma_prime;  // t-derivative of the axial numerator at t_b (unscaled)
  double d1 = 0.0;  // d/dt det M at t_b
  double d2 = 0.0;  // second Taylor coefficient of det M at t_b
  double numer_scale = 0.0;  // ||adj(M(t_b))||_max, the sigma tolerance scale
};

// Residue data at a simple root t_b of det M(., u_b). Throws errc::degenerate
// when D1 vanishes (higher-order pole; use laurent_fit with a raised order).
SigmaCoeffs sigma_coefficients(MapRef map, const Vec& u_b, double t_b);

struct TemporalDegree {
  RootInfo root;
  int rank = 0;  // rank of M(t_b, u_b)
  std::vector<int> component_degrees;  // per axial component
  int degree = 0;                      // max over components, 0 = bounded
};

// Blowup order per real root: the root multiplicity m, reduced per component
// by the vanishing order of that component's numerator, and 0 outright when
// rank(M) < n-1 (the whole adjugate vanishes there and vorticity stays
// bounded). Exact power counting on the polynomial expansion of the adjugate,
// no fitting involved. Throws errc::no_blowup when det M(., u_b) has no real
// root.
std::vector<TemporalDegree> temporal_blowup_order(MapRef map, const Vec& u_b);

struct FitWindow {
  double lo = 1e-6;
  double hi = 1e-2;
  int n_points = 16;
};

struct ExponentFit {
  double slope = 0.0;
  double slope_err = 0.0;
  double rms = 0.0;
  int n_points = 0;
  int side = -1;  // -1: t = t_b - eps, +1: t = t_b + eps
};

// Least-squares slope of log|omega| against log|t - t_b| on a geometric
// window scaled by max(1, |t_b|). Sides contaminated by another root within
// 10x the window are excluded; of the remaining sides the better-conditioned
// fit wins. Throws errc::window when no clean side exists, errc::no_blowup
// when det M(., u_b) has no real root at all, errc::zero_vorticity when the
// sampled vorticity is identically negligible.
ExponentFit fit_temporal_exponent(MapRef map, const Vec& u_b, double t_b,
                                  const FitWindow& window = {});

struct LaurentFit {
  int order = 1;  // pole order m
  int side = -1;  // expansion variable s = t_b - t (side -1) or t - t_b (+1)
  Vec coeffs;       // c_{-m}, ..., c_0, c_1 in powers s^{-m} .. s^1
  Vec uncertainty;  // same layout
  double residual = 0.0;
  int n_points = 0;
};

// Fit omega ~ c_{-m} s^{-m} + ... + c_0 + c_1 s near t_b by linear least
// squares on s^m * omega over the window. The expansion variable follows the
// chosen approach side (default: from below, s = t_b - t). Throws
// errc::degenerate when the actual root multiplicity exceeds `order`.
LaurentFit laurent_fit(MapRef map, const Vec& u_b, double t_b, int order = 1,
                       const FitWindow& window = {});

// Same fit for a raw scalar function of t; for synthetic inputs and tests.
// `side` picks the approach direction explicitly; no root bookkeeping.
LaurentFit laurent_fit_fn(const std::function<double(double)>& omega_of_t,
                          double t_b, int order, int side,
                          const FitWindow& window = {});

struct DirectionInfo {
  Vec direction;                 // unit over surviving components
  std::vector<int> subdominant;  // indices zeroed by the tolerance
};

// Limiting blowup direction sigma/|sigma| with components under tol_abs
// zeroed and flagged. Throws errc::zero_vorticity when every component is
// below tolerance.
DirectionInfo direction_from_sigma(const Vec& sigma, double tol_abs);

// Pointwise direction from a vorticity record (no degeneracy flags).
DirectionInfo direction_vector(const VorticityRecord& rec);

}  // namespace hodo
