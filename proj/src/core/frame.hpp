#pragma once

#include <utility>
#include <vector>

#include "core/hodograph.hpp"
#include "core/initial_map.hpp"

namespace hodo {

// Basis adapted to a degenerate hodograph matrix: null vectors first, then
// complements, with the dual stack built so that completeness
// sum_a P^(a) L^(a) + sum_b P~^(b) L~^(b) = I holds to round-off.
struct AdaptedFrame {
  Vec u_b;
  double t_b = 0.0;
  int rank = 0;  // rank r of M(t_b, u_b); n - r null vectors

  std::vector<Vec> r_null, l_null;  // right/left null vectors (n - r each)
  std::vector<Vec> r_comp, l_comp;  // complements (r each)
  std::vector<Vec> p, p_tilde;      // duals of l_null / l_comp
  Mat lambda;                       // stacked rows [L; L~]

  std::size_t dim() const { return lambda.rows(); }
  int null_count() const { return static_cast<int>(r_null.size()); }
};

// Orthonormal right and left null bases of a degenerate M. Deterministic
// (fixed pivoting, fixed orthonormalization order, first nonzero component
// positive). Throws errc::full_rank when M has no null space under tol_null.
std::pair<std::vector<Vec>, std::vector<Vec>> null_vectors(
    const HodographMatrix& mh, double tol_null = kRankTol);

// Complete the null bases: orthonormal complements R~, L~ and the dual stack
// P = columns of [L; L~]^-1. u_b/t_b are left for the caller to fill.
AdaptedFrame complementary_basis(const std::vector<Vec>& r_null,
                                 const std::vector<Vec>& l_null);

// Frame at a blowup point, in one call.
AdaptedFrame build_frame(MapRef map, const Vec& u_b, double t_b,
                         double tol_null = kRankTol);

// q_ab = R-stack row a . P-stack column b, null sector first.
Mat q_matrix(const AdaptedFrame& f);

// dy_b = L-stack row b . dx.
Vec displacement_to_y(const AdaptedFrame& f, const Vec& dx);

struct RaySpec {
  int direction = 0;  // 0: singular ray along P^(1); k >= 1: control P~^(k)
  int sheet = +1;     // which solution sheet to follow (u ~ u_b + sheet*s*R)
  double lo = 1e-7;
  double hi = 1e-3;
  int n_points = 20;
  int trim = 4;  // drop this many window points at each end before fitting
};

struct SpatialFit {
  double omega_slope = 0.0;
  double omega_err = 0.0;
  Mat v_slopes;  // slope of |V_ab|, V = L-stack . du/dx . P-stack; NaN if V ~ 0
  Mat v_errs;
  int n_valid = 0;
  Vec ray;               // unit direction actually used
  double fold_coeff = 0.0;  // a = L . H(R, R); ~0 flags a second-level point
};

// Fixed-time exponents: solve the field along the ray x_b + eps * d by
// continuation from outside, evaluate vorticity and the frame-projected
// velocity gradient at each sample, and fit log-log slopes over the trimmed
// window. Unconverged tip samples are dropped (window shrinks); a det-sign
// flip along the ray throws errc::contamination (another blowup sheet inside
// the window); fewer than 6 usable samples throws errc::no_convergence.
SpatialFit fit_spatial_exponent(MapRef map, const Vec& u_b, double t_b,
                                const RaySpec& spec = {});

struct CuspCandidate {
  Vec u;
  double fold_residual = 0.0;  // |L . H(R,R)| at the returned point
};

// Scan the fixed-time blowup curve det M(t_b, .) = 0 (2D) for zeros of the
// fold coefficient L . H(R,R): the points where the first-level eps^{-1/2}
// amplitude diverges and the scaling steepens to eps^{-2/3}. Grid-seeded
// curve chaining with bisection along chords projected back onto the curve.
std::vector<CuspCandidate> second_level_scan(MapRef map, double t_b,
                                             const Box& box,
                                             int max_points = 8);

}  // namespace hodo
