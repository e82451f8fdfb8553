#pragma once

#include "core/initial_map.hpp"
#include "core/smallmat.hpp"

namespace hodo {

// Relative rank tolerance: double-precision cofactor noise floor with margin.
inline constexpr double kRankTol = 1e-8;

struct HodographMatrix {
  double t = 0.0;
  Vec u;
  Mat m;        // t I + df/du
  double det = 0.0;
  Mat adj;      // adjugate, m * adj = det * I
  int rank = 0; // numerical rank under kRankTol
};

// Assemble M(t, u) with determinant, adjugate, and numerical rank.
// Throws errc::domain when u is outside the map's validity region.
HodographMatrix build_matrix(MapRef map, double t, const Vec& u);

// Velocity gradient du_j/dx_k = adj(M)_jk / det M (row = velocity component,
// column = space direction). Throws errc::singular on the blowup surface,
// which is a signal for the caller, not a math failure.
Mat derivatives_from_inverse(const HodographMatrix& mh);

struct CharCoeffs {
  Vec a;  // det M(t, u) = t^n + a[n-1] t^{n-1} + ... + a[0]
};

// Coefficients of det(t I + J_f(u)): exact trace/minor formulas for n <= 3,
// Faddeev-LeVerrier beyond.
CharCoeffs characteristic_coefficients(MapRef map, const Vec& u);

int numerical_rank(const HodographMatrix& mh, double tol_rank);

// Physical location of the hodograph point: x = u t + f(u).
Vec x_of(MapRef map, double t, const Vec& u);

// Exact adjugate of M(t, u) = t I + J and its t-derivative, from the
// polynomial expansion adj(t I + J) = sum_k G_k t^k. Entries of the adjugate
// are degree n-1 polynomials in t, so the derivative is exact, which matters
// inside already-singular asymptotics where FD noise would dominate.
Mat adjugate_at(const Mat& j, double t);
Mat adjugate_prime_at(const Mat& j, double t);

}  // namespace hodo
