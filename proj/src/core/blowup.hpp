#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/hodograph.hpp"
#include "core/initial_map.hpp"
#include "core/polyroots.hpp"

namespace hodo {

struct RootInfo {
  double t = 0.0;
  int multiplicity = 1;
  double d1 = 0.0;  // d/dt det M at the root
  double d2 = 0.0;  // second Taylor coefficient of det M about the root,
                    // i.e. p''(t)/2 (equals 3 t + a2 in 3D)
};

struct BlowupBranchSet {
  Vec u;
  std::vector<RootInfo> roots;  // sorted ascending
};

// Real roots of the characteristic polynomial with multiplicities and the
// D1/D2 diagnostics attached. Closed forms for n <= 3.
BlowupBranchSet real_roots(const CharCoeffs& coeffs,
                           double cluster_tol = kRootClusterTol);

// 2D discriminant Delta = (df1/du1 - df2/du2)^2 + 4 df1/du2 df2/du1 of the
// quadratic det M(t, u) in t. Positive means two real blowup branches.
double discriminant_2d(MapRef map, const Vec& u);

enum class DomainLabel { Dplus, Dminus, Dzero };
constexpr const char* domain_label_name(DomainLabel l) {
  switch (l) {
    case DomainLabel::Dplus: return "D+";
    case DomainLabel::Dminus: return "D-";
    case DomainLabel::Dzero: return "D0";
  }
  return "?";
}

// Sign of the discriminant under a relative tolerance; |Delta| <= tol * scale
// classifies as Dzero.
DomainLabel classify_domain(MapRef map, const Vec& u, double tol_disc = 1e-9);

// characteristic_coefficients composed with real_roots.
BlowupBranchSet branch_times(MapRef map, const Vec& u);

// Smallest positive real root at u, on the given branch; nullopt when there
// is none or u is invalid. The workhorse objective of the catastrophe search.
std::optional<double> smallest_positive_root(MapRef map, const Vec& u);

struct CatastropheOptions {
  int grid_per_axis = 200;
  int refine_seeds = 5;     // Nelder-Mead starts from the best grid cells
  int nm_restarts = 8;      // shrinking-radius restarts per seed
  int nm_max_iters = 400;
  int branch = -1;          // -1 = search every branch, else that branch only
  int workers = 1;
};

struct TracePoint {
  double t;
  Vec u;
};

struct CatastropheResult {
  double t_c = 0.0;
  Vec u_c, x_c;
  int branch = 0;
  std::string branch_name;
  long n_evals = 0;
  std::vector<TracePoint> trace;  // successive improvements, search order
};

// Earliest positive blowup time over the box: dense grid seeding followed by
// Nelder-Mead refinement (piecewise maps are searched branch by branch, the
// global best wins; ties break toward the lower branch index then
// lexicographically smaller u). Throws errc::no_blowup when no sampled point
// has a positive real root.
CatastropheResult find_catastrophe(const InitialMap& map, const Box& box,
                                   const CatastropheOptions& opts = {});

struct LocusPoint {
  Vec u;
  double t_b = 0.0;     // merged (double) root at the locus point
  double residual = 0.0;  // |degeneracy function|
};

// Points on the root-merging locus: Delta(u) = 0 in 2D, the vanishing cubic
// discriminant in 3D. Sign changes on a grid are bisected along the grid
// edges; at most n_points points are returned (deterministic edge order).
// Throws errc::empty_locus when no sign change is found.
std::vector<LocusPoint> double_root_locus(MapRef map, const Box& box,
                                          int n_points,
                                          double locus_tol = 1e-9);

// True when some root carries |D1| and |D2| both below tol * scale (3D).
bool triple_root_check(MapRef map, const Vec& u, double tol = 1e-7);

}  // namespace hodo
