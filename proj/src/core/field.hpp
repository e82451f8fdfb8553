#pragma once

#include <string>
#include <vector>

#include "core/hodograph.hpp"
#include "core/initial_map.hpp"

namespace hodo {

enum class SampleStatus {
  ok,
  no_convergence,
  singular,          // Newton hit det M ~ 0 (near the blowup surface)
  branch_violation,  // converged u fails every branch ownership predicate
  out_of_domain
};
constexpr const char* sample_status_name(SampleStatus s) {
  switch (s) {
    case SampleStatus::ok: return "ok";
    case SampleStatus::no_convergence: return "no_convergence";
    case SampleStatus::singular: return "singular";
    case SampleStatus::branch_violation: return "branch_violation";
    case SampleStatus::out_of_domain: return "out_of_domain";
  }
  return "?";
}

struct FieldSample {
  Vec x;
  double t = 0.0;
  Vec u;  // best iterate even on failure
  int branch = 0;
  double residual = 0.0;  // ||u t + f(u) - x|| at the reported u
  int newton_iters = 0;
  SampleStatus status = SampleStatus::no_convergence;

  bool ok() const { return status == SampleStatus::ok; }
};

struct NewtonOptions {
  int max_iters = 60;
  int max_halvings = 30;      // Armijo backtracking, factor 0.5
  double tol_scale = 1e-12;   // tol = tol_scale * max(1, ||x||)
};

// Damped Newton on g(u) = u t + f(u) - x from the given seed, on one branch.
// Failure is reported in the sample status (with the best iterate kept), not
// thrown: grid sweeps treat failures as masked cells, never as aborts.
FieldSample solve_point(MapRef map, const Vec& x, double t, const Vec& seed,
                        const NewtonOptions& opts = {});

// Branch-resolving solve with cold seeding (initial data when the map has
// it, else the box center, walked to the target time along a short t-ladder).
// Piecewise maps try every branch; ownership goes to the lowest-index branch
// whose predicate accepts the converged point.
FieldSample solve_point_auto(const InitialMap& map, const Vec& x, double t,
                             const NewtonOptions& opts = {});

struct GridSpec {
  Vec lo, hi;
  std::vector<int> count;  // per axis; axis 0 varies fastest in storage
  std::size_t dim() const { return count.size(); }
  long total() const {
    long n = 1;
    for (int c : count) n *= c;
    return n;
  }
  double coord(int axis, int k) const {
    if (count[axis] <= 1) return lo[axis];
    return lo[axis] + (hi[axis] - lo[axis]) * k / (count[axis] - 1);
  }
};

struct FieldGrid {
  GridSpec spec;
  double t = 0.0;
  std::vector<FieldSample> samples;  // spec.total() entries, axis 0 fastest

  long masked_count() const;
};

// Sweep the grid with spatial continuation. Rows (all indices with equal
// trailing coordinates) are grouped into fixed stripes of 16 rows; stripes
// run independently (hence in parallel) with serpentine in-stripe
// continuation, then a serial pass re-solves failed cells from converged
// neighbours. The stripe layout is independent of the worker count, so the
// output never depends on scheduling.
FieldGrid solve_grid(const InitialMap& map, const GridSpec& spec, double t,
                     int workers = 1, const NewtonOptions& opts = {});

// Central-difference velocity gradient D_ij = du_i/dx_j of the reconstructed
// field; the FD oracle against the adjugate formula. Stencil solves are
// seeded from the center solution and pinned to its branch. Throws
// errc::no_convergence when any stencil point fails.
Mat fd_gradient(const InitialMap& map, const Vec& x, double t, double h,
                const NewtonOptions& opts = {});

// Transport defect ||u(x,t) - u0(x - u t)||. Throws errc::not_available
// when the map carries no closed-form initial data.
double characteristics_check(const InitialMap& map, const Vec& x, double t,
                             const NewtonOptions& opts = {});

}  // namespace hodo
