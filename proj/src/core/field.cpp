#include "core/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace hodo {
namespace {

double residual_norm(MapRef map, const Vec& x, double t, const Vec& u) {
  const Vec f = map.f(u);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = u[i] * t + f[i] - x[i];
    ss += r * r;
  }
  return std::sqrt(ss);
}

}  // namespace

FieldSample solve_point(MapRef map, const Vec& x, double t, const Vec& seed,
                        const NewtonOptions& opts) {
  const std::size_t n = map.dim();
  if (x.size() != n || seed.size() != n)
    fail(errc::invalid_argument, "solve_point: dimension mismatch");

  FieldSample s;
  s.x = x;
  s.t = t;
  s.branch = map.branch;
  s.u = seed;
  s.status = SampleStatus::no_convergence;

  if (!map.in_domain(seed)) {
    s.status = SampleStatus::out_of_domain;
    s.residual = std::numeric_limits<double>::infinity();
    return s;
  }

  const double tol = opts.tol_scale * std::max(1.0, norm(x));
  Vec u = seed;
  double res = residual_norm(map, x, t, u);
  s.u = u;
  s.residual = res;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (res <= tol) {
      s.status = SampleStatus::ok;
      break;
    }
    Mat m = map.jacobian(u);
    for (std::size_t i = 0; i < n; ++i) m(i, i) += t;

    const Vec f = map.f(u);
    Vec g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = -(u[i] * t + f[i] - x[i]);
    Vec d;
    if (!solve_linear(m, g, d)) {
      s.status = SampleStatus::singular;
      break;
    }

    double lam = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, lam *= 0.5) {
      Vec cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = u[i] + lam * d[i];
      if (!map.in_domain(cand)) continue;
      const double cres = residual_norm(map, x, t, cand);
      if (cres <= (1.0 - 1e-4 * lam) * res) {
        u = cand;
        res = cres;
        accepted = true;
        break;
      }
    }
    ++s.newton_iters;
    if (res < s.residual) {
      s.u = u;
      s.residual = res;
    }
    if (!accepted) break;  // stalled against the domain wall or a flat spot
  }
  if (res <= tol) {
    s.status = SampleStatus::ok;
    s.u = u;
    s.residual = res;
  }

  if (s.ok() && !map.map->branch_admits(x, s.u, t, map.branch))
    s.status = SampleStatus::branch_violation;
  return s;
}

namespace {

Vec cold_seed_start(const InitialMap& map, const Vec& x) {
  if (map.has_initial_data()) {
    Vec u0 = map.initial_data(x);
    bool sane = true;
    for (double v : u0) sane = sane && std::isfinite(v);
    if (sane) return u0;
  }
  const Box box = map.search_box();
  Vec c(box.dim());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = 0.5 * (box.lo[i] + box.hi[i]);
  return c;
}

// Walk the seed from t = 0 to the target time in a few continuation steps;
// multivalued regions make cold starts at late times branch-unstable.
FieldSample solve_ladder(MapRef map, const Vec& x, double t, Vec seed,
                         const NewtonOptions& opts) {
  const int steps = 8;
  FieldSample s;
  for (int k = 1; k <= steps; ++k) {
    const double tk = t * k / steps;
    s = solve_point(map, x, tk, seed, opts);
    if (s.status == SampleStatus::ok ||
        s.status == SampleStatus::branch_violation) {
      seed = s.u;
    }
    // On hard failure keep the old seed and push on; intermediate times
    // are only scaffolding.
  }
  return s;
}

}  // namespace

FieldSample solve_point_auto(const InitialMap& map, const Vec& x, double t,
                             const NewtonOptions& opts) {
  FieldSample best;
  best.x = x;
  best.t = t;
  best.residual = std::numeric_limits<double>::infinity();
  bool have = false;
  for (int b = 0; b < map.branch_count(); ++b) {
    const MapRef ref(map, b);
    const FieldSample s =
        solve_ladder(ref, x, t, cold_seed_start(map, x), opts);
    if (s.ok()) return s;  // branches tried in index order; first owner wins
    if (!have || s.residual < best.residual) {
      best = s;
      have = true;
    }
  }
  return best;
}

long FieldGrid::masked_count() const {
  long n = 0;
  for (const FieldSample& s : samples)
    if (!s.ok()) ++n;
  return n;
}

FieldGrid solve_grid(const InitialMap& map, const GridSpec& spec, double t,
                     int workers, const NewtonOptions& opts) {
  const std::size_t dim = map.dim();
  if (spec.dim() != dim || spec.lo.size() != dim || spec.hi.size() != dim)
    fail(errc::invalid_argument, "solve_grid: grid spec dimension mismatch");
  for (int c : spec.count)
    if (c < 1) fail(errc::invalid_argument, "solve_grid: counts must be >= 1");

  const long nx = spec.count[0];
  long rows = 1;
  for (std::size_t a = 1; a < dim; ++a) rows *= spec.count[a];

  FieldGrid grid;
  grid.spec = spec;
  grid.t = t;
  grid.samples.resize(spec.total());

  auto point_of = [&](long row, long col) {
    Vec x(dim);
    x[0] = spec.coord(0, static_cast<int>(col));
    long rem = row;
    for (std::size_t a = 1; a < dim; ++a) {
      x[a] = spec.coord(static_cast<int>(a),
                        static_cast<int>(rem % spec.count[a]));
      rem /= spec.count[a];
    }
    return x;
  };
  auto idx_of = [&](long row, long col) { return row * nx + col; };

  auto solve_cell = [&](const Vec& x, const Vec* warm) {
    if (warm) {
      // Warm path: try the neighbour's branch and seed first.
      for (int b = 0; b < map.branch_count(); ++b) {
        FieldSample s = solve_point(MapRef(map, b), x, t, *warm, opts);
        if (s.ok()) return s;
      }
    }
    return solve_point_auto(map, x, t, opts);
  };

  // Pass 1: stripes of 16 rows, serpentine continuation inside each stripe.
  const long stripe_rows = 16;
  const long stripes = (rows + stripe_rows - 1) / stripe_rows;
  parallel_for(static_cast<std::size_t>(stripes), workers,
               [&](std::size_t sidx) {
                 const long r0 = static_cast<long>(sidx) * stripe_rows;
                 const long r1 = std::min(rows, r0 + stripe_rows);
                 const FieldSample* prev = nullptr;
                 for (long r = r0; r < r1; ++r) {
                   const bool reversed = ((r - r0) % 2) == 1;
                   for (long k = 0; k < nx; ++k) {
                     const long col = reversed ? nx - 1 - k : k;
                     const long idx = idx_of(r, col);
                     const Vec x = point_of(r, col);
                     const Vec* warm =
                         (prev && prev->ok()) ? &prev->u : nullptr;
                     grid.samples[idx] = solve_cell(x, warm);
                     prev = &grid.samples[idx];
                   }
                 }
               });

  // Pass 2 (serial): re-solve failures from any converged 4-neighbour seed.
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (long r = 0; r < rows; ++r) {
      for (long col = 0; col < nx; ++col) {
        const long idx = idx_of(r, col);
        if (grid.samples[idx].ok()) continue;
        const long nbr[4][2] = {
            {r, col - 1}, {r, col + 1}, {r - 1, col}, {r + 1, col}};
        for (const auto& nb : nbr) {
          if (nb[0] < 0 || nb[0] >= rows || nb[1] < 0 || nb[1] >= nx) continue;
          const FieldSample& seed_cell = grid.samples[idx_of(nb[0], nb[1])];
          if (!seed_cell.ok()) continue;
          FieldSample s = solve_point(MapRef(map, seed_cell.branch),
                                      point_of(r, col), t, seed_cell.u, opts);
          if (s.ok()) {
            grid.samples[idx] = s;
            break;
          }
        }
      }
    }
  }
  return grid;
}

Mat fd_gradient(const InitialMap& map, const Vec& x, double t, double h,
                const NewtonOptions& opts) {
  const std::size_t n = map.dim();
  if (h <= 0.0) fail(errc::invalid_argument, "fd_gradient: h must be positive");
  const FieldSample center = solve_point_auto(map, x, t, opts);
  if (!center.ok())
    fail(errc::no_convergence, "fd_gradient: no solution at the center point");
  const MapRef ref(map, center.branch);

  Mat d(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const FieldSample sp = solve_point(ref, xp, t, center.u, opts);
    const FieldSample sm = solve_point(ref, xm, t, center.u, opts);
    if (!sp.ok() || !sm.ok())
      fail(errc::no_convergence, "fd_gradient: stencil solve failed");
    for (std::size_t i = 0; i < n; ++i)
      d(i, j) = (sp.u[i] - sm.u[i]) / (2.0 * h);
  }
  return d;
}

double characteristics_check(const InitialMap& map, const Vec& x, double t,
                             const NewtonOptions& opts) {
  if (!map.has_initial_data())
    fail(errc::not_available, "map has no closed-form initial data");
  const FieldSample s = solve_point_auto(map, x, t, opts);
  if (!s.ok())
    fail(errc::no_convergence, "characteristics_check: no solution at (x,t)");
  Vec arg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) arg[i] = x[i] - s.u[i] * t;
  const Vec u0 = map.initial_data(arg);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = s.u[i] - u0[i];
    ss += r * r;
  }
  return std::sqrt(ss);
}

}  // namespace hodo
