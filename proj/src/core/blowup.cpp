#include "core/blowup.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/nelder_mead.hpp"
#include "core/parallel.hpp"

namespace hodo {

BlowupBranchSet real_roots(const CharCoeffs& coeffs, double cluster_tol) {
  BlowupBranchSet out;
  for (const ClusteredRoot& r : real_roots_clustered(coeffs.a, cluster_tol)) {
    RootInfo info;
    info.t = r.t;
    info.multiplicity = r.multiplicity;
    info.d1 = poly_deriv1(coeffs.a, r.t);
    info.d2 = 0.5 * poly_deriv2(coeffs.a, r.t);
    out.roots.push_back(info);
  }
  return out;
}

double discriminant_2d(MapRef map, const Vec& u) {
  if (map.dim() != 2) fail(errc::invalid_argument, "discriminant_2d needs a 2D map");
  const Mat j = map.jacobian(u);
  const double d = j(0, 0) - j(1, 1);
  return d * d + 4.0 * j(0, 1) * j(1, 0);
}

DomainLabel classify_domain(MapRef map, const Vec& u, double tol_disc) {
  const Mat j = map.jacobian(u);
  const double d = j(0, 0) - j(1, 1);
  const double delta = d * d + 4.0 * j(0, 1) * j(1, 0);
  const double scale = std::max(1.0, j.max_abs() * j.max_abs());
  if (std::abs(delta) <= tol_disc * scale) return DomainLabel::Dzero;
  return delta > 0.0 ? DomainLabel::Dplus : DomainLabel::Dminus;
}

BlowupBranchSet branch_times(MapRef map, const Vec& u) {
  if (!map.in_domain(u)) fail(errc::domain, "branch_times: u outside the map domain");
  BlowupBranchSet set = real_roots(characteristic_coefficients(map, u));
  set.u = u;
  return set;
}

std::optional<double> smallest_positive_root(MapRef map, const Vec& u) {
  if (!map.in_domain(u)) return std::nullopt;
  CharCoeffs cc;
  try {
    cc = characteristic_coefficients(map, u);
  } catch (const error&) {
    return std::nullopt;
  }
  for (double v : cc.a)
    if (!std::isfinite(v)) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (const ClusteredRoot& r : real_roots_clustered(cc.a))
    if (r.t > 0.0) best = std::min(best, r.t);
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

CatastropheResult find_catastrophe(const InitialMap& map, const Box& box,
                                   const CatastropheOptions& opts) {
  const int n = map.dim();
  if (static_cast<int>(box.lo.size()) != n || static_cast<int>(box.hi.size()) != n)
    fail(errc::invalid_argument, "find_catastrophe: box dimension mismatch");
  for (int i = 0; i < n; ++i)
    if (!(box.lo[i] < box.hi[i]))
      fail(errc::invalid_argument, "find_catastrophe: empty box");

  std::vector<int> branches;
  if (opts.branch >= 0) {
    if (opts.branch >= map.branch_count())
      fail(errc::invalid_argument, "find_catastrophe: branch out of range");
    branches.push_back(opts.branch);
  } else {
    for (int b = 0; b < map.branch_count(); ++b) branches.push_back(b);
  }

  const int g = std::max(2, opts.grid_per_axis);
  long grid_total = 1;
  for (int i = 0; i < n; ++i) grid_total *= g;

  std::atomic<long> evals{0};
  CatastropheResult best;
  best.t_c = std::numeric_limits<double>::infinity();
  bool found = false;

  auto cell_u = [&](long idx) {
    Vec u(n);
    long rem = idx;
    for (int i = 0; i < n; ++i) {
      const int k = static_cast<int>(rem % g);
      rem /= g;
      u[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * (k + 0.5) / g;
    }
    return u;
  };

  struct Seed {
    double t;
    long idx;
    Vec u;
  };

  for (int b : branches) {
    MapRef ref(map, b);

    std::vector<double> tgrid(grid_total,
                              std::numeric_limits<double>::infinity());
    parallel_for(static_cast<std::size_t>(grid_total), opts.workers,
                 [&](std::size_t idx) {
                   const Vec u = cell_u(static_cast<long>(idx));
                   evals.fetch_add(1, std::memory_order_relaxed);
                   if (auto t = smallest_positive_root(ref, u))
                     tgrid[idx] = *t;
                 });

    // Keep the best cells, but never two seeds closer than two cells apart:
    // distinct basins, not one basin sampled repeatedly.
    std::vector<Seed> order;
    order.reserve(grid_total);
    for (long idx = 0; idx < grid_total; ++idx)
      if (std::isfinite(tgrid[idx])) order.push_back({tgrid[idx], idx, {}});
    if (order.empty()) continue;
    std::sort(order.begin(), order.end(), [](const Seed& a, const Seed& s) {
      return a.t < s.t || (a.t == s.t && a.idx < s.idx);
    });

    auto cell_coords = [&](long idx) {
      std::vector<int> k(n);
      for (int i = 0; i < n; ++i) {
        k[i] = static_cast<int>(idx % g);
        idx /= g;
      }
      return k;
    };

    std::vector<Seed> seeds;
    for (const Seed& cand : order) {
      if (static_cast<int>(seeds.size()) >= std::max(1, opts.refine_seeds)) break;
      const std::vector<int> kc = cell_coords(cand.idx);
      bool close = false;
      for (const Seed& kept : seeds) {
        const std::vector<int> kk = cell_coords(kept.idx);
        int dist = 0;
        for (int i = 0; i < n; ++i) dist = std::max(dist, std::abs(kc[i] - kk[i]));
        if (dist <= 2) {
          close = true;
          break;
        }
      }
      if (!close) {
        seeds.push_back(cand);
        seeds.back().u = cell_u(cand.idx);
      }
    }

    double radius0 = 0.0;
    for (int i = 0; i < n; ++i)
      radius0 = std::max(radius0, 1.5 * (box.hi[i] - box.lo[i]) / g);

    auto objective = [&](const Vec& u) {
      evals.fetch_add(1, std::memory_order_relaxed);
      for (int i = 0; i < n; ++i)
        if (u[i] < box.lo[i] || u[i] > box.hi[i])
          return std::numeric_limits<double>::infinity();
      if (auto t = smallest_positive_root(ref, u)) return *t;
      return std::numeric_limits<double>::infinity();
    };

    for (const Seed& s : seeds) {
      const NelderMeadResult r = nelder_mead_restarts(
          objective, s.u, radius0, opts.nm_restarts, opts.nm_max_iters);
      if (!std::isfinite(r.f)) continue;
      bool better = r.f < best.t_c;
      if (!better && r.f == best.t_c && found) {
        if (b < best.branch)
          better = true;
        else if (b == best.branch)
          better = std::lexicographical_compare(r.x.begin(), r.x.end(),
                                                best.u_c.begin(), best.u_c.end());
      }
      if (better) {
        best.t_c = r.f;
        best.u_c = r.x;
        best.branch = b;
        best.trace.push_back({r.f, r.x});
        found = true;
      }
    }
  }

  best.n_evals = evals.load();
  if (!found) fail(errc::no_blowup, "no positive real blowup time in the search box");
  best.branch_name = map.branch_name(best.branch);
  best.x_c = x_of(MapRef(map, best.branch), best.t_c, best.u_c);
  return best;
}

namespace {

// Degeneracy function whose zero set is the root-merging locus.
double degeneracy(MapRef map, const Vec& u) {
  const int n = map.dim();
  if (n == 2) {
    const Mat j = map.jacobian(u);
    const double d = j(0, 0) - j(1, 1);
    return d * d + 4.0 * j(0, 1) * j(1, 0);
  }
  if (n == 3) {
    const CharCoeffs cc = characteristic_coefficients(map, u);
    const double a0 = cc.a[0], a1 = cc.a[1], a2 = cc.a[2];
    return 18.0 * a2 * a1 * a0 - 4.0 * a2 * a2 * a2 * a0 + a2 * a2 * a1 * a1 -
           4.0 * a1 * a1 * a1 - 27.0 * a0 * a0;
  }
  fail(errc::invalid_argument, "double_root_locus supports 2D and 3D maps");
}

std::optional<double> degeneracy_checked(MapRef map, const Vec& u) {
  if (!map.in_domain(u)) return std::nullopt;
  try {
    const double v = degeneracy(map, u);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const error&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<LocusPoint> double_root_locus(MapRef map, const Box& box,
                                          int n_points, double locus_tol) {
  const int n = map.dim();
  if (n != 2 && n != 3)
    fail(errc::invalid_argument, "double_root_locus supports 2D and 3D maps");
  if (n_points <= 0)
    fail(errc::invalid_argument, "double_root_locus: n_points must be positive");

  const int g = 64;
  std::vector<long> stride(n);
  long total = 1;
  for (int i = 0; i < n; ++i) {
    stride[i] = total;
    total *= g + 1;
  }
  auto node_u = [&](long idx) {
    Vec u(n);
    for (int i = 0; i < n; ++i) {
      const int k = static_cast<int>((idx / stride[i]) % (g + 1));
      u[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * k / g;
    }
    return u;
  };

  std::vector<double> val(total, std::numeric_limits<double>::quiet_NaN());
  for (long idx = 0; idx < total; ++idx)
    if (auto v = degeneracy_checked(map, node_u(idx))) val[idx] = *v;

  std::vector<LocusPoint> out;
  for (long idx = 0; idx < total && static_cast<int>(out.size()) < n_points;
       ++idx) {
    for (int axis = 0; axis < n; ++axis) {
      if (static_cast<int>(out.size()) >= n_points) break;
      const int k = static_cast<int>((idx / stride[axis]) % (g + 1));
      if (k == g) continue;
      const long jdx = idx + stride[axis];
      const double va = val[idx], vb = val[jdx];
      if (!std::isfinite(va) || !std::isfinite(vb)) continue;
      if (!(va * vb < 0.0)) continue;

      Vec a = node_u(idx), b = node_u(jdx);
      double fa = va;
      for (int it = 0; it < 200; ++it) {
        Vec mid = a;
        mid[axis] = 0.5 * (a[axis] + b[axis]);
        const auto fm = degeneracy_checked(map, mid);
        if (!fm) break;
        if (std::abs(*fm) <= locus_tol || b[axis] - a[axis] < 1e-15) {
          a = mid;
          fa = *fm;
          break;
        }
        if (fa * *fm < 0.0) {
          b = mid;
        } else {
          a = mid;
          fa = *fm;
        }
      }

      // Stopping at |delta| ~ locus_tol leaves a root split of order
      // sqrt(locus_tol), wide enough to defeat the root clustering
      // downstream. A few Newton steps along the edge axis push the point
      // to machine precision so the merged pair registers as a double root.
      for (int it = 0; it < 3 && fa != 0.0; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(a[axis]));
        Vec probe = a;
        probe[axis] += h;
        const auto fp = degeneracy_checked(map, probe);
        if (!fp) break;
        const double slope = (*fp - fa) / h;
        if (slope == 0.0 || !std::isfinite(slope)) break;
        Vec next = a;
        next[axis] -= fa / slope;
        const auto fn = degeneracy_checked(map, next);
        if (!fn || std::abs(*fn) >= std::abs(fa)) break;
        a = next;
        fa = *fn;
      }

      LocusPoint p;
      p.u = a;
      p.residual = std::abs(fa);
      const BlowupBranchSet set = branch_times(map, a);
      // Report the merged root: the multiple one if clustering caught it,
      // otherwise the closest real pair's midpoint.
      double tb = 0.0;
      bool have = false;
      for (const RootInfo& r : set.roots)
        if (r.multiplicity > 1) {
          tb = r.t;
          have = true;
          break;
        }
      if (!have) {
        double gap = std::numeric_limits<double>::infinity();
        for (size_t i = 1; i < set.roots.size(); ++i) {
          const double d = set.roots[i].t - set.roots[i - 1].t;
          if (d < gap) {
            gap = d;
            tb = 0.5 * (set.roots[i].t + set.roots[i - 1].t);
            have = true;
          }
        }
      }
      if (!have) continue;
      p.t_b = tb;
      out.push_back(p);
    }
  }

  if (out.empty()) fail(errc::empty_locus, "no root-merging locus in the box");
  return out;
}

bool triple_root_check(MapRef map, const Vec& u, double tol) {
  const BlowupBranchSet set = branch_times(map, u);
  const CharCoeffs cc = characteristic_coefficients(map, u);
  double scale = 1.0;
  for (double a : cc.a) scale = std::max(scale, std::abs(a));
  for (const RootInfo& r : set.roots) {
    const double tscale = std::max(scale, std::abs(r.t));
    if (std::abs(r.d1) <= tol * tscale && std::abs(r.d2) <= tol * tscale)
      return true;
  }
  return false;
}

}  // namespace hodo
