#include "core/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "core/errors.hpp"
#include "core/field.hpp"
#include "core/numerics.hpp"

namespace hodo {
namespace {

void sign_fix(Vec& v) {
  for (double c : v) {
    if (std::fabs(c) > 1e-12 * norm(v)) {
      if (c < 0.0)
        for (double& x : v) x = -x;
      return;
    }
  }
}

// Orthonormal complement of `base` built from coordinate vectors in fixed
// order; deterministic like the null-space construction.
std::vector<Vec> orthonormal_complement(const std::vector<Vec>& base,
                                        std::size_t n) {
  std::vector<Vec> all(base), comp;
  for (std::size_t e = 0; e < n && all.size() < n; ++e) {
    Vec v(n, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)  // modified Gram-Schmidt, twice
      for (const Vec& b : all) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * b[i];
      }
    const double nv = norm(v);
    if (nv < 1e-8) continue;
    for (double& x : v) x /= nv;
    sign_fix(v);
    all.push_back(v);
    comp.push_back(v);
  }
  return comp;
}

}  // namespace

std::pair<std::vector<Vec>, std::vector<Vec>> null_vectors(
    const HodographMatrix& mh, double tol_null) {
  std::vector<Vec> r = right_null_space(mh.m, tol_null);
  std::vector<Vec> l = left_null_space(mh.m, tol_null);
  if (r.empty() || l.empty())
    fail(errc::full_rank, "M has full rank: no null directions");
  return {std::move(r), std::move(l)};
}

AdaptedFrame complementary_basis(const std::vector<Vec>& r_null,
                                 const std::vector<Vec>& l_null) {
  if (r_null.empty() || l_null.empty() || r_null.size() != l_null.size())
    fail(errc::invalid_argument,
         "complementary_basis: need matching nonempty null bases");
  const std::size_t n = r_null[0].size();

  AdaptedFrame f;
  f.r_null = r_null;
  f.l_null = l_null;
  f.rank = static_cast<int>(n - r_null.size());
  f.r_comp = orthonormal_complement(r_null, n);
  f.l_comp = orthonormal_complement(l_null, n);

  f.lambda = Mat(n, n);
  std::size_t row = 0;
  for (const Vec& l : f.l_null) {
    for (std::size_t j = 0; j < n; ++j) f.lambda(row, j) = l[j];
    ++row;
  }
  for (const Vec& l : f.l_comp) {
    for (std::size_t j = 0; j < n; ++j) f.lambda(row, j) = l[j];
    ++row;
  }

  const Mat pmat = inverse(f.lambda);  // columns are the dual vectors
  for (std::size_t b = 0; b < n; ++b) {
    Vec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = pmat(i, b);
    if (b < f.l_null.size())
      f.p.push_back(col);
    else
      f.p_tilde.push_back(col);
  }
  return f;
}

AdaptedFrame build_frame(MapRef map, const Vec& u_b, double t_b,
                         double tol_null) {
  const HodographMatrix mh = build_matrix(map, t_b, u_b);
  auto [r, l] = null_vectors(mh, tol_null);
  AdaptedFrame f = complementary_basis(r, l);
  f.u_b = u_b;
  f.t_b = t_b;
  return f;
}

Mat q_matrix(const AdaptedFrame& f) {
  const std::size_t n = f.dim();
  std::vector<const Vec*> rstack, pstack;
  for (const Vec& v : f.r_null) rstack.push_back(&v);
  for (const Vec& v : f.r_comp) rstack.push_back(&v);
  for (const Vec& v : f.p) pstack.push_back(&v);
  for (const Vec& v : f.p_tilde) pstack.push_back(&v);
  Mat q(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) q(a, b) = dot(*rstack[a], *pstack[b]);
  return q;
}

Vec displacement_to_y(const AdaptedFrame& f, const Vec& dx) {
  return f.lambda * dx;
}

namespace {

double fold_coefficient(MapRef map, const Vec& u_b, const Vec& r,
                        const Vec& l) {
  const std::vector<Mat> h = map.hessian(u_b);
  const std::size_t n = r.size();
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double q = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) q += h[i](j, k) * r[j] * r[k];
    a += l[i] * q;
  }
  return a;
}

double two_form_norm(const Mat& d) {
  double ss = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = i + 1; j < d.cols(); ++j) {
      const double t = d(j, i) - d(i, j);
      ss += t * t;
    }
  return std::sqrt(ss);
}

}  // namespace

SpatialFit fit_spatial_exponent(MapRef map, const Vec& u_b, double t_b,
                                const RaySpec& spec) {
  const std::size_t n = map.dim();
  AdaptedFrame f = build_frame(map, u_b, t_b);
  if (f.null_count() != 1)
    fail(errc::invalid_argument,
         "fit_spatial_exponent: expects a single null direction (fold)");
  const Vec& r = f.r_null[0];
  const Vec& l = f.l_null[0];
  const double a = fold_coefficient(map, u_b, r, l);

  Vec d;
  if (spec.direction == 0) {
    d = f.p[0];
  } else {
    if (spec.direction > static_cast<int>(f.p_tilde.size()))
      fail(errc::invalid_argument, "fit_spatial_exponent: no such control direction");
    d = f.p_tilde[spec.direction - 1];
  }
  const double dn = norm(d);
  for (double& v : d) v /= dn;
  // Solutions branch off only where (L . dx) / a > 0; point the singular
  // ray into that half-space.
  if (spec.direction == 0 && a < 0.0)
    for (double& v : d) v = -v;

  const Vec x_b = x_of(map, t_b, u_b);
  const double ld = dot(l, d);
  const std::vector<double> eps =
      geometric_window(spec.lo, spec.hi, spec.n_points);

  struct Sample {
    double eps = 0.0;
    double det = 0.0;
    Mat dgrad;
    double omega = 0.0;
  };
  std::vector<std::optional<Sample>> samples(eps.size());

  Vec prev;
  bool have_prev = false;
  for (std::size_t k = eps.size(); k-- > 0;) {
    const double e = eps[k];
    Vec x = x_b;
    for (std::size_t i = 0; i < n; ++i) x[i] += e * d[i];

    // Sheet-offset prediction: the fold estimate s ~ sqrt(2 eps/a) blows up
    // as the fold coefficient vanishes, where the cusp estimate takes over;
    // whichever is smaller is the one in its validity regime.
    double s_pred = std::cbrt(6.0 * e * std::fabs(ld));
    if (std::fabs(a) > 1e-12)
      s_pred = std::min(s_pred, std::sqrt(std::max(0.0, 2.0 * e * ld / a)));
    Vec u_pred = u_b;
    for (std::size_t i = 0; i < n; ++i)
      u_pred[i] += spec.sheet * s_pred * r[i];

    FieldSample fs;
    fs.status = SampleStatus::no_convergence;
    std::vector<Vec> seeds;
    if (have_prev) seeds.push_back(prev);
    seeds.push_back(u_pred);
    seeds.push_back(u_b);
    for (const Vec& seed : seeds) {
      fs = solve_point(map, x, t_b, seed);
      if (fs.ok()) break;
    }
    if (!fs.ok()) continue;  // tip failures shrink the usable window
    prev = fs.u;
    have_prev = true;

    Mat m = map.jacobian(fs.u);
    for (std::size_t i = 0; i < n; ++i) m(i, i) += t_b;
    const double dm = det(m);
    if (dm == 0.0 || !std::isfinite(dm)) continue;
    Sample s;
    s.eps = e;
    s.det = dm;
    s.dgrad = adjugate(m);
    s.dgrad *= 1.0 / dm;
    s.omega = two_form_norm(s.dgrad);
    samples[k] = s;
  }

  int pos = 0, neg = 0;
  for (const auto& s : samples) {
    if (!s) continue;
    (s->det > 0.0 ? pos : neg)++;
  }
  if (pos > 0 && neg > 0)
    fail(errc::contamination,
         "det M changes sign along the ray: another blowup sheet intrudes");

  // Stack the frame projections V_ab = L^(a) . du/dx . P^(b).
  std::vector<const Vec*> lstack, pstack;
  for (const Vec& v : f.l_null) lstack.push_back(&v);
  for (const Vec& v : f.l_comp) lstack.push_back(&v);
  for (const Vec& v : f.p) pstack.push_back(&v);
  for (const Vec& v : f.p_tilde) pstack.push_back(&v);

  std::vector<double> le;
  std::vector<double> lomega;
  std::vector<std::vector<double>> lv(n * n);
  std::vector<std::vector<bool>> vok(n, std::vector<bool>(n, true));
  const std::size_t k0 = static_cast<std::size_t>(std::max(0, spec.trim));
  const std::size_t k1 = eps.size() - k0;
  for (std::size_t k = k0; k < k1; ++k) {
    if (!samples[k]) continue;
    const Sample& s = *samples[k];
    le.push_back(std::log(s.eps));
    lomega.push_back(s.omega > 0.0 ? std::log(s.omega)
                                   : std::log(1e-300));
    for (std::size_t ai = 0; ai < n; ++ai)
      for (std::size_t b = 0; b < n; ++b) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double row = 0.0;
          for (std::size_t j = 0; j < n; ++j)
            row += s.dgrad(i, j) * (*pstack[b])[j];
          v += (*lstack[ai])[i] * row;
        }
        if (std::fabs(v) < 1e-300) vok[ai][b] = false;
        lv[ai * n + b].push_back(std::log(std::max(std::fabs(v), 1e-300)));
      }
  }
  if (le.size() < 6)
    fail(errc::no_convergence,
         "fit_spatial_exponent: too few converged samples on the ray");

  SpatialFit out;
  out.ray = d;
  out.fold_coeff = a;
  out.n_valid = static_cast<int>(le.size());
  const LineFit of = fit_line(le, lomega);
  out.omega_slope = of.slope;
  out.omega_err = of.slope_stderr;
  out.v_slopes = Mat(n, n);
  out.v_errs = Mat(n, n);
  for (std::size_t ai = 0; ai < n; ++ai)
    for (std::size_t b = 0; b < n; ++b) {
      if (!vok[ai][b]) {
        out.v_slopes(ai, b) = std::numeric_limits<double>::quiet_NaN();
        out.v_errs(ai, b) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const LineFit vf = fit_line(le, lv[ai * n + b]);
      out.v_slopes(ai, b) = vf.slope;
      out.v_errs(ai, b) = vf.slope_stderr;
    }
  return out;
}

namespace {

struct CurveProbe {
  MapRef map;
  double t_b;

  double g(const Vec& u) const {
    Mat m = map.jacobian(u);
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += t_b;
    return det(m);
  }
  std::optional<double> g_checked(const Vec& u) const {
    if (!map.in_domain(u)) return std::nullopt;
    const double v = g(u);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  }
  // Pull a nearby point onto the curve by damped gradient steps.
  bool project(Vec& u) const {
    for (int it = 0; it < 40; ++it) {
      const auto gv = g_checked(u);
      if (!gv) return false;
      const double h = 1e-6 * std::max(1.0, norm_inf(u));
      Vec grad(u.size());
      double gg = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        Vec up = u, um = u;
        up[i] += h;
        um[i] -= h;
        const auto gp = g_checked(up), gm = g_checked(um);
        if (!gp || !gm) return false;
        grad[i] = (*gp - *gm) / (2.0 * h);
        gg += grad[i] * grad[i];
      }
      if (gg == 0.0) return false;
      if (std::fabs(*gv) < 1e-12 * std::max(1.0, std::sqrt(gg))) return true;
      for (std::size_t i = 0; i < u.size(); ++i) u[i] -= *gv * grad[i] / gg;
    }
    const auto gv = g_checked(u);
    return gv && std::fabs(*gv) < 1e-9;
  }
};

}  // namespace

std::vector<CuspCandidate> second_level_scan(MapRef map, double t_b,
                                             const Box& box, int max_points) {
  if (map.dim() != 2)
    fail(errc::invalid_argument, "second_level_scan supports 2D maps");
  CurveProbe probe{map, t_b};

  // Curve points from grid-edge bisection of det M(t_b, .) = 0.
  const int g = 96;
  auto node = [&](int i, int j) {
    return Vec{box.lo[0] + (box.hi[0] - box.lo[0]) * i / g,
               box.lo[1] + (box.hi[1] - box.lo[1]) * j / g};
  };
  std::vector<std::vector<double>> val(g + 1,
                                       std::vector<double>(g + 1,
                                                           std::numeric_limits<double>::quiet_NaN()));
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j)
      if (auto v = probe.g_checked(node(i, j))) val[i][j] = *v;

  std::vector<Vec> pts;
  auto bisect_edge = [&](Vec a, double fa, Vec b) {
    for (int it = 0; it < 80; ++it) {
      Vec mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      const auto fm = probe.g_checked(mid);
      if (!fm) return;
      if (fa * *fm <= 0.0)
        b = mid;
      else {
        a = mid;
        fa = *fm;
      }
    }
    pts.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
  };
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j) {
      if (!std::isfinite(val[i][j])) continue;
      if (i < g && std::isfinite(val[i + 1][j]) &&
          val[i][j] * val[i + 1][j] < 0.0)
        bisect_edge(node(i, j), val[i][j], node(i + 1, j));
      if (j < g && std::isfinite(val[i][j + 1]) &&
          val[i][j] * val[i][j + 1] < 0.0)
        bisect_edge(node(i, j), val[i][j], node(i, j + 1));
    }
  if (pts.empty()) return {};

  // Chain the scattered curve points by nearest-neighbour hops.
  const double cell = std::hypot((box.hi[0] - box.lo[0]) / g,
                                 (box.hi[1] - box.lo[1]) / g);
  std::vector<bool> used(pts.size(), false);
  std::vector<std::vector<std::size_t>> chains;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    if (used[s]) continue;
    std::vector<std::size_t> chain{s};
    used[s] = true;
    for (;;) {
      const Vec& tail = pts[chain.back()];
      std::size_t best = pts.size();
      double bd = 2.5 * cell;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (used[k]) continue;
        const double dd =
            std::hypot(pts[k][0] - tail[0], pts[k][1] - tail[1]);
        if (dd < bd) {
          bd = dd;
          best = k;
        }
      }
      if (best == pts.size()) break;
      used[best] = true;
      chain.push_back(best);
    }
    chains.push_back(std::move(chain));
  }

  // Fold coefficient along each chain with orientation-aligned L.
  auto fold_at = [&](const Vec& u, const Vec* align,
                     Vec* l_out) -> std::optional<double> {
    try {
      AdaptedFrame f = build_frame(map, u, t_b);
      if (f.null_count() != 1) return std::nullopt;
      Vec l = f.l_null[0];
      if (align && dot(l, *align) < 0.0)
        for (double& v : l) v = -v;
      if (l_out) *l_out = l;
      return fold_coefficient(map, u, f.r_null[0], l);
    } catch (const error&) {
      return std::nullopt;
    }
  };

  std::vector<CuspCandidate> out;
  for (const auto& chain : chains) {
    Vec l_ref;
    bool have_ref = false;
    double a_prev = 0.0;
    Vec u_prev;
    for (std::size_t ci = 0; ci < chain.size(); ++ci) {
      const Vec& u = pts[chain[ci]];
      Vec l_here;
      const auto a_here =
          fold_at(u, have_ref ? &l_ref : nullptr, &l_here);
      if (!a_here) {
        have_ref = false;
        continue;
      }
      if (have_ref && a_prev * *a_here < 0.0) {
        // Bisect along the chord, projecting back onto the curve.
        Vec lo = u_prev, hi = u;
        double flo = a_prev;
        Vec l_seg = l_ref;
        for (int it = 0; it < 60; ++it) {
          Vec mid{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
          if (!probe.project(mid)) break;
          Vec lm;
          const auto fm = fold_at(mid, &l_seg, &lm);
          if (!fm) break;
          l_seg = lm;
          if (flo * *fm <= 0.0)
            hi = mid;
          else {
            lo = mid;
            flo = *fm;
          }
        }
        Vec cand{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
        if (probe.project(cand)) {
          const auto fa = fold_at(cand, &l_seg, nullptr);
          bool dup = false;
          for (const CuspCandidate& c : out)
            if (std::hypot(c.u[0] - cand[0], c.u[1] - cand[1]) < 1e-6)
              dup = true;
          if (fa && !dup) {
            out.push_back({cand, std::fabs(*fa)});
            if (static_cast<int>(out.size()) >= max_points) return out;
          }
        }
      }
      l_ref = l_here;
      have_ref = true;
      a_prev = *a_here;
      u_prev = u;
    }
  }
  return out;
}

}  // namespace hodo
