#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "core/smallmat.hpp"

namespace hodo {

struct NelderMeadResult {
  Vec x;
  double f = 0.0;
  long n_evals = 0;
  int iterations = 0;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink
// 0.5) on an objective that may return +inf outside its feasible set. Fully
// deterministic; ties resolved by index order.
inline NelderMeadResult nelder_mead(
    const std::function<double(const Vec&)>& f, const Vec& x0, double radius,
    int max_iters = 400, double xtol = 1e-12, double ftol = 1e-14) {
  const std::size_t n = x0.size();
  std::vector<Vec> pts;
  std::vector<double> vals;
  NelderMeadResult res;
  auto eval = [&](const Vec& x) {
    ++res.n_evals;
    double v = f(x);
    return std::isnan(v) ? INFINITY : v;
  };
  pts.push_back(x0);
  vals.push_back(eval(x0));
  for (std::size_t i = 0; i < n; ++i) {
    Vec p = x0;
    p[i] += radius;
    pts.push_back(p);
    vals.push_back(eval(p));
  }
  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < max_iters; ++iter) {
    ++res.iterations;
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    // Convergence: simplex extent and value spread both small.
    double extent = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        extent = std::max(extent, std::fabs(pts[order[i]][j] - pts[best][j]));
    bool vals_finite = std::isfinite(vals[worst]);
    if (extent < xtol &&
        (!vals_finite || vals[worst] - vals[best] < ftol * (1.0 + std::fabs(vals[best]))))
      break;
    Vec centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);
    auto blend = [&](double alpha) {
      Vec p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + alpha * (pts[worst][j] - centroid[j]);
      return p;
    };
    Vec refl = blend(-1.0);
    double fr = eval(refl);
    if (fr < vals[best]) {
      Vec exp_p = blend(-2.0);
      double fe = eval(exp_p);
      if (fe < fr) {
        pts[worst] = exp_p;
        vals[worst] = fe;
      } else {
        pts[worst] = refl;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = refl;
      vals[worst] = fr;
    } else {
      bool outside = fr < vals[worst];
      Vec con = blend(outside ? -0.5 : 0.5);
      double fc = eval(con);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = con;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j)
            pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          vals[i] = eval(pts[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (vals[i] < vals[best]) best = i;
  res.x = pts[best];
  res.f = vals[best];
  return res;
}

// Nelder-Mead with shrinking-radius restarts from the running best point.
// Restarts let the simplex re-approach minima that sit on (or at the limit
// of) the feasible boundary, where a single run stalls against the +inf wall.
inline NelderMeadResult nelder_mead_restarts(
    const std::function<double(const Vec&)>& f, const Vec& x0, double radius0,
    int restarts = 8, int max_iters = 400) {
  NelderMeadResult best = nelder_mead(f, x0, radius0, max_iters);
  long evals = best.n_evals;
  double radius = radius0;
  for (int r = 0; r < restarts; ++r) {
    radius *= 0.1;
    NelderMeadResult next = nelder_mead(f, best.x, radius, max_iters);
    evals += next.n_evals;
    if (next.f < best.f) best = next;
  }
  best.n_evals = evals;
  return best;
}

}  // namespace hodo
