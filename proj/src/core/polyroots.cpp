#include "core/polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hodo {

double poly_eval(const Vec& a, double t) {
  double v = 1.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * t + *it;
  return v;
}

double poly_deriv1(const Vec& a, double t) {
  const std::size_t n = a.size();
  double v = static_cast<double>(n);
  for (std::size_t k = n; k-- > 1;) v = v * t + static_cast<double>(k) * a[k];
  return v;
}

double poly_deriv2(const Vec& a, double t) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double v = static_cast<double>(n) * static_cast<double>(n - 1);
  for (std::size_t k = n; k-- > 2;)
    v = v * t + static_cast<double>(k) * static_cast<double>(k - 1) * a[k];
  return v;
}

Vec poly_taylor(const Vec& a, double t_b) {
  // Repeated synthetic division: after pass k, c[k] holds the k-th Taylor
  // coefficient about t_b.
  Vec c(a);
  c.push_back(1.0);
  const std::size_t n = c.size() - 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = n - 1; i + 1 > k; --i) c[i] += t_b * c[i + 1];
  return c;
}

namespace {

using cplx = std::complex<double>;

std::vector<cplx> roots_linear(const Vec& a) { return {cplx(-a[0], 0.0)}; }

std::vector<cplx> roots_quadratic(const Vec& a) {
  const double c = a[0], b = a[1];
  double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    double s = std::sqrt(disc);
    // Stable form: avoid cancellation in -b +/- s.
    double q = -0.5 * (b + (b >= 0.0 ? s : -s));
    double r0, r1;
    if (q != 0.0) {
      r0 = q;
      r1 = c / q;
    } else {
      r0 = -0.5 * b + 0.5 * s;
      r1 = -0.5 * b - 0.5 * s;
    }
    return {cplx(r0, 0.0), cplx(r1, 0.0)};
  }
  double im = 0.5 * std::sqrt(-disc);
  return {cplx(-0.5 * b, im), cplx(-0.5 * b, -im)};
}

std::vector<cplx> roots_cubic(const Vec& a) {
  const double a0 = a[0], a1 = a[1], a2 = a[2];
  // Depressed form y^3 + p y + q with t = y - a2/3.
  const double shift = a2 / 3.0;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  std::vector<cplx> out;
  if (disc > 0.0) {
    // Three distinct real roots: trigonometric method (p < 0 here).
    double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      double y = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
      out.emplace_back(y - shift, 0.0);
    }
    return out;
  }
  if (p == 0.0 && q == 0.0) {
    out.assign(3, cplx(-shift, 0.0));
    return out;
  }
  // Cardano: one real root, remaining pair real-equal or complex.
  double half_q = 0.5 * q;
  double rad = half_q * half_q + p * p * p / 27.0;  // = -disc/108
  double y0;
  if (rad >= 0.0) {
    double s = std::sqrt(rad);
    double u = std::cbrt(-half_q + (half_q <= 0.0 ? s : -s));
    // Pick the cube root that avoids cancellation, recover partner by p/(3u).
    if (u == 0.0) u = std::cbrt(-2.0 * half_q);
    double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
    y0 = u + v;
  } else {
    // disc > 0 handled above; rad < 0 cannot happen here.
    y0 = 0.0;
  }
  out.emplace_back(y0 - shift, 0.0);
  // Deflate: y^3 + p y + q = (y - y0)(y^2 + y0 y + (y0^2 + p)).
  double bb = y0, cc = y0 * y0 + p;
  double d2 = bb * bb - 4.0 * cc;
  if (d2 >= 0.0) {
    double s = std::sqrt(d2);
    out.emplace_back(0.5 * (-bb + s) - shift, 0.0);
    out.emplace_back(0.5 * (-bb - s) - shift, 0.0);
  } else {
    double im = 0.5 * std::sqrt(-d2);
    out.emplace_back(-0.5 * bb - shift, im);
    out.emplace_back(-0.5 * bb - shift, -im);
  }
  return out;
}

std::vector<cplx> roots_durand_kerner(const Vec& a) {
  const std::size_t n = a.size();
  // Root magnitude bound (Cauchy) for the starting circle.
  double bound = 0.0;
  for (double c : a) bound = std::max(bound, std::fabs(c));
  bound += 1.0;
  std::vector<cplx> z(n);
  const cplx seed(0.4, 0.9);  // conventional non-real starting ratio
  cplx w(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = bound * w;
    w *= seed;
  }
  auto eval = [&](cplx x) {
    cplx v(1.0, 0.0);
    for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * x + *it;
    return v;
  };
  for (int iter = 0; iter < 200; ++iter) {
    double move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx denom(1.0, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      if (denom == cplx(0.0, 0.0)) denom = cplx(1e-30, 0.0);
      cplx dz = eval(z[i]) / denom;
      z[i] -= dz;
      move = std::max(move, std::abs(dz));
    }
    if (move < 1e-14 * bound) break;
  }
  // Newton polish: Durand-Kerner stalls near multiple roots and can leave
  // imaginary residue above the near-real acceptance band downstream.
  auto deriv = [&](cplx x) {
    cplx v(static_cast<double>(n), 0.0);
    for (std::size_t k = n; k-- > 1;)
      v = v * x + static_cast<double>(k) * a[k];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (int it = 0; it < 4; ++it) {
      const cplx d = deriv(z[i]);
      if (std::abs(d) == 0.0) break;
      const cplx step = eval(z[i]) / d;
      z[i] -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z[i]))) break;
    }
  return z;
}

}  // namespace

std::vector<std::complex<double>> poly_roots(const Vec& a) {
  switch (a.size()) {
    case 0:
      return {};
    case 1:
      return roots_linear(a);
    case 2:
      return roots_quadratic(a);
    case 3:
      return roots_cubic(a);
    default:
      return roots_durand_kerner(a);
  }
}

std::vector<ClusteredRoot> real_roots_clustered(const Vec& a,
                                                double cluster_tol) {
  std::vector<double> reals;
  for (const auto& z : poly_roots(a)) {
    if (std::fabs(z.imag()) <= cluster_tol * std::max(1.0, std::fabs(z.real())))
      reals.push_back(z.real());
  }
  std::sort(reals.begin(), reals.end());
  std::vector<ClusteredRoot> out;
  std::size_t i = 0;
  while (i < reals.size()) {
    std::size_t j = i + 1;
    double sum = reals[i];
    while (j < reals.size() &&
           reals[j] - reals[j - 1] <=
               cluster_tol * std::max(1.0, std::fabs(reals[j]))) {
      sum += reals[j];
      ++j;
    }
    out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

}  // namespace hodo
