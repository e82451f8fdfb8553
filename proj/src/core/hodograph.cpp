#include "core/hodograph.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace hodo {

HodographMatrix build_matrix(MapRef map, double t, const Vec& u) {
  if (u.size() != map.dim())
    fail(errc::invalid_argument, "point dimension does not match the map");
  if (!map.in_domain(u))
    fail(errc::domain, "point outside the map domain");
  HodographMatrix mh;
  mh.t = t;
  mh.u = u;
  mh.m = map.jacobian(u);
  for (std::size_t i = 0; i < map.dim(); ++i) mh.m(i, i) += t;
  mh.det = det(mh.m);
  mh.adj = adjugate(mh.m);
  mh.rank = hodo::numerical_rank(mh.m, kRankTol);
  return mh;
}

Mat derivatives_from_inverse(const HodographMatrix& mh) {
  const std::size_t n = mh.m.rows();
  double scale = std::max(1.0, mh.m.max_abs());
  double floor = kRankTol;
  for (std::size_t i = 1; i < n; ++i) floor *= scale;
  if (std::fabs(mh.det) <= floor * scale)
    fail(errc::singular, "det M below tolerance: blowup surface reached");
  Mat out = mh.adj;
  out *= 1.0 / mh.det;
  return out;
}

CharCoeffs characteristic_coefficients(MapRef map, const Vec& u) {
  if (!map.in_domain(u)) fail(errc::domain, "point outside the map domain");
  return CharCoeffs{char_coeffs(map.jacobian(u))};
}

int numerical_rank(const HodographMatrix& mh, double tol_rank) {
  return hodo::numerical_rank(mh.m, tol_rank);
}

Vec x_of(MapRef map, double t, const Vec& u) {
  Vec x = map.f(u);
  for (std::size_t i = 0; i < u.size(); ++i) x[i] += t * u[i];
  return x;
}

Mat adjugate_at(const Mat& j, double t) {
  auto g = adjugate_poly(j);
  const std::size_t n = j.rows();
  Mat out = g[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    out *= t;
    out += g[k];
  }
  return out;
}

Mat adjugate_prime_at(const Mat& j, double t) {
  auto g = adjugate_poly(j);
  const std::size_t n = j.rows();
  if (n < 2) return Mat(n, n);
  Mat out = g[n - 1];
  out *= static_cast<double>(n - 1);
  for (std::size_t k = n - 1; k-- > 1;) {
    out *= t;
    Mat term = g[k];
    term *= static_cast<double>(k);
    out += term;
  }
  return out;
}

}  // namespace hodo
