#include "core/initial_map.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace hodo {

namespace {

// Stencil evaluation that reports a DerivativeError instead of silently
// producing NaNs when a step leaves the validity region.
Vec f_checked(const InitialMap& m, const Vec& u, int branch) {
  if (!m.in_domain(u, branch))
    fail(errc::derivative, "finite-difference stencil left the map domain");
  return m.f(u, branch);
}

}  // namespace

std::string InitialMap::branch_name(int branch) const {
  return std::to_string(branch);
}

Mat InitialMap::jacobian(const Vec& u, int branch) const {
  return fd_jacobian(*this, u, branch);
}

std::vector<Mat> InitialMap::hessian(const Vec& u, int branch) const {
  return fd_hessian(*this, u, branch);
}

bool InitialMap::in_domain(const Vec&, int) const { return true; }

Vec InitialMap::initial_data(const Vec&) const {
  fail(errc::not_available, "map '" + name() + "' has no closed-form initial data");
}

bool InitialMap::branch_admits(const Vec&, const Vec&, double, int) const {
  return true;
}

Mat fd_jacobian(const InitialMap& m, const Vec& u, int branch) {
  const std::size_t n = m.dim();
  const double eps = std::numeric_limits<double>::epsilon();
  const double h0 = std::cbrt(eps);
  Mat jac(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double h = h0 * std::max(1.0, std::fabs(u[j]));
    Vec up = u, um = u;
    up[j] += h;
    um[j] -= h;
    Vec fp = f_checked(m, up, branch);
    Vec fm = f_checked(m, um, branch);
    for (std::size_t i = 0; i < n; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

std::vector<Mat> fd_hessian(const InitialMap& m, const Vec& u, int branch) {
  const std::size_t n = m.dim();
  const double eps = std::numeric_limits<double>::epsilon();
  const double h0 = std::pow(eps, 0.25);
  std::vector<Mat> h(n, Mat(n, n));
  Vec f0 = f_checked(m, u, branch);
  for (std::size_t j = 0; j < n; ++j) {
    double hj = h0 * std::max(1.0, std::fabs(u[j]));
    for (std::size_t k = j; k < n; ++k) {
      double hk = h0 * std::max(1.0, std::fabs(u[k]));
      Vec val(n);
      if (j == k) {
        Vec up = u, um = u;
        up[j] += hj;
        um[j] -= hj;
        Vec fp = f_checked(m, up, branch);
        Vec fm = f_checked(m, um, branch);
        for (std::size_t i = 0; i < n; ++i)
          val[i] = (fp[i] - 2.0 * f0[i] + fm[i]) / (hj * hj);
      } else {
        Vec upp = u, upm = u, ump = u, umm = u;
        upp[j] += hj; upp[k] += hk;
        upm[j] += hj; upm[k] -= hk;
        ump[j] -= hj; ump[k] += hk;
        umm[j] -= hj; umm[k] -= hk;
        Vec fpp = f_checked(m, upp, branch);
        Vec fpm = f_checked(m, upm, branch);
        Vec fmp = f_checked(m, ump, branch);
        Vec fmm = f_checked(m, umm, branch);
        for (std::size_t i = 0; i < n; ++i)
          val[i] = (fpp[i] - fpm[i] - fmp[i] + fmm[i]) / (4.0 * hj * hk);
      }
      for (std::size_t i = 0; i < n; ++i) {
        h[i](j, k) = val[i];
        h[i](k, j) = val[i];
      }
    }
  }
  return h;
}

}  // namespace hodo
