#include "core/vorticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/polyroots.hpp"

namespace hodo {
namespace {

// Number of independent antisymmetric components reported as the axial part:
// the single omega_3 in 2D, the full axial vector in 3D, the strict upper
// triangle (row-major pair order) beyond.
std::size_t axial_count(std::size_t n) {
  if (n == 2) return 1;
  if (n == 3) return 3;
  return n * (n - 1) / 2;
}

// Axial components of the antisymmetrized matrix: comp_i = N_kj - N_jk over
// the pairs matching the curl convention omega_i = eps_ijk N_kj.
Vec axial_from(const Mat& n) {
  const std::size_t d = n.rows();
  if (d == 2) return {n(1, 0) - n(0, 1)};
  if (d == 3)
    return {n(2, 1) - n(1, 2), n(0, 2) - n(2, 0), n(1, 0) - n(0, 1)};
  Vec out;
  out.reserve(axial_count(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) out.push_back(n(j, i) - n(i, j));
  return out;
}

// Vorticity along the t-axis at fixed u: the Jacobian is constant, so the
// numerator and denominator are exact polynomials in t.
struct OmegaSampler {
  Mat jac;
  Vec a;                // characteristic coefficients of det(t I + J)
  std::vector<Mat> g;   // adj(t I + J) = sum_k g[k] t^k

  Vec axial(double t) const {
    Mat acc = g.back();
    for (std::size_t k = g.size() - 1; k-- > 0;) {
      acc *= t;
      acc += g[k];
    }
    return axial_from(acc);
  }
  double det(double t) const { return poly_eval(a, t); }
  double magnitude(double t) const {
    const double d = det(t);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    return norm(axial(t)) / std::fabs(d);
  }
};

OmegaSampler make_sampler(MapRef map, const Vec& u) {
  if (!map.in_domain(u)) fail(errc::domain, "u outside the map domain");
  OmegaSampler s;
  s.jac = map.jacobian(u);
  s.a = char_coeffs(s.jac);
  s.g = adjugate_poly(s.jac);
  return s;
}

// Magnitude scale of d/dt det at t: the natural size of the terms summed,
// for relative degeneracy tests.
double deriv1_scale(const Vec& a, double t) {
  const double at = std::max(1.0, std::fabs(t));
  double s = static_cast<double>(a.size());
  for (std::size_t k = a.size(); k-- > 1;)
    s = s * at + static_cast<double>(k) * std::fabs(a[k]);
  return std::max(1.0, s);
}

double poly_value_scale(const Vec& a, double t) {
  const double at = std::max(1.0, std::fabs(t));
  double s = 1.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * at + std::fabs(*it);
  return std::max(1.0, s);
}

double binom(int k, int p) {
  double v = 1.0;
  for (int i = 0; i < p; ++i) v = v * (k - i) / (i + 1);
  return v;
}

int root_multiplicity_at(const Vec& a, double t_b) {
  for (const ClusteredRoot& r : real_roots_clustered(a))
    if (std::fabs(r.t - t_b) <= kRootClusterTol * std::max(1.0, std::fabs(t_b)))
      return r.multiplicity;
  return 0;
}

// Determinant near an m-fold root t_b. Horner on the expanded coefficients
// leaves absolute rounding noise that swamps the true value eps^m once m > 1,
// so evaluate the Taylor form about t_b with the analytically zero leading
// terms dropped.
struct PoleEval {
  Vec c;      // Taylor coefficients of det about t_b
  int m = 0;  // multiplicity of t_b as a root (0 when t_b is not one)

  double det_near(double delta) const {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(m);)
      v = v * delta + c[k];
    for (int i = 0; i < m; ++i) v *= delta;
    return v;
  }
};

PoleEval make_pole_eval(const Vec& a, double t_b) {
  PoleEval pe;
  pe.c = poly_taylor(a, t_b);
  pe.m = root_multiplicity_at(a, t_b);
  return pe;
}

}  // namespace

VorticityRecord vorticity_vector(MapRef map, double t, const Vec& u) {
  if (map.dim() != 3)
    fail(errc::invalid_argument, "vorticity_vector needs a 3D map");
  const HodographMatrix mh = build_matrix(map, t, u);
  const Mat d = derivatives_from_inverse(mh);
  VorticityRecord rec;
  rec.two_form = d.transpose() - d;
  rec.axial = axial_from(d);
  rec.norm = norm(rec.axial);
  if (rec.norm > 0.0) {
    rec.direction = rec.axial;
    for (double& v : rec.direction) v /= rec.norm;
  }
  return rec;
}

double vorticity_scalar_2d(MapRef map, double t, const Vec& u) {
  if (map.dim() != 2)
    fail(errc::invalid_argument, "vorticity_scalar_2d needs a 2D map");
  if (!map.in_domain(u)) fail(errc::domain, "u outside the map domain");
  const Mat j = map.jacobian(u);
  const double den =
      t * t + (j(0, 0) + j(1, 1)) * t + (j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0));
  const double sc = std::max({1.0, std::fabs(t), j.max_abs()});
  if (std::fabs(den) <= kRankTol * sc * sc)
    fail(errc::singular, "on the blowup surface: det M = 0");
  return (j(0, 1) - j(1, 0)) / den;
}

Mat vorticity_two_form(MapRef map, double t, const Vec& u) {
  const HodographMatrix mh = build_matrix(map, t, u);
  const Mat d = derivatives_from_inverse(mh);
  return d.transpose() - d;
}

Mat stress_tensor(MapRef map, double t, const Vec& u) {
  const HodographMatrix mh = build_matrix(map, t, u);
  const Mat d = derivatives_from_inverse(mh);
  return d.transpose() + d;
}

SigmaCoeffs sigma_coefficients(MapRef map, const Vec& u_b, double t_b) {
  const OmegaSampler s = make_sampler(map, u_b);
  if (std::fabs(s.det(t_b)) > 1e-6 * poly_value_scale(s.a, t_b))
    fail(errc::invalid_argument, "t_b is not a root of det M(., u_b)");
  SigmaCoeffs out;
  out.d1 = poly_deriv1(s.a, t_b);
  out.d2 = 0.5 * poly_deriv2(s.a, t_b);
  const Mat adj = adjugate_at(s.jac, t_b);
  const Mat adjp = adjugate_prime_at(s.jac, t_b);
  out.numer_scale = adj.max_abs();
  if (std::fabs(out.d1) <= kSigmaTol * deriv1_scale(s.a, t_b))
    fail(errc::degenerate,
         "D1 = 0: multiple root, the simple-pole residue is undefined");
  out.sigma = axial_from(adj);
  for (double& v : out.sigma) v /= out.d1;
  out.sigma_prime = axial_from(adjp);
  return out;
}

std::vector<TemporalDegree> temporal_blowup_order(MapRef map, const Vec& u_b) {
  const OmegaSampler s = make_sampler(map, u_b);
  const std::size_t n = map.dim();
  const auto roots = real_roots_clustered(s.a);
  if (roots.empty())
    fail(errc::no_blowup, "det M(., u_b) has no real root");

  std::vector<TemporalDegree> out;
  for (const ClusteredRoot& r : roots) {
    TemporalDegree td;
    td.root.t = r.t;
    td.root.multiplicity = r.multiplicity;
    td.root.d1 = poly_deriv1(s.a, r.t);
    td.root.d2 = 0.5 * poly_deriv2(s.a, r.t);

    Mat m = s.jac;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += r.t;
    td.rank = numerical_rank(m, kRankTol);
    td.component_degrees.assign(axial_count(n), 0);

    if (td.rank >= static_cast<int>(n) - 1) {
      // Epsilon-power coefficients of the adjugate about the root:
      // adj(t_b + eps) = sum_p A_p eps^p with A_p exact from the polynomial
      // expansion. The vanishing order of each axial numerator component
      // lowers that component's pole order below the root multiplicity.
      const int kmax = static_cast<int>(s.g.size());  // n entries, degree n-1
      std::vector<Vec> axials;
      double scale = 1.0;
      for (int p = 0; p < kmax; ++p) {
        Mat ap(n, n);
        double tp = 1.0;
        for (int k = p; k < kmax; ++k) {
          ap += (binom(k, p) * tp) * s.g[k];
          tp *= r.t;
        }
        scale = std::max(scale, ap.max_abs());
        axials.push_back(axial_from(ap));
      }
      const int m_mult = r.multiplicity;
      for (std::size_t c = 0; c < td.component_degrees.size(); ++c) {
        int q = -1;
        for (int p = 0; p <= std::min(m_mult, kmax - 1); ++p)
          if (std::fabs(axials[p][c]) > kSigmaTol * scale) {
            q = p;
            break;
          }
        td.component_degrees[c] = (q < 0) ? 0 : std::max(0, m_mult - q);
      }
    }
    // rank < n-1: the adjugate vanishes identically at the root and the
    // vorticity stays bounded; degrees stay 0.

    td.degree = 0;
    for (int d : td.component_degrees) td.degree = std::max(td.degree, d);
    out.push_back(td);
  }
  return out;
}

namespace {

struct SideFit {
  bool valid = false;
  bool contaminated = false;
  bool zero = false;
  LineFit fit;
  double rms = 0.0;
  int n_points = 0;
};

SideFit fit_side(const OmegaSampler& s, const PoleEval& pe, double t_b,
                 int side, const std::vector<ClusteredRoot>& roots,
                 const FitWindow& w, double scale) {
  SideFit out;
  const double lo = w.lo * scale, hi = w.hi * scale;
  for (const ClusteredRoot& r : roots) {
    const double d = (r.t - t_b) * side;
    if (std::fabs(r.t - t_b) <= kRootClusterTol * std::max(1.0, std::fabs(t_b)))
      continue;  // the root being approached
    if (d > 0.0 && d <= 10.0 * hi) {
      out.contaminated = true;
      return out;
    }
  }
  std::vector<double> lx, ly;
  int sampled = 0;
  for (double eps : geometric_window(lo, hi, w.n_points)) {
    const double t = t_b + side * eps;
    const double det = pe.det_near(side * eps);
    const double mag = (det == 0.0)
                           ? std::numeric_limits<double>::infinity()
                           : norm(s.axial(t)) / std::fabs(det);
    ++sampled;
    if (!std::isfinite(mag) || mag <= 1e-300) continue;
    lx.push_back(std::log(eps));
    ly.push_back(std::log(mag));
  }
  if (static_cast<int>(lx.size()) < std::max(4, w.n_points / 2)) {
    out.zero = (sampled > 0 && lx.empty());
    return out;
  }
  out.fit = fit_line(lx, ly);
  out.n_points = static_cast<int>(lx.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - out.fit.intercept - out.fit.slope * lx[i];
    ss += r * r;
  }
  out.rms = std::sqrt(ss / lx.size());
  out.valid = true;
  return out;
}

}  // namespace

ExponentFit fit_temporal_exponent(MapRef map, const Vec& u_b, double t_b,
                                  const FitWindow& window) {
  const OmegaSampler s = make_sampler(map, u_b);
  const auto roots = real_roots_clustered(s.a);
  if (roots.empty())
    fail(errc::no_blowup, "det M(., u_b) has no real root to approach");
  const double scale = std::max(1.0, std::fabs(t_b));
  const PoleEval pe = make_pole_eval(s.a, t_b);

  const SideFit below = fit_side(s, pe, t_b, -1, roots, window, scale);
  const SideFit above = fit_side(s, pe, t_b, +1, roots, window, scale);

  const SideFit* pick = nullptr;
  int side = -1;
  if (below.valid && above.valid) {
    if (above.fit.slope_stderr < below.fit.slope_stderr) {
      pick = &above;
      side = +1;
    } else {
      pick = &below;
    }
  } else if (below.valid) {
    pick = &below;
  } else if (above.valid) {
    pick = &above;
    side = +1;
  }
  if (!pick) {
    if (below.zero || above.zero)
      fail(errc::zero_vorticity, "vorticity negligible across the window");
    fail(errc::window,
         "no clean approach side: another root contaminates the window");
  }
  ExponentFit out;
  out.slope = pick->fit.slope;
  out.slope_err = pick->fit.slope_stderr;
  out.rms = pick->rms;
  out.n_points = pick->n_points;
  out.side = side;
  return out;
}

namespace {

LaurentFit laurent_from_samples(const std::vector<double>& eps,
                                const std::vector<double>& omega, int order,
                                int side) {
  std::vector<double> y(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i)
    y[i] = omega[i] * std::pow(eps[i], order);
  const PolyFit pf = fit_poly(eps, y, order + 1);
  LaurentFit out;
  out.order = order;
  out.side = side;
  out.coeffs = pf.coeffs;  // index j holds c_{j - order}
  out.uncertainty.resize(pf.coeffs.size());
  for (std::size_t j = 0; j < pf.coeffs.size(); ++j)
    out.uncertainty[j] =
        3.0 * pf.stderrs[j] + 1e-9 * std::fabs(pf.coeffs[j]) + 1e-12;
  out.residual = pf.rms;
  out.n_points = static_cast<int>(eps.size());
  return out;
}

}  // namespace

LaurentFit laurent_fit(MapRef map, const Vec& u_b, double t_b, int order,
                       const FitWindow& window) {
  if (order < 1) fail(errc::invalid_argument, "laurent_fit: order must be >= 1");
  const OmegaSampler s = make_sampler(map, u_b);
  const auto roots = real_roots_clustered(s.a);
  const int mult = root_multiplicity_at(s.a, t_b);
  if (mult > order)
    fail(errc::degenerate,
         "root multiplicity exceeds the requested pole order");

  const double scale = std::max(1.0, std::fabs(t_b));
  const double lo = window.lo * scale, hi = window.hi * scale;
  auto contaminated = [&](int side) {
    for (const ClusteredRoot& r : roots) {
      if (std::fabs(r.t - t_b) <=
          kRootClusterTol * std::max(1.0, std::fabs(t_b)))
        continue;
      const double d = (r.t - t_b) * side;
      if (d > 0.0 && d <= 10.0 * hi) return true;
    }
    return false;
  };
  int side = -1;  // approach from below unless that side is spoiled
  if (contaminated(-1)) {
    if (contaminated(+1))
      fail(errc::window, "both approach sides contaminated by nearby roots");
    side = +1;
  }

  // Fit the signed dominant axial component (the only one in 2D).
  const Vec probe = s.axial(t_b + side * lo);
  std::size_t comp = 0;
  for (std::size_t i = 1; i < probe.size(); ++i)
    if (std::fabs(probe[i]) > std::fabs(probe[comp])) comp = i;

  PoleEval pe;
  pe.c = poly_taylor(s.a, t_b);
  pe.m = mult;
  std::vector<double> eps, omega;
  for (double e : geometric_window(lo, hi, window.n_points)) {
    const double t = t_b + side * e;
    const double d = pe.det_near(side * e);
    if (d == 0.0 || !std::isfinite(d)) continue;
    const double v = s.axial(t)[comp] / d;
    if (!std::isfinite(v)) continue;
    eps.push_back(e);
    omega.push_back(v);
  }
  if (static_cast<int>(eps.size()) < order + 3)
    fail(errc::window, "too few valid samples in the fitting window");
  return laurent_from_samples(eps, omega, order, side);
}

LaurentFit laurent_fit_fn(const std::function<double(double)>& omega_of_t,
                          double t_b, int order, int side,
                          const FitWindow& window) {
  if (order < 1) fail(errc::invalid_argument, "laurent_fit_fn: order must be >= 1");
  if (side != -1 && side != 1)
    fail(errc::invalid_argument, "laurent_fit_fn: side must be -1 or +1");
  const double scale = std::max(1.0, std::fabs(t_b));
  std::vector<double> eps, omega;
  for (double e : geometric_window(window.lo * scale, window.hi * scale,
                                   window.n_points)) {
    const double v = omega_of_t(t_b + side * e);
    if (!std::isfinite(v)) continue;
    eps.push_back(e);
    omega.push_back(v);
  }
  if (static_cast<int>(eps.size()) < order + 3)
    fail(errc::window, "too few valid samples in the fitting window");
  return laurent_from_samples(eps, omega, order, side);
}

DirectionInfo direction_from_sigma(const Vec& sigma, double tol_abs) {
  DirectionInfo out;
  out.direction.assign(sigma.size(), 0.0);
  double ss = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (std::fabs(sigma[i]) <= tol_abs) {
      out.subdominant.push_back(static_cast<int>(i));
    } else {
      out.direction[i] = sigma[i];
      ss += sigma[i] * sigma[i];
    }
  }
  if (ss == 0.0)
    fail(errc::zero_vorticity, "every sigma component is below tolerance");
  const double inv = 1.0 / std::sqrt(ss);
  for (double& v : out.direction) v *= inv;
  return out;
}

DirectionInfo direction_vector(const VorticityRecord& rec) {
  if (rec.norm <= 0.0)
    fail(errc::zero_vorticity, "vorticity vanishes at this point");
  DirectionInfo out;
  out.direction = rec.direction;
  return out;
}

}  // namespace hodo
