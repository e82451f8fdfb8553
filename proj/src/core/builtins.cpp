#include "core/builtins.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace hodo {

namespace {

const std::vector<std::string> kUVars2 = {"u1", "u2"};

std::vector<std::string> u_vars(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back("u" + std::to_string(i));
  return v;
}

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

Box default_box(std::size_t n, double lo, double hi) {
  return Box{Vec(n, lo), Vec(n, hi)};
}

// ---------------------------------------------------------------- linear

// beta = 0 (the still map f = 0) is allowed; it just has no initial data.
LinearMap::LinearMap(double beta, std::size_t n, std::optional<Box> box)
    : beta_(beta), n_(n), box_(box.value_or(default_box(n, -1.0, 1.0))) {}

Vec LinearMap::f(const Vec& u, int) const {
  Vec out(u);
  for (double& v : out) v *= beta_;
  return out;
}

Mat LinearMap::jacobian(const Vec&, int) const {
  Mat j = Mat::identity(n_);
  j *= beta_;
  return j;
}

std::vector<Mat> LinearMap::hessian(const Vec&, int) const {
  return std::vector<Mat>(n_, Mat(n_, n_));
}

Vec LinearMap::initial_data(const Vec& x) const {
  if (beta_ == 0.0) return InitialMap::initial_data(x);  // not_available
  Vec out(x);
  for (double& v : out) v /= beta_;
  return out;
}

// ------------------------------------------------------------ rotational

RotationalMap::RotationalMap(double alpha, std::optional<Box> box)
    : alpha_(alpha), box_(box.value_or(default_box(2, -2.0, 2.0))) {
  if (alpha == 0.0) fail(errc::config, "rotational map needs alpha != 0");
}

Vec RotationalMap::f(const Vec& u, int) const {
  return {u[1] / alpha_, -u[0] / alpha_};
}

Mat RotationalMap::jacobian(const Vec&, int) const {
  return Mat(2, 2, {0.0, 1.0 / alpha_, -1.0 / alpha_, 0.0});
}

std::vector<Mat> RotationalMap::hessian(const Vec&, int) const {
  return std::vector<Mat>(2, Mat(2, 2));
}

Vec RotationalMap::initial_data(const Vec& x) const {
  return {-alpha_ * x[1], alpha_ * x[0]};
}

// -------------------------------------------------------------- harmonic

HarmonicMap::HarmonicMap(const std::string& w_expr, std::optional<Box> box)
    : w_src_(w_expr), box_(box.value_or(default_box(2, -1.0, 1.0))) {
  ExprPtr w = parse_expr(w_expr, kUVars2);
  ExprPtr first[2] = {diff(w, 0), diff(w, 1)};
  w1_ = first[0];
  w2_ = first[1];
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) d_[j][k] = diff(first[j], k);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) h_[j][k][l] = diff(d_[j][k], l);
}

Vec HarmonicMap::f(const Vec& u, int) const {
  std::span<const double> s(u);
  return {eval(w2_, s), eval(w1_, s)};
}

Mat HarmonicMap::jacobian(const Vec& u, int) const {
  std::span<const double> s(u);
  // Row 0 is grad of f1 = W_2, row 1 grad of f2 = W_1.
  return Mat(2, 2,
             {eval(d_[1][0], s), eval(d_[1][1], s),
              eval(d_[0][0], s), eval(d_[0][1], s)});
}

std::vector<Mat> HarmonicMap::hessian(const Vec& u, int) const {
  std::span<const double> s(u);
  std::vector<Mat> out(2, Mat(2, 2));
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      out[0](k, l) = eval(h_[1][k][l], s);
      out[1](k, l) = eval(h_[0][k][l], s);
    }
  return out;
}

bool HarmonicMap::in_domain(const Vec& u, int branch) const {
  return all_finite(f(u, branch));
}

// ----------------------------------------------------------------- cubic

CubicMap::CubicMap(std::optional<Box> box)
    : box_(box.value_or(default_box(2, -4.0, 4.0))) {}

Vec CubicMap::f(const Vec& u, int) const {
  const double u1 = u[0], u2 = u[1];
  return {-u1 * u1 * u1 / 3.0 - 2.0 / 3.0 * u1 * u2 * u2 + 2.0 * u2,
          -u2 * u2 * u2 / 3.0 - 1.0 / 3.0 * u1 * u1 * u2 - u1};
}

Mat CubicMap::jacobian(const Vec& u, int) const {
  const double u1 = u[0], u2 = u[1];
  return Mat(2, 2,
             {-u1 * u1 - 2.0 / 3.0 * u2 * u2, -4.0 / 3.0 * u1 * u2 + 2.0,
              -2.0 / 3.0 * u1 * u2 - 1.0, -u2 * u2 - 1.0 / 3.0 * u1 * u1});
}

std::vector<Mat> CubicMap::hessian(const Vec& u, int) const {
  const double u1 = u[0], u2 = u[1];
  std::vector<Mat> h(2, Mat(2, 2));
  h[0] = Mat(2, 2, {-2.0 * u1, -4.0 / 3.0 * u2,
                    -4.0 / 3.0 * u2, -4.0 / 3.0 * u1});
  h[1] = Mat(2, 2, {-2.0 / 3.0 * u2, -2.0 / 3.0 * u1,
                    -2.0 / 3.0 * u1, -2.0 * u2});
  return h;
}

// -------------------------------------------------------------- gaussian

namespace {

struct GaussWedge {
  double l1, l2;        // log(u2/u1^3), log(u1/u2)
  bool valid;
};

GaussWedge wedge(const Vec& u) {
  GaussWedge w{0.0, 0.0, false};
  if (u[0] <= 0.0 || u[0] > 1.0 || u[1] <= 0.0 || u[1] > 1.0) return w;
  double r1 = u[1] / (u[0] * u[0] * u[0]);
  double r2 = u[0] / u[1];
  if (r1 < 1.0 || r2 < 1.0) return w;  // outside u1^3 <= u2 <= u1
  w.l1 = std::log(r1);
  w.l2 = std::log(r2);
  w.valid = true;
  return w;
}

}  // namespace

GaussianMap::GaussianMap() = default;

std::pair<int, int> GaussianMap::signs(int branch) {
  switch (branch) {
    case 0: return {+1, +1};
    case 1: return {+1, -1};
    case 2: return {-1, +1};
    case 3: return {-1, -1};
  }
  fail(errc::invalid_argument, "gaussian branch index out of range");
}

std::string GaussianMap::branch_name(int branch) const {
  auto [a, b] = signs(branch);
  return std::string(1, a > 0 ? '+' : '-') + std::string(1, b > 0 ? '+' : '-');
}

Vec GaussianMap::f(const Vec& u, int branch) const {
  auto [a, b] = signs(branch);
  GaussWedge w = wedge(u);
  if (!w.valid) fail(errc::domain, "point outside the gaussian wedge");
  return {a * std::sqrt(0.5 * w.l1), b * std::sqrt(0.5 * w.l2)};
}

Mat GaussianMap::jacobian(const Vec& u, int branch) const {
  auto [a, b] = signs(branch);
  GaussWedge w = wedge(u);
  if (!w.valid) fail(errc::domain, "point outside the gaussian wedge");
  double s1 = std::sqrt(0.5 * w.l1);  // = |f1|
  double s2 = std::sqrt(0.5 * w.l2);
  // d/du sqrt(L/2) = L' / (4 sqrt(L/2)).
  return Mat(2, 2,
             {a * (-3.0 / u[0]) / (4.0 * s1), a * (1.0 / u[1]) / (4.0 * s1),
              b * (1.0 / u[0]) / (4.0 * s2), b * (-1.0 / u[1]) / (4.0 * s2)});
}

std::vector<Mat> GaussianMap::hessian(const Vec& u, int branch) const {
  auto [a, b] = signs(branch);
  GaussWedge w = wedge(u);
  if (!w.valid) fail(errc::domain, "point outside the gaussian wedge");
  const double u1 = u[0], u2 = u[1];
  // d^2/du_j du_k sqrt(L/2) = L_jk/(2 sqrt(2L)) - L_j L_k/(2 (2L)^{3/2}).
  auto entry = [](double l, double lj, double lk, double ljk) {
    double t = 2.0 * l;
    return ljk / (2.0 * std::sqrt(t)) - lj * lk / (2.0 * t * std::sqrt(t));
  };
  double l1j[2] = {-3.0 / u1, 1.0 / u2};
  double l2j[2] = {1.0 / u1, -1.0 / u2};
  double l1jk[2][2] = {{3.0 / (u1 * u1), 0.0}, {0.0, -1.0 / (u2 * u2)}};
  double l2jk[2][2] = {{-1.0 / (u1 * u1), 0.0}, {0.0, 1.0 / (u2 * u2)}};
  std::vector<Mat> h(2, Mat(2, 2));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      h[0](j, k) = a * entry(w.l1, l1j[j], l1j[k], l1jk[j][k]);
      h[1](j, k) = b * entry(w.l2, l2j[j], l2j[k], l2jk[j][k]);
    }
  return h;
}

bool GaussianMap::in_domain(const Vec& u, int) const { return wedge(u).valid; }

Box GaussianMap::search_box() const {
  return Box{{1e-3, 1e-3}, {1.0, 1.0}};
}

Vec GaussianMap::initial_data(const Vec& x) const {
  double q = x[0] * x[0];
  return {std::exp(-q - x[1] * x[1]), std::exp(-q - 3.0 * x[1] * x[1])};
}

bool GaussianMap::branch_admits(const Vec& x, const Vec& u, double t,
                                int branch) const {
  auto [a, b] = signs(branch);
  double scale = std::max({1.0, std::fabs(x[0]), std::fabs(x[1])});
  double slack = 1e-9 * scale;  // boundary x - u t = 0 accepts both sides
  return a * (x[0] - u[0] * t) >= -slack && b * (x[1] - u[1] * t) >= -slack;
}

// ------------------------------------------------------------ analytic2d

Analytic2DMap::Analytic2DMap(const std::string& f_expr, std::optional<Box> box)
    : src_(f_expr), box_(box.value_or(default_box(2, -2.0, 2.0))) {
  f_ = parse_expr(f_expr, {"V"});
  fp_ = diff(f_, 0);
  fpp_ = diff(fp_, 0);
}

namespace {
std::complex<double> eval_c1(const ExprPtr& e, const Vec& u) {
  std::complex<double> v(u[0], u[1]);
  return eval(e, std::span<const std::complex<double>>(&v, 1));
}
}  // namespace

Vec Analytic2DMap::f(const Vec& u, int) const {
  auto z = eval_c1(f_, u);
  return {z.real(), z.imag()};
}

std::complex<double> Analytic2DMap::f_prime(const Vec& u) const {
  return eval_c1(fp_, u);
}

Mat Analytic2DMap::jacobian(const Vec& u, int) const {
  auto d = eval_c1(fp_, u);
  return Mat(2, 2, {d.real(), -d.imag(), d.imag(), d.real()});
}

std::vector<Mat> Analytic2DMap::hessian(const Vec& u, int) const {
  auto d2 = eval_c1(fpp_, u);
  std::vector<Mat> h(2, Mat(2, 2));
  h[0] = Mat(2, 2, {d2.real(), -d2.imag(), -d2.imag(), -d2.real()});
  h[1] = Mat(2, 2, {d2.imag(), d2.real(), d2.real(), -d2.imag()});
  return h;
}

bool Analytic2DMap::in_domain(const Vec& u, int) const {
  auto z = eval_c1(f_, u);
  auto d = eval_c1(fp_, u);
  return std::isfinite(z.real()) && std::isfinite(z.imag()) &&
         std::isfinite(d.real()) && std::isfinite(d.imag());
}

// ------------------------------------------------------------------ expr

ExprMap::ExprMap(std::vector<std::string> component_exprs,
                 std::optional<Box> box)
    : box_(box.value_or(default_box(component_exprs.size(), -2.0, 2.0))) {
  const std::size_t n = component_exprs.size();
  if (n < 2) fail(errc::config, "expression map needs at least 2 components");
  auto vars = u_vars(n);
  for (const auto& src : component_exprs) comp_.push_back(parse_expr(src, vars));
  jac_.resize(n);
  hess_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    jac_[i].resize(n);
    hess_[i].resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      jac_[i][j] = diff(comp_[i], static_cast<int>(j));
      hess_[i][j].resize(n);
      for (std::size_t k = 0; k < n; ++k)
        hess_[i][j][k] = diff(jac_[i][j], static_cast<int>(k));
    }
  }
}

Vec ExprMap::f(const Vec& u, int) const {
  std::span<const double> s(u);
  Vec out(comp_.size());
  for (std::size_t i = 0; i < comp_.size(); ++i) out[i] = eval(comp_[i], s);
  return out;
}

Mat ExprMap::jacobian(const Vec& u, int) const {
  std::span<const double> s(u);
  const std::size_t n = comp_.size();
  Mat j(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) j(i, k) = eval(jac_[i][k], s);
  return j;
}

std::vector<Mat> ExprMap::hessian(const Vec& u, int) const {
  std::span<const double> s(u);
  const std::size_t n = comp_.size();
  std::vector<Mat> h(n, Mat(n, n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) h[i](j, k) = eval(hess_[i][j][k], s);
  return h;
}

bool ExprMap::in_domain(const Vec& u, int) const {
  std::span<const double> s(u);
  for (const auto& c : comp_)
    if (!std::isfinite(eval(c, s))) return false;
  return true;
}

}  // namespace hodo
