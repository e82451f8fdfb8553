#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/expr.hpp"
#include "core/initial_map.hpp"

namespace hodo {

// f = beta * u in any dimension. Initial data u0 = x / beta.
class LinearMap : public InitialMap {
 public:
  explicit LinearMap(double beta, std::size_t n = 2,
                     std::optional<Box> box = std::nullopt);
  std::size_t dim() const override { return n_; }
  std::string name() const override { return "linear"; }
  Vec f(const Vec& u, int branch) const override;
  Mat jacobian(const Vec& u, int branch) const override;
  bool has_analytic_jacobian() const override { return true; }
  std::vector<Mat> hessian(const Vec& u, int branch) const override;
  Box search_box() const override { return box_; }
  bool has_initial_data() const override { return beta_ != 0.0; }
  Vec initial_data(const Vec& x) const override;

 private:
  double beta_;
  std::size_t n_;
  Box box_;
};

// f = (u2/alpha, -u1/alpha): rigid rotation, blowup free, vorticity
// 2 alpha / (alpha^2 t^2 + 1).
class RotationalMap : public InitialMap {
 public:
  explicit RotationalMap(double alpha, std::optional<Box> box = std::nullopt);
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "rotational"; }
  Vec f(const Vec& u, int branch) const override;
  Mat jacobian(const Vec& u, int branch) const override;
  bool has_analytic_jacobian() const override { return true; }
  std::vector<Mat> hessian(const Vec& u, int branch) const override;
  Box search_box() const override { return box_; }
  bool has_initial_data() const override { return true; }
  Vec initial_data(const Vec& x) const override;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  Box box_;
};

// f1 = dW/du2, f2 = dW/du1 for a potential W(u1,u2) given as an expression.
// With W harmonic this is the blowup-free class (discriminant -4 W_11^2).
class HarmonicMap : public InitialMap {
 public:
  explicit HarmonicMap(const std::string& w_expr,
                       std::optional<Box> box = std::nullopt);
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "harmonic"; }
  Vec f(const Vec& u, int branch) const override;
  Mat jacobian(const Vec& u, int branch) const override;
  bool has_analytic_jacobian() const override { return true; }
  std::vector<Mat> hessian(const Vec& u, int branch) const override;
  bool in_domain(const Vec& u, int branch) const override;
  Box search_box() const override { return box_; }
  const std::string& w_source() const { return w_src_; }

 private:
  std::string w_src_;
  ExprPtr w1_, w2_;             // first derivatives of W
  ExprPtr d_[2][2];             // second derivatives (jacobian entries)
  ExprPtr h_[2][2][2];          // third derivatives (hessian entries)
  Box box_;
};

// The nongeneric cubic polynomial map: f1 = -u1^3/3 - (2/3) u1 u2^2 + 2 u2,
// f2 = -u2^3/3 - (1/3) u1^2 u2 - u1.
class CubicMap : public InitialMap {
 public:
  explicit CubicMap(std::optional<Box> box = std::nullopt);
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "cubic"; }
  Vec f(const Vec& u, int branch) const override;
  Mat jacobian(const Vec& u, int branch) const override;
  bool has_analytic_jacobian() const override { return true; }
  std::vector<Mat> hessian(const Vec& u, int branch) const override;
  Box search_box() const override { return box_; }

 private:
  Box box_;
};

// Piecewise four-branch map inverting the Gaussian initial data
// u1 = exp(-x1^2 - x2^2), u2 = exp(-x1^2 - 3 x2^2). Branch (a,b) carries
// f = (a sqrt(L1/2), b sqrt(L2/2)) with L1 = log(u2/u1^3), L2 = log(u1/u2),
// valid on the wedge u1^3 <= u2 <= u1, 0 < u <= 1.
class GaussianMap : public InitialMap {
 public:
  GaussianMap();
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "gaussian"; }
  int branch_count() const override { return 4; }
  std::string branch_name(int branch) const override;
  Vec f(const Vec& u, int branch) const override;
  Mat jacobian(const Vec& u, int branch) const override;
  bool has_analytic_jacobian() const override { return true; }
  std::vector<Mat> hessian(const Vec& u, int branch) const override;
  bool in_domain(const Vec& u, int branch) const override;
  Box search_box() const override;
  bool has_initial_data() const override { return true; }
  Vec initial_data(const Vec& x) const override;
  bool branch_admits(const Vec& x, const Vec& u, double t,
                     int branch) const override;
  // Sign pair of a branch index, a = sign applied to f1, b to f2.
  static std::pair<int, int> signs(int branch);
};

// Complex-analytic class: f1 + i f2 = F(V) with V = u1 + i u2. Cauchy-
// Riemann structure makes det M = |t + F'(V)|^2, so the discriminant is
// -4 Im(F')^2 and generic members are blowup free.
class Analytic2DMap : public InitialMap {
 public:
  explicit Analytic2DMap(const std::string& f_expr,
                         std::optional<Box> box = std::nullopt);
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "analytic2d"; }
  Vec f(const Vec& u, int branch) const override;
  Mat jacobian(const Vec& u, int branch) const override;
  bool has_analytic_jacobian() const override { return true; }
  std::vector<Mat> hessian(const Vec& u, int branch) const override;
  bool in_domain(const Vec& u, int branch) const override;
  Box search_box() const override { return box_; }
  std::complex<double> f_prime(const Vec& u) const;

 private:
  std::string src_;
  ExprPtr f_, fp_, fpp_;
  Box box_;
};

// Map given by n component expressions in u1..un. Derivatives are symbolic.
class ExprMap : public InitialMap {
 public:
  ExprMap(std::vector<std::string> component_exprs,
          std::optional<Box> box = std::nullopt);
  std::size_t dim() const override { return comp_.size(); }
  std::string name() const override { return "expr"; }
  Vec f(const Vec& u, int branch) const override;
  Mat jacobian(const Vec& u, int branch) const override;
  bool has_analytic_jacobian() const override { return true; }
  std::vector<Mat> hessian(const Vec& u, int branch) const override;
  bool in_domain(const Vec& u, int branch) const override;
  Box search_box() const override { return box_; }

 private:
  std::vector<ExprPtr> comp_;
  std::vector<std::vector<ExprPtr>> jac_;            // [i][j]
  std::vector<std::vector<std::vector<ExprPtr>>> hess_;  // [i][j][k]
  Box box_;
};

Box default_box(std::size_t n, double lo, double hi);

}  // namespace hodo
