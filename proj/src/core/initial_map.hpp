#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/smallmat.hpp"

namespace hodo {

struct Box {
  Vec lo, hi;
  std::size_t dim() const { return lo.size(); }
};

// An initial-data inverse map u -> f(u). Solutions of the transport problem
// satisfy x = u t + f(u); everything in the library consumes this interface.
//
// Piecewise maps expose several branches (one f per branch) plus a sign
// predicate deciding which branch owns a physical point (x, u, t).
class InitialMap {
 public:
  virtual ~InitialMap() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual int branch_count() const { return 1; }
  virtual std::string branch_name(int branch) const;

  virtual Vec f(const Vec& u, int branch) const = 0;

  // Analytic when the subclass provides it, otherwise central differences
  // with step (machine epsilon)^(1/3) * max(1, |u_i|) per component.
  virtual Mat jacobian(const Vec& u, int branch) const;
  virtual bool has_analytic_jacobian() const { return false; }

  // hessian(u)[i](j,k) = d^2 f_i / du_j du_k. Default: central differences
  // with step (machine epsilon)^(1/4) * max(1, |u_i|).
  virtual std::vector<Mat> hessian(const Vec& u, int branch) const;

  // Mathematical validity region of f. Default: everywhere. The search box
  // below only bounds scans and optimizers, never plain evaluation.
  virtual bool in_domain(const Vec& u, int branch) const;
  virtual Box search_box() const = 0;

  // Initial data u0 with u(x, t) = u0(x - u t), when known in closed form.
  virtual bool has_initial_data() const { return false; }
  virtual Vec initial_data(const Vec& x) const;  // throws errc::not_available

  // Branch ownership predicate for piecewise maps (true for single-branch
  // maps). Evaluated at a converged solution, not at a seed.
  virtual bool branch_admits(const Vec& x, const Vec& u, double t,
                             int branch) const;
};

// A map viewed on one branch; the form every analysis routine consumes.
// Implicitly constructible from a plain map (branch 0).
struct MapRef {
  const InitialMap* map;
  int branch;

  MapRef(const InitialMap& m, int b = 0) : map(&m), branch(b) {}

  std::size_t dim() const { return map->dim(); }
  Vec f(const Vec& u) const { return map->f(u, branch); }
  Mat jacobian(const Vec& u) const { return map->jacobian(u, branch); }
  std::vector<Mat> hessian(const Vec& u) const { return map->hessian(u, branch); }
  bool in_domain(const Vec& u) const { return map->in_domain(u, branch); }
  Box search_box() const { return map->search_box(); }
};

// Central-difference helpers shared by the default implementations and the
// FD oracles in tests.
Mat fd_jacobian(const InitialMap& m, const Vec& u, int branch);
std::vector<Mat> fd_hessian(const InitialMap& m, const Vec& u, int branch);

}  // namespace hodo
