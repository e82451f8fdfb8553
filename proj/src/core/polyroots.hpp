#pragma once

#include <complex>
#include <vector>

#include "core/smallmat.hpp"

namespace hodo {

// Double roots appear numerically as split pairs (or as complex pairs with a
// tiny imaginary part when the discriminant lands just below zero). Roots are
// merged, and near-real roots accepted, within this relative tolerance.
inline constexpr double kRootClusterTol = 1e-7;

// Evaluate the monic polynomial t^n + a_{n-1} t^{n-1} + ... + a_0 and its
// derivatives. `a` holds a_0..a_{n-1}.
double poly_eval(const Vec& a, double t);
double poly_deriv1(const Vec& a, double t);
double poly_deriv2(const Vec& a, double t);

// All complex roots of the monic polynomial with coefficients a_0..a_{n-1}.
// Closed forms for n <= 3 (trigonometric method when three real roots exist,
// Cardano otherwise), Durand-Kerner iteration beyond.
std::vector<std::complex<double>> poly_roots(const Vec& a);

// Taylor coefficients c_0..c_n of the monic polynomial about t_b:
// p(t_b + d) = sum_k c_k d^k (c_n = 1). Near a root the direct Horner
// evaluation of p cancels catastrophically; evaluating the shifted form with
// the analytically-zero leading coefficients dropped stays accurate.
Vec poly_taylor(const Vec& a, double t_b);

struct ClusteredRoot {
  double t;
  int multiplicity;
};

// Real roots with multiplicities. Complex roots whose imaginary part is below
// cluster_tol * max(1, |Re|) are treated as real; surviving reals within
// cluster_tol * max(1, |t|) of each other merge into one root (their mean)
// with raised multiplicity. Sorted ascending.
std::vector<ClusteredRoot> real_roots_clustered(
    const Vec& a, double cluster_tol = kRootClusterTol);

}  // namespace hodo
