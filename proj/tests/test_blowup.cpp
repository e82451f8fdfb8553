#include <doctest.h>

#include <cmath>
#include <random>

#include "core/blowup.hpp"
#include "core/builtins.hpp"
#include "core/errors.hpp"
#include "helpers.hpp"

using namespace hodo;
using namespace hodo::testutil;

namespace {

// Published location of the cubic map's first catastrophe (symmetric in +-u).
constexpr double kCubicTc = 1.6201851746;
constexpr double kCubicUc1 = 1.59562066;
constexpr double kCubicUc2 = 1.17844394;

double cubic_quartic(const Vec& u) {
  const double u1 = u[0], u2 = u[1];
  return 4 * u1 * u1 * u1 * u1 + 28 * u2 * u2 * u1 * u1 +
         u2 * u2 * u2 * u2 - 72.0;
}

}  // namespace

TEST_SUITE("blowup") {

TEST_CASE("real roots with diagnostics") {
  // (t-1)(t-2)(t-3) = t^3 - 6t^2 + 11t - 6
  BlowupBranchSet set = real_roots(CharCoeffs{{-6.0, 11.0, -6.0}});
  REQUIRE(set.roots.size() == 3);
  CHECK(set.roots[0].t == doctest::Approx(1.0));
  CHECK(set.roots[1].t == doctest::Approx(2.0));
  CHECK(set.roots[2].t == doctest::Approx(3.0));
  for (const auto& r : set.roots) CHECK(r.multiplicity == 1);
  CHECK(set.roots[0].d1 == doctest::Approx(2.0));   // p'(1)
  CHECK(set.roots[1].d1 == doctest::Approx(-1.0));  // p'(2)
  CHECK(set.roots[0].d2 == doctest::Approx(-3.0));  // p''(1)/2
}

TEST_CASE("double root diagnostics") {
  // (t-2)^2 (t+1): D1 vanishes at the double root, D2 = p''/2 = 3.
  BlowupBranchSet set = real_roots(CharCoeffs{{4.0, 0.0, -3.0}});
  REQUIRE(set.roots.size() == 2);
  const RootInfo& dbl = set.roots[1];
  CHECK(dbl.t == doctest::Approx(2.0));
  CHECK(dbl.multiplicity == 2);
  CHECK(std::fabs(dbl.d1) <= 1e-7);
  CHECK(dbl.d2 == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("cubic map at (2,0) has no real blowup time") {
  CubicMap cubic;
  Vec a = characteristic_coefficients(cubic, {2.0, 0.0}).a;
  CHECK(a[1] == doctest::Approx(-16.0 / 3));
  CHECK(a[0] == doctest::Approx(22.0 / 3));
  CHECK(branch_times(cubic, {2.0, 0.0}).roots.empty());
  CHECK(!smallest_positive_root(cubic, {2.0, 0.0}).has_value());
}

TEST_CASE("discriminant of the cubic map carries the factor nine") {
  CubicMap cubic;
  std::mt19937 rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    Vec u = random_vec(rng, 2, -3.0, 3.0);
    double nine = 9.0 * discriminant_2d(cubic, u);
    CHECK(nine == doctest::Approx(cubic_quartic(u)).epsilon(1e-10));
  }
  CHECK(9.0 * discriminant_2d(cubic, {0.0, 0.0}) == doctest::Approx(-72.0));
}

TEST_CASE("discriminant of harmonic maps is never positive") {
  // Delta = -4 W_11^2 for harmonic W.
  HarmonicMap map("u1^3 - 3 * u1 * u2^2");
  std::mt19937 rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    Vec u = random_vec(rng, 2, -2.0, 2.0);
    const double w11 = 6 * u[0];
    CHECK(discriminant_2d(map, u) ==
          doctest::Approx(-4 * w11 * w11).epsilon(1e-10));
  }
}

TEST_CASE("domain classification of the cubic map") {
  CubicMap cubic;
  CHECK(classify_domain(cubic, {0.0, 0.0}) == DomainLabel::Dminus);
  CHECK(classify_domain(cubic, {2.0, 2.0}) == DomainLabel::Dplus);
  CHECK(classify_domain(cubic, {0.0, std::pow(72.0, 0.25)}) ==
        DomainLabel::Dzero);
  CHECK(domain_label_name(DomainLabel::Dplus) == std::string("D+"));
}

TEST_CASE("classification matches the real root count") {
  CubicMap cubic;
  std::mt19937 rng(97);
  for (int trial = 0; trial < 10000; ++trial) {
    Vec u = random_vec(rng, 2, -4.0, 4.0);
    DomainLabel label = classify_domain(cubic, u);
    int total_mult = 0;
    for (const auto& r : branch_times(cubic, u).roots)
      total_mult += r.multiplicity;
    if (label == DomainLabel::Dplus) CHECK(total_mult == 2);
    if (label == DomainLabel::Dminus) CHECK(total_mult == 0);
  }
}

TEST_CASE("branch times at the published cubic catastrophe point") {
  // 1.62019 is the u-minimum of the lower root branch, not a root merger:
  // the discriminant there is positive and the partner root sits near 4.09.
  CubicMap cubic;
  BlowupBranchSet set = branch_times(cubic, {kCubicUc1, kCubicUc2});
  REQUIRE(set.roots.size() == 2);
  CHECK(set.roots[0].multiplicity == 1);
  CHECK(set.roots[1].multiplicity == 1);
  CHECK(set.roots[0].t == doctest::Approx(kCubicTc).epsilon(1e-6));
  CHECK(set.roots[1].t == doctest::Approx(4.09).epsilon(1e-2));
}

TEST_CASE("gaussian wedge points carry two positive roots") {
  GaussianMap gauss;
  std::mt19937 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    double u1 = uniform(rng, 0.2, 0.95);
    double lo = u1 * u1 * u1;
    double u2 = lo + (u1 - lo) * uniform(rng, 0.1, 0.9);
    BlowupBranchSet set = branch_times(MapRef(gauss, 0), {u1, u2});
    REQUIRE(set.roots.size() == 2);
    CHECK(set.roots[0].t > 0.0);
    CHECK(set.roots[1].t > set.roots[0].t);
    CHECK(set.roots[0].multiplicity == 1);
  }
}

TEST_CASE("vanishing map root has full multiplicity") {
  LinearMap still(0.0, 3);
  BlowupBranchSet set = branch_times(still, {0.1, 0.2, 0.3});
  REQUIRE(set.roots.size() == 1);
  CHECK(set.roots[0].t == doctest::Approx(0.0));
  CHECK(set.roots[0].multiplicity == 3);
}

TEST_CASE("branch times reject out-of-domain points") {
  GaussianMap gauss;
  CHECK(code_of([&] { branch_times(MapRef(gauss, 0), {0.5, 0.1}); }) ==
        errc::domain);
}

TEST_CASE("rebuilt polynomial matches the characteristic coefficients") {
  CubicMap cubic;
  std::mt19937 rng(103);
  int used = 0;
  for (int trial = 0; trial < 400 && used < 100; ++trial) {
    Vec u = random_vec(rng, 2, -3.0, 3.0);
    auto set = branch_times(cubic, u);
    if (set.roots.size() != 2) continue;
    ++used;
    Vec a = characteristic_coefficients(cubic, u).a;
    const double t1 = set.roots[0].t, t2 = set.roots[1].t;
    CHECK(std::fabs(t1 * t2 - a[0]) <= 1e-7 * std::max(1.0, std::fabs(a[0])));
    CHECK(std::fabs(-(t1 + t2) - a[1]) <=
          1e-7 * std::max(1.0, std::fabs(a[1])));
  }
  CHECK(used == 100);
}

TEST_CASE("catastrophe search on the cubic map") {
  CubicMap cubic;
  CatastropheResult r = find_catastrophe(cubic, cubic.search_box());
  CHECK(r.t_c == doctest::Approx(kCubicTc).epsilon(1e-3));
  CHECK(std::fabs(std::fabs(r.u_c[0]) - kCubicUc1) <= 1e-3);
  CHECK(std::fabs(std::fabs(r.u_c[1]) - kCubicUc2) <= 1e-3);
  CHECK(r.branch == 0);
  CHECK(r.n_evals > 0);
  REQUIRE(!r.trace.empty());
  CHECK(r.trace.back().t == doctest::Approx(r.t_c));
  // The physical location follows from the hodograph relation.
  Vec x = x_of(cubic, r.t_c, r.u_c);
  CHECK(r.x_c[0] == doctest::Approx(x[0]));
  CHECK(r.x_c[1] == doctest::Approx(x[1]));

  // Local minimality: nearby points never blow up earlier than t_c - 1e-6.
  std::mt19937 rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    Vec u = r.u_c;
    u[0] += uniform(rng, -1e-4, 1e-4);
    u[1] += uniform(rng, -1e-4, 1e-4);
    auto t = smallest_positive_root(cubic, u);
    if (t) CHECK(*t >= r.t_c - 1e-6);
  }
}

TEST_CASE("catastrophe search on the gaussian map") {
  GaussianMap gauss;
  CatastropheOptions opts;
  opts.grid_per_axis = 80;
  opts.branch = 0;
  CatastropheResult r = find_catastrophe(gauss, gauss.search_box(), opts);
  CHECK(r.t_c == doctest::Approx(0.6425925969).epsilon(1e-3));
  CHECK(r.branch == 0);
  CHECK(r.branch_name == "++");
}

TEST_CASE("blowup-free maps abort the catastrophe search") {
  RotationalMap rot(1.0);
  CHECK(code_of([&] { find_catastrophe(rot, rot.search_box()); }) ==
        errc::no_blowup);
}

TEST_CASE("deterministic catastrophe result") {
  CubicMap cubic;
  CatastropheOptions opts;
  opts.grid_per_axis = 60;
  CatastropheResult a = find_catastrophe(cubic, cubic.search_box(), opts);
  CatastropheResult b = find_catastrophe(cubic, cubic.search_box(), opts);
  CHECK(a.t_c == b.t_c);
  CHECK(a.u_c == b.u_c);
  opts.workers = 3;
  CatastropheResult c = find_catastrophe(cubic, cubic.search_box(), opts);
  CHECK(a.t_c == c.t_c);
  CHECK(a.u_c == c.u_c);
}

TEST_CASE("root-merging locus of the cubic map") {
  CubicMap cubic;
  auto locus = double_root_locus(cubic, cubic.search_box(), 64);
  REQUIRE(!locus.empty());
  CHECK(locus.size() <= 64);
  for (const LocusPoint& p : locus) {
    CHECK(std::fabs(discriminant_2d(cubic, p.u)) <= 1e-8);
    CHECK(std::fabs(cubic_quartic(p.u)) <= 1e-5);
    // On the locus the merged root is -a1/2, i.e. 2 t_b + tr J = 0.
    Mat j = cubic.jacobian(p.u, 0);
    CHECK(std::fabs(2 * p.t_b + j(0, 0) + j(1, 1)) <= 1e-6);
  }
}

TEST_CASE("blowup-free maps have an empty locus") {
  HarmonicMap harm("u1^2 * u2 - u2^3 / 3");
  CHECK(code_of([&] {
          double_root_locus(harm, harm.search_box(), 16);
        }) == errc::empty_locus);
  GaussianMap gauss;
  CHECK(code_of([&] {
          double_root_locus(MapRef(gauss, 0), gauss.search_box(), 16);
        }) == errc::empty_locus);
}

TEST_CASE("triple root detection") {
  LinearMap still(0.0, 3);
  CHECK(triple_root_check(still, {0.1, -0.2, 0.3}));
  LinearMap isotropic(1.0, 3);  // f = u, (t+1)^3
  CHECK(triple_root_check(isotropic, {0.1, -0.2, 0.3}));
  ExprMap diag({"u1", "2*u2", "3*u3"});
  CHECK(!triple_root_check(diag, {0.5, 0.5, 0.5}));
}

}  // TEST_SUITE
