#include <doctest.h>

#include <cmath>
#include <random>

#include "core/builtins.hpp"
#include "core/errors.hpp"
#include "core/mapspec.hpp"
#include "helpers.hpp"

using namespace hodo;
using namespace hodo::testutil;

namespace {

void check_jacobian_against_fd(const InitialMap& map, const Vec& u, int branch,
                               double tol) {
  Mat sym = map.jacobian(u, branch);
  Mat fd = fd_jacobian(map, u, branch);
  CHECK(max_abs_diff(sym, fd) <= tol * std::max(1.0, sym.max_abs()));
}

void check_hessian_against_fd(const InitialMap& map, const Vec& u, int branch,
                              double tol) {
  auto sym = map.hessian(u, branch);
  auto fd = fd_hessian(map, u, branch);
  REQUIRE(sym.size() == fd.size());
  for (std::size_t i = 0; i < sym.size(); ++i)
    CHECK(max_abs_diff(sym[i], fd[i]) <= tol * std::max(1.0, sym[i].max_abs()));
}

}  // namespace

TEST_SUITE("maps") {

TEST_CASE("linear map") {
  LinearMap map(1.5, 3);
  CHECK(map.dim() == 3);
  Vec u{1.0, -2.0, 0.5};
  Vec f = map.f(u, 0);
  CHECK(f[0] == doctest::Approx(1.5));
  CHECK(f[1] == doctest::Approx(-3.0));
  CHECK(f[2] == doctest::Approx(0.75));
  Mat j = map.jacobian(u, 0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(j(i, k) == doctest::Approx(i == k ? 1.5 : 0.0));
  REQUIRE(map.has_initial_data());
  Vec u0 = map.initial_data({3.0, -1.5, 0.0});
  CHECK(u0[0] == doctest::Approx(2.0));
  CHECK(u0[1] == doctest::Approx(-1.0));
  for (const Mat& h : map.hessian(u, 0)) CHECK(h.max_abs() <= 1e-12);
}

TEST_CASE("rotational map") {
  RotationalMap map(2.0);
  Vec u{0.4, -0.6};
  Vec f = map.f(u, 0);
  CHECK(f[0] == doctest::Approx(-0.3));   // u2 / alpha
  CHECK(f[1] == doctest::Approx(-0.2));   // -u1 / alpha
  Mat j = map.jacobian(u, 0);
  CHECK(j(0, 0) == doctest::Approx(0.0));
  CHECK(j(0, 1) == doctest::Approx(0.5));
  CHECK(j(1, 0) == doctest::Approx(-0.5));
  CHECK(j(1, 1) == doctest::Approx(0.0));
  // At t = 0, x = f(u), so the initial data inverts f.
  Vec x{0.7, 0.2};
  Vec u0 = map.initial_data(x);
  Vec back = map.f(u0, 0);
  CHECK(back[0] == doctest::Approx(x[0]));
  CHECK(back[1] == doctest::Approx(x[1]));
}

TEST_CASE("cubic map values at (1,1)") {
  CubicMap map;
  Vec u{1.0, 1.0};
  Vec f = map.f(u, 0);
  CHECK(f[0] == doctest::Approx(-1.0 / 3 - 2.0 / 3 + 2.0));
  CHECK(f[1] == doctest::Approx(-1.0 / 3 - 1.0 / 3 - 1.0));
  Mat j = map.jacobian(u, 0);
  CHECK(j(0, 0) == doctest::Approx(-5.0 / 3));
  CHECK(j(0, 1) == doctest::Approx(2.0 / 3));
  CHECK(j(1, 0) == doctest::Approx(-5.0 / 3));
  CHECK(j(1, 1) == doctest::Approx(-4.0 / 3));
}

TEST_CASE("harmonic map derives from its potential") {
  HarmonicMap map("(u2^2 - u1^2) / 2");
  Vec u{0.3, 0.8};
  Vec f = map.f(u, 0);
  CHECK(f[0] == doctest::Approx(0.8));    // dW/du2
  CHECK(f[1] == doctest::Approx(-0.3));   // dW/du1
  Mat j = map.jacobian(u, 0);
  CHECK(j(0, 0) == doctest::Approx(0.0));
  CHECK(j(0, 1) == doctest::Approx(1.0));
  CHECK(j(1, 0) == doctest::Approx(-1.0));
  CHECK(j(1, 1) == doctest::Approx(0.0));
  CHECK(map.w_source() == "(u2^2 - u1^2) / 2");

  HarmonicMap cubic_w("u1^2 * u2 - u2^3 / 3");
  Vec v{0.5, -0.4};
  Mat jc = cubic_w.jacobian(v, 0);
  // f1 = u1^2 - u2^2, f2 = 2 u1 u2.
  CHECK(jc(0, 0) == doctest::Approx(2 * v[0]));
  CHECK(jc(0, 1) == doctest::Approx(-2 * v[1]));
  CHECK(jc(1, 0) == doctest::Approx(2 * v[1]));
  CHECK(jc(1, 1) == doctest::Approx(2 * v[0]));
}

TEST_CASE("gaussian map wedge and branches") {
  GaussianMap map;
  CHECK(map.branch_count() == 4);
  CHECK(map.branch_name(0) == "++");
  CHECK(map.branch_name(1) == "+-");
  CHECK(map.branch_name(2) == "-+");
  CHECK(map.branch_name(3) == "--");

  CHECK(map.in_domain({0.5, 0.2}, 0));    // u1^3 = 0.125 <= 0.2 <= 0.5
  CHECK(!map.in_domain({0.5, 0.1}, 0));   // below the lower wedge edge
  CHECK(!map.in_domain({0.5, 0.6}, 0));   // above the upper wedge edge
  CHECK(!map.in_domain({1.2, 0.9}, 0));   // outside (0,1]
  CHECK(!map.in_domain({-0.1, 0.5}, 0));

  Vec u{0.5, 0.2};
  const double f1 = std::sqrt(0.5 * std::log(0.2 / 0.125));
  const double f2 = std::sqrt(0.5 * std::log(0.5 / 0.2));
  for (int b = 0; b < 4; ++b) {
    auto [a, c] = GaussianMap::signs(b);
    Vec f = map.f(u, b);
    CHECK(f[0] == doctest::Approx(a * f1));
    CHECK(f[1] == doctest::Approx(c * f2));
  }
}

TEST_CASE("gaussian initial data inverts the map") {
  GaussianMap map;
  REQUIRE(map.has_initial_data());
  std::mt19937 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    Vec x = random_vec(rng, 2, -1.2, 1.2);
    Vec u0 = map.initial_data(x);
    CHECK(u0[0] == doctest::Approx(std::exp(-x[0] * x[0] - x[1] * x[1])));
    CHECK(u0[1] == doctest::Approx(std::exp(-x[0] * x[0] - 3 * x[1] * x[1])));
    CHECK(map.in_domain(u0, 0));
    // The branch whose signs match the quadrant of x recovers x = f(u0).
    int b = (x[0] >= 0 ? 0 : 2) + (x[1] >= 0 ? 0 : 1);
    Vec back = map.f(u0, b);
    CHECK(back[0] == doctest::Approx(x[0]).epsilon(1e-9));
    CHECK(back[1] == doctest::Approx(x[1]).epsilon(1e-9));
    CHECK(map.branch_admits(x, u0, 0.0, b));
  }
}

TEST_CASE("analytic map tracks its complex derivative") {
  Analytic2DMap map("V^2");
  Vec u{0.6, -0.3};
  Vec f = map.f(u, 0);
  CHECK(f[0] == doctest::Approx(u[0] * u[0] - u[1] * u[1]));
  CHECK(f[1] == doctest::Approx(2 * u[0] * u[1]));
  auto fp = map.f_prime(u);
  CHECK(fp.real() == doctest::Approx(2 * u[0]));
  CHECK(fp.imag() == doctest::Approx(2 * u[1]));
  // Cauchy-Riemann structure of the Jacobian.
  Mat j = map.jacobian(u, 0);
  CHECK(j(0, 0) == doctest::Approx(fp.real()));
  CHECK(j(1, 1) == doctest::Approx(fp.real()));
  CHECK(j(0, 1) == doctest::Approx(-fp.imag()));
  CHECK(j(1, 0) == doctest::Approx(fp.imag()));
}

TEST_CASE("expression map with three components") {
  ExprMap map({"u1 * u2", "u1 + u3^2", "sin(u3)"});
  CHECK(map.dim() == 3);
  Vec u{0.5, 2.0, 0.3};
  Vec f = map.f(u, 0);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(0.59));
  CHECK(f[2] == doctest::Approx(std::sin(0.3)));
  check_jacobian_against_fd(map, u, 0, 1e-6);
}

TEST_CASE("analytic jacobians agree with finite differences") {
  std::mt19937 rng(53);
  CubicMap cubic;
  RotationalMap rot(1.0);
  HarmonicMap harm("exp(u1) * cos(u2)");
  Analytic2DMap analytic("V^3 - V");
  for (int trial = 0; trial < 30; ++trial) {
    Vec u = random_vec(rng, 2, -1.5, 1.5);
    check_jacobian_against_fd(cubic, u, 0, 1e-6);
    check_jacobian_against_fd(rot, u, 0, 1e-6);
    check_jacobian_against_fd(harm, u, 0, 1e-6);
    check_jacobian_against_fd(analytic, u, 0, 1e-6);
  }
  GaussianMap gauss;
  for (int trial = 0; trial < 30; ++trial) {
    // Interior wedge samples, away from the square-root edges.
    double u1 = uniform(rng, 0.3, 0.9);
    double lo = u1 * u1 * u1, hi = u1;
    double u2 = lo + (hi - lo) * uniform(rng, 0.2, 0.8);
    for (int b = 0; b < 4; ++b)
      check_jacobian_against_fd(gauss, {u1, u2}, b, 1e-5);
  }
}

TEST_CASE("analytic hessians agree with finite differences") {
  std::mt19937 rng(59);
  CubicMap cubic;
  HarmonicMap harm("u1^3 - 3 * u1 * u2^2");
  for (int trial = 0; trial < 20; ++trial) {
    Vec u = random_vec(rng, 2, -1.5, 1.5);
    check_hessian_against_fd(cubic, u, 0, 1e-4);
    check_hessian_against_fd(harm, u, 0, 1e-4);
  }
  GaussianMap gauss;
  for (int trial = 0; trial < 10; ++trial) {
    double u1 = uniform(rng, 0.3, 0.9);
    double lo = u1 * u1 * u1, hi = u1;
    double u2 = lo + (hi - lo) * uniform(rng, 0.3, 0.7);
    check_hessian_against_fd(gauss, {u1, u2}, 0, 1e-3);
  }
}

TEST_CASE("map from shorthand spec") {
  auto cubic = map_from_spec("cubic");
  CHECK(cubic->name() == "cubic");
  CHECK(cubic->dim() == 2);

  auto rot = map_from_spec("rotational:alpha=2");
  Mat j = rot->jacobian({0.0, 0.0}, 0);
  CHECK(j(0, 1) == doctest::Approx(0.5));

  auto harm = map_from_spec("harmonic:W=(u2^2-u1^2)/2");
  Vec f = harm->f({0.25, 0.75}, 0);
  CHECK(f[0] == doctest::Approx(0.75));

  CHECK(code_of([] { map_from_spec("nosuch"); }) == errc::config);
  CHECK(code_of([] { map_from_spec("rotational:alpha"); }) == errc::config);
  CHECK(code_of([] { map_from_spec("cubic:extra=1"); }) == errc::config);
  CHECK(code_of([] { map_from_spec("linear"); }) == errc::config);  // missing beta
}

TEST_CASE("map from JSON") {
  auto rot = map_from_json(R"({"dim": 2, "builtin": "rotational",
                               "params": {"alpha": 1.0}})");
  CHECK(rot->name() == "rotational");

  auto linear3 = map_from_json(R"({"dim": 3, "builtin": "linear",
                                   "params": {"beta": 2.0}})");
  CHECK(linear3->dim() == 3);
  CHECK(linear3->f({1.0, 1.0, 1.0}, 0)[2] == doctest::Approx(2.0));

  auto em = map_from_json(R"({"expr": ["u2", "-u1"],
                              "box": [[-2, 2], [-2, 2]]})");
  CHECK(em->dim() == 2);
  CHECK(em->search_box().hi[0] == doctest::Approx(2.0));

  CHECK(code_of([] { map_from_json("{not json"); }) == errc::parse);
  CHECK(code_of([] {
          map_from_json(R"({"builtin": "cubic", "bogus": 1})");
        }) == errc::config);
  CHECK(code_of([] { map_from_json(R"({"dim": 2})"); }) == errc::config);
  CHECK(code_of([] {
          map_from_json(R"({"builtin": "cubic", "expr": ["u1"]})");
        }) == errc::config);
}

TEST_CASE("default search boxes have the right shape") {
  CubicMap cubic;
  Box b = cubic.search_box();
  REQUIRE(b.dim() == 2);
  CHECK(b.lo[0] < b.hi[0]);
  GaussianMap gauss;
  Box g = gauss.search_box();
  CHECK(g.lo[0] > 0.0);
  CHECK(g.hi[1] <= 1.0);
}

}  // TEST_SUITE
