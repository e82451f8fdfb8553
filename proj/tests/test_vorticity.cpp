#include <doctest.h>

#include <cmath>
#include <random>

#include "core/blowup.hpp"
#include "core/builtins.hpp"
#include "core/errors.hpp"
#include "core/hodograph.hpp"
#include "core/vorticity.hpp"
#include "helpers.hpp"

using namespace hodo;
using namespace hodo::testutil;

namespace {

// Independent 3x3 adjugate oracle: explicit cofactors, no shared code with
// the library implementation.
Mat adj3(const Mat& m) {
  auto c = [&](int i, int j) {
    int r1 = (i + 1) % 3, r2 = (i + 2) % 3;
    int c1 = (j + 1) % 3, c2 = (j + 2) % 3;
    if (r1 > r2) std::swap(r1, r2);
    if (c1 > c2) std::swap(c1, c2);
    double minor = m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1);
    return ((i + j) % 2 == 0) ? minor : -minor;
  };
  Mat a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(j, i) = c(i, j);
  return a;
}

Vec wedge_point(std::mt19937& rng) {
  double u1 = uniform(rng, 0.25, 0.95);
  double lo = u1 * u1 * u1;
  double u2 = lo + (u1 - lo) * uniform(rng, 0.1, 0.9);
  return {u1, u2};
}

}  // namespace

TEST_SUITE("vorticity") {

TEST_CASE("vanishing map has zero vorticity") {
  LinearMap still(0.0, 3);
  VorticityRecord rec = vorticity_vector(still, 1.5, {0.1, 0.2, 0.3});
  CHECK(rec.norm == 0.0);
  for (double w : rec.axial) CHECK(w == 0.0);
  CHECK(rec.direction.empty());
}

TEST_CASE("planar rotation block in three dimensions") {
  const double c = 0.8;
  ExprMap map({"0.8*u2", "-0.8*u1", "0"});
  VorticityRecord rec = vorticity_vector(map, 1.0, {0.3, -0.2, 0.5});
  CHECK(rec.axial[0] == doctest::Approx(0.0));
  CHECK(rec.axial[1] == doctest::Approx(0.0));
  CHECK(rec.axial[2] == doctest::Approx(2 * c / (1 + c * c)));

  // Hand-built oracle: D = adj(M)/det, omega_ij = D_ji - D_ij.
  Mat m(3, 3, {1, c, 0, -c, 1, 0, 0, 0, 1});
  Mat a = adj3(m);
  double d = det(m);
  Mat w = vorticity_two_form(map, 1.0, {0.3, -0.2, 0.5});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(w(i, j) == doctest::Approx((a(j, i) - a(i, j)) / d));
  CHECK(rec.axial[2] == doctest::Approx(w(0, 1)));
}

TEST_CASE("stress of the planar rotation block") {
  const double c = 0.8;
  ExprMap map({"0.8*u2", "-0.8*u1", "0"});
  Mat s = stress_tensor(map, 1.0, {0.0, 0.0, 0.0});
  const double g = 2 / (1 + c * c);
  CHECK(s(0, 0) == doctest::Approx(g));
  CHECK(s(1, 1) == doctest::Approx(g));
  CHECK(s(2, 2) == doctest::Approx(2.0));
  CHECK(s(0, 1) == doctest::Approx(0.0));

  LinearMap still(0.0, 3);
  Mat si = stress_tensor(still, 2.0, {0.0, 0.0, 0.0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(si(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("rotational scalar vorticity") {
  std::mt19937 rng(109);
  for (double alpha : {0.5, 1.0, 2.0}) {
    RotationalMap rot(alpha);
    for (int trial = 0; trial < 30; ++trial) {
      double t = uniform(rng, 0.0, 10.0);
      Vec u = random_vec(rng, 2, -1.0, 1.0);
      double want = 2 * alpha / (alpha * alpha * t * t + 1);
      CHECK(std::fabs(vorticity_scalar_2d(rot, t, u) - want) <= 1e-12);
    }
  }
}

TEST_CASE("cubic scalar vorticity numerator") {
  CubicMap cubic;
  std::mt19937 rng(113);
  for (int trial = 0; trial < 50; ++trial) {
    Vec u = random_vec(rng, 2, -3.0, 3.0);
    double t = uniform(rng, -1.0, 1.0);
    HodographMatrix mh = build_matrix(cubic, t, u);
    if (std::fabs(mh.det) < 1e-6) continue;
    double want = (3.0 - 2.0 / 3.0 * u[0] * u[1]) / mh.det;
    CHECK(vorticity_scalar_2d(cubic, t, u) ==
          doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("linear maps are irrotational") {
  LinearMap lin(1.0, 2);
  std::mt19937 rng(127);
  for (int trial = 0; trial < 20; ++trial) {
    Vec u = random_vec(rng, 2, -2.0, 2.0);
    CHECK(std::fabs(vorticity_scalar_2d(lin, uniform(rng, 0.0, 3.0), u)) <=
          1e-15);
  }
}

TEST_CASE("harmonic scalar vorticity") {
  // f = (W_2, W_1): numerator W_22 - W_11 = -2 W_11 for harmonic W.
  HarmonicMap map("u1^2 * u2 - u2^3 / 3");
  std::mt19937 rng(131);
  for (int trial = 0; trial < 30; ++trial) {
    Vec u = random_vec(rng, 2, -1.5, 1.5);
    double t = uniform(rng, 0.0, 2.0);
    HodographMatrix mh = build_matrix(map, t, u);
    double want = -4 * u[1] / mh.det;  // W_11 = 2 u2
    CHECK(vorticity_scalar_2d(map, t, u) ==
          doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("analytic class vorticity from the complex derivative") {
  Analytic2DMap map("V^2");
  std::mt19937 rng(137);
  for (int trial = 0; trial < 30; ++trial) {
    Vec u = random_vec(rng, 2, -1.0, 1.0);
    double t = uniform(rng, 0.2, 2.0);
    std::complex<double> fp(2 * u[0], 2 * u[1]);
    double denom = std::norm(t + fp);
    if (denom < 1e-6) continue;
    CHECK(vorticity_scalar_2d(map, t, u) ==
          doctest::Approx(-2 * fp.imag() / denom).epsilon(1e-10));
  }
}

TEST_CASE("vorticity rejects the wrong dimension and the surface itself") {
  CubicMap cubic;
  CHECK(code_of([&] { vorticity_vector(cubic, 0.0, {1.0, 1.0}); }) ==
        errc::invalid_argument);
  Vec u{2.0, 2.0};
  double t = branch_times(cubic, u).roots[0].t;
  CHECK(code_of([&] { vorticity_scalar_2d(cubic, t, u); }) == errc::singular);
}

TEST_CASE("two-form is antisymmetric and decomposes with the stress") {
  CubicMap cubic;
  GaussianMap gauss;
  ExprMap shear({"u1 + u2", "u2 + u3", "u3"});
  std::mt19937 rng(139);
  auto check_point = [&](MapRef map, double t, const Vec& u) {
    HodographMatrix mh = build_matrix(map, t, u);
    if (std::fabs(mh.det) < 1e-6) return;
    Mat w = vorticity_two_form(map, t, u);
    Mat s = stress_tensor(map, t, u);
    Mat dt = derivatives_from_inverse(mh).transpose();
    const std::size_t n = map.dim();
    double scale = std::max(1.0, dt.max_abs());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(w(i, j) == -w(j, i));  // exact by construction
        CHECK(std::fabs(s(i, j) - s(j, i)) <= 1e-15 * scale);
        CHECK(std::fabs(s(i, j) + w(i, j) - 2 * dt(i, j)) <= 1e-12 * scale);
      }
  };
  for (int trial = 0; trial < 40; ++trial) {
    check_point(cubic, uniform(rng, -1.0, 1.0), random_vec(rng, 2, -2.0, 2.0));
    check_point(shear, uniform(rng, 0.5, 2.0), random_vec(rng, 3, -1.0, 1.0));
    check_point(MapRef(gauss, 0), uniform(rng, 0.0, 0.3), wedge_point(rng));
  }
}

TEST_CASE("gradient maps carry no vorticity") {
  // f = grad phi has a symmetric Jacobian, so the two-form vanishes.
  ExprMap grad3({"2*u1*u2", "u1^2", "cos(u3)"});
  ExprMap grad2({"2*u1 + u2", "u1 + 4*u2^3"});
  std::mt19937 rng(149);
  for (int trial = 0; trial < 50; ++trial) {
    Mat w3 = vorticity_two_form(grad3, uniform(rng, 0.5, 2.0),
                                random_vec(rng, 3, -1.0, 1.0));
    Mat w2 = vorticity_two_form(grad2, uniform(rng, 0.5, 2.0),
                                random_vec(rng, 2, -1.0, 1.0));
    CHECK(w3.max_abs() <= 1e-14);
    CHECK(w2.max_abs() <= 1e-14);
  }
}

TEST_CASE("four-dimensional rotation block") {
  ExprMap map({"0.6*u2", "-0.6*u1", "0", "0"});
  const double c = 0.6;
  Mat w = vorticity_two_form(map, 1.0, {0.1, 0.2, 0.3, 0.4});
  CHECK(w(0, 1) == doctest::Approx(2 * c / (1 + c * c)));
  CHECK(w(1, 0) == doctest::Approx(-2 * c / (1 + c * c)));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!((i == 0 && j == 1) || (i == 1 && j == 0)))
        CHECK(std::fabs(w(i, j)) <= 1e-14);
}

TEST_CASE("residue coefficients at cubic blowup times") {
  CubicMap cubic;
  std::mt19937 rng(151);
  int used = 0;
  for (int trial = 0; trial < 300 && used < 50; ++trial) {
    Vec u = random_vec(rng, 2, -3.0, 3.0);
    auto set = branch_times(cubic, u);
    if (set.roots.size() != 2) continue;
    double raw = discriminant_2d(cubic, u);
    if (raw < 0.5) continue;  // keep the roots well separated
    ++used;
    const double numer = 3.0 - 2.0 / 3.0 * u[0] * u[1];
    for (int k = 0; k < 2; ++k) {
      SigmaCoeffs sc = sigma_coefficients(cubic, u, set.roots[k].t);
      REQUIRE(sc.sigma.size() == 1);
      // Residue of a simple pole: numerator over d/dt det.
      CHECK(sc.sigma[0] * sc.d1 == doctest::Approx(numer).epsilon(1e-8));
      CHECK(sc.d1 == doctest::Approx(set.roots[k].d1).epsilon(1e-9));
    }
    // Closed form at the lower root: (2 u1 u2 - 9) / (3 sqrt(9 raw / 9)).
    SigmaCoeffs lo = sigma_coefficients(cubic, u, set.roots[0].t);
    double want = (2 * u[0] * u[1] - 9.0) / (3.0 * std::sqrt(raw));
    CHECK(lo.sigma[0] == doctest::Approx(want).epsilon(1e-7));
    SigmaCoeffs hi = sigma_coefficients(cubic, u, set.roots[1].t);
    CHECK(hi.sigma[0] == doctest::Approx(-want).epsilon(1e-7));
  }
  CHECK(used == 50);
}

// The cubic map's root-merging locus crosses u = (0, 72^(1/4)) exactly; the
// merged root there is -a1/2 and the vorticity numerator stays at 3.
static Vec cubic_locus_point() { return {0.0, std::pow(72.0, 0.25)}; }

TEST_CASE("residue at a merged root is rejected") {
  CubicMap cubic;
  Vec u = cubic_locus_point();
  double t_b = -characteristic_coefficients(cubic, u).a[1] / 2;
  CHECK(code_of([&] { sigma_coefficients(cubic, u, t_b); }) ==
        errc::degenerate);
}

TEST_CASE("gaussian residue at the catastrophe point") {
  GaussianMap gauss;
  CatastropheOptions opts;
  opts.grid_per_axis = 80;
  opts.branch = 0;
  CatastropheResult r = find_catastrophe(gauss, gauss.search_box(), opts);
  SigmaCoeffs sc = sigma_coefficients(MapRef(gauss, 0), r.u_c, r.t_c);
  REQUIRE(sc.sigma.size() == 1);
  CHECK(sc.sigma[0] == doctest::Approx(-0.270466).epsilon(1e-2));
}

TEST_CASE("temporal degrees of the cubic map") {
  CubicMap cubic;
  auto degrees = temporal_blowup_order(cubic, {2.0, 2.0});
  REQUIRE(degrees.size() == 2);
  for (const auto& d : degrees) {
    CHECK(d.rank == 1);
    CHECK(d.degree == 1);
    REQUIRE(d.component_degrees.size() == 1);
    CHECK(d.component_degrees[0] == 1);
  }

  // On the root-merging locus the denominator gains a square but the
  // numerator stays away from zero, so the degree doubles.
  auto at = temporal_blowup_order(cubic, cubic_locus_point());
  bool found = false;
  for (const auto& d : at)
    if (d.root.multiplicity == 2) {
      found = true;
      CHECK(d.rank == 1);
      CHECK(d.degree == 2);
    }
  CHECK(found);
}

TEST_CASE("isotropic map stays bounded, the shear map does not") {
  // f = u: rank(M) = 0 at the triple root, the adjugate is symmetric, and
  // the vorticity is identically zero, so the reported degree is 0.
  LinearMap isotropic(1.0, 3);
  auto iso = temporal_blowup_order(isotropic, {0.2, -0.1, 0.4});
  REQUIRE(iso.size() == 1);
  CHECK(iso[0].root.multiplicity == 3);
  CHECK(iso[0].rank == 0);
  CHECK(iso[0].degree == 0);
  std::mt19937 rng(157);
  for (int trial = 0; trial < 20; ++trial) {
    Mat w = vorticity_two_form(isotropic, uniform(rng, -0.9, 2.0),
                               random_vec(rng, 3, -1.0, 1.0));
    CHECK(w.max_abs() == 0.0);
  }

  // The nilpotent shear has the same (t+1)^3 determinant but rank 2 at the
  // root: one axial component keeps the full third-order divergence.
  ExprMap shear({"u1 + u2", "u2 + u3", "u3"});
  auto sh = temporal_blowup_order(shear, {0.2, -0.1, 0.4});
  REQUIRE(sh.size() == 1);
  CHECK(sh[0].root.t == doctest::Approx(-1.0));
  CHECK(sh[0].root.multiplicity == 3);
  CHECK(sh[0].rank == 2);
  CHECK(sh[0].degree == 3);
  REQUIRE(sh[0].component_degrees.size() == 3);
  CHECK(sh[0].component_degrees[0] == 2);
  CHECK(sh[0].component_degrees[1] == 3);
  CHECK(sh[0].component_degrees[2] == 2);
}

TEST_CASE("temporal exponent fits") {
  CubicMap cubic;
  ExponentFit generic = fit_temporal_exponent(cubic, {2.0, 2.0},
                                              branch_times(cubic, {2.0, 2.0})
                                                  .roots[0]
                                                  .t);
  CHECK(std::fabs(generic.slope + 1.0) <= 0.03);
  CHECK(generic.n_points >= 8);

  Vec u_loc = cubic_locus_point();
  double t_loc = -characteristic_coefficients(cubic, u_loc).a[1] / 2;
  ExponentFit merged = fit_temporal_exponent(cubic, u_loc, t_loc);
  CHECK(std::fabs(merged.slope + 2.0) <= 0.05);

  ExprMap shear({"u1 + u2", "u2 + u3", "u3"});
  ExponentFit cube = fit_temporal_exponent(shear, {0.2, -0.1, 0.4}, -1.0);
  CHECK(std::fabs(cube.slope + 3.0) <= 0.1);
}

TEST_CASE("temporal exponent error paths") {
  RotationalMap rot(1.0);
  CHECK(code_of([&] {
          fit_temporal_exponent(rot, {0.3, 0.4}, 1.0);
        }) == errc::no_blowup);

  LinearMap isotropic(1.0, 3);
  CHECK(code_of([&] {
          fit_temporal_exponent(isotropic, {0.2, -0.1, 0.4}, -1.0);
        }) == errc::zero_vorticity);

  // Three roots 5e-3 apart: with a 1e-3 window the middle one has no clean
  // side and the outer ones fit away from the cluster.
  ExprMap tri({"-u1 + 0.3*u2", "-1.005*u2 + 0.3*u3", "-0.995*u3"});
  Vec u{0.1, 0.1, 0.1};
  FitWindow tight{1e-6, 1e-3, 16};
  CHECK(code_of([&] {
          fit_temporal_exponent(tri, u, 1.0, tight);
        }) == errc::window);
  ExponentFit top = fit_temporal_exponent(tri, u, 1.005, tight);
  CHECK(top.side == +1);
  CHECK(std::fabs(top.slope + 1.0) <= 0.05);
  ExponentFit bottom = fit_temporal_exponent(tri, u, 0.995, tight);
  CHECK(bottom.side == -1);
  CHECK(std::fabs(bottom.slope + 1.0) <= 0.05);
}

TEST_CASE("synthetic laurent fits") {
  auto omega = [](double t) { return 2.0 / (t - 5.0) + 3.0; };
  LaurentFit above = laurent_fit_fn(omega, 5.0, 1, +1);
  REQUIRE(above.coeffs.size() == 3);
  CHECK(above.coeffs[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(above.coeffs[1] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(std::fabs(above.coeffs[2]) <= 1e-8);
  CHECK(above.side == +1);

  // From below the expansion variable flips sign: omega = -2/s + 3.
  LaurentFit below = laurent_fit_fn(omega, 5.0, 1, -1);
  CHECK(below.coeffs[0] == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(below.coeffs[1] == doctest::Approx(3.0).epsilon(1e-10));

  // An analytic function has no pole part.
  auto smooth = [](double t) { return 2.0 / (t * t + 1.0); };
  LaurentFit s = laurent_fit_fn(smooth, 3.0, 1, +1);
  CHECK(std::fabs(s.coeffs[0]) <= 1e-4);
  CHECK(s.coeffs[1] == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("laurent residue matches sigma on the surface") {
  CubicMap cubic;
  GaussianMap gauss;
  std::mt19937 rng(163);
  int used = 0;
  while (used < 30) {
    Vec u = random_vec(rng, 2, -3.0, 3.0);
    auto set = branch_times(cubic, u);
    if (set.roots.size() != 2 || discriminant_2d(cubic, u) < 1.0) continue;
    ++used;
    double t_b = set.roots[0].t;
    LaurentFit lf = laurent_fit(cubic, u, t_b);
    SigmaCoeffs sc = sigma_coefficients(cubic, u, t_b);
    CHECK(lf.side == -1);
    // Below the root s = t_b - t, so the pole coefficient is -sigma.
    CHECK(lf.coeffs[0] ==
          doctest::Approx(-sc.sigma[0]).epsilon(1e-6));
  }
  for (int trial = 0; trial < 30; ++trial) {
    Vec u = wedge_point(rng);
    auto set = branch_times(MapRef(gauss, 0), u);
    REQUIRE(set.roots.size() == 2);
    double t_b = set.roots[0].t;
    LaurentFit lf = laurent_fit(MapRef(gauss, 0), u, t_b);
    SigmaCoeffs sc = sigma_coefficients(MapRef(gauss, 0), u, t_b);
    CHECK(lf.coeffs[0] ==
          doctest::Approx(-sc.sigma[0]).epsilon(1e-6));
  }
}

TEST_CASE("laurent order must cover the pole") {
  CubicMap cubic;
  Vec u = cubic_locus_point();
  double t_b = -characteristic_coefficients(cubic, u).a[1] / 2;
  CHECK(code_of([&] { laurent_fit(cubic, u, t_b, 1); }) == errc::degenerate);
  // Double pole with u1*u2 = 0: omega = 3 / (t - t_b)^2 up to the residual
  // root splitting, far below the window.
  LaurentFit lf = laurent_fit(cubic, u, t_b, 2);
  REQUIRE(lf.coeffs.size() == 4);
  CHECK(lf.coeffs[0] == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(std::fabs(lf.coeffs[1]) < 1e-2);

  // J = [[0,1],[0,0]]: det M = t^2 exactly and omega = 1/t^2, so an order-2
  // fit recovers the coefficients to machine precision.
  ExprMap nil({"u2", "0"});
  Vec u0{0.3, -0.2};
  CHECK(code_of([&] { laurent_fit(nil, u0, 0.0, 1); }) == errc::degenerate);
  LaurentFit exact = laurent_fit(nil, u0, 0.0, 2);
  CHECK(exact.side == -1);
  REQUIRE(exact.coeffs.size() == 4);
  CHECK(exact.coeffs[0] == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t j = 1; j < 4; ++j)
    CHECK(std::fabs(exact.coeffs[j]) < 1e-6);
}

TEST_CASE("blowup direction with degenerate components") {
  DirectionInfo d = direction_from_sigma({3.0, 4.0, 0.0}, 1e-8);
  CHECK(d.direction[0] == doctest::Approx(0.6));
  CHECK(d.direction[1] == doctest::Approx(0.8));
  CHECK(d.direction[2] == 0.0);
  REQUIRE(d.subdominant.size() == 1);
  CHECK(d.subdominant[0] == 2);

  DirectionInfo z = direction_from_sigma({0.0, 0.0, 5.0}, 1e-8);
  CHECK(z.direction[2] == doctest::Approx(1.0));
  CHECK(z.subdominant.size() == 2);

  CHECK(code_of([] { direction_from_sigma({0.0, 0.0, 0.0}, 1e-8); }) ==
        errc::zero_vorticity);
}

TEST_CASE("pointwise direction of a rotational flow") {
  RotationalMap rot(1.5);
  // 2D record: the axial part is the single component omega_3 > 0.
  double w = vorticity_scalar_2d(rot, 0.7, {0.2, 0.1});
  CHECK(w > 0.0);
}

}  // TEST_SUITE
