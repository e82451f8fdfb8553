#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "core/builtins.hpp"
#include "core/errors.hpp"
#include "core/serialize.hpp"
#include "helpers.hpp"

using namespace hodo;
using hodo::testutil::code_of;
using hodo::testutil::max_abs_diff;
using nlohmann::json;

TEST_SUITE("serialize") {

TEST_CASE("doubles survive the text round trip") {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e300, 5e-324, -2.5,
                   123456789.123456789}) {
    CAPTURE(v);
    CHECK(std::stod(fmt_double(v)) == v);
  }
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(-0.5) == "-0.5");
}

TEST_CASE("catastrophe report round trips through json") {
  CatastropheResult r;
  r.t_c = 1.5;
  r.u_c = {0.25, -1.0};
  r.x_c = {2.0, 3.0};
  r.branch = 2;
  r.branch_name = "-+";
  r.n_evals = 12345;
  json j = json::parse(catastrophe_json(r));
  CHECK(j["t_c"] == 1.5);
  CHECK(j["u_c"] == json::array({0.25, -1.0}));
  CHECK(j["x_c"] == json::array({2.0, 3.0}));
  CHECK(j["branch"] == 2);
  CHECK(j["branch_name"] == "-+");
  CHECK(j["n_evals"] == 12345);
}

TEST_CASE("laurent report lists the powers") {
  LaurentFit lf;
  lf.order = 2;
  lf.side = -1;
  lf.coeffs = {1.0, 0.0, 0.25, 0.0};
  lf.uncertainty = {1e-9, 1e-9, 1e-9, 1e-9};
  lf.residual = 1e-12;
  lf.n_points = 16;
  json j = json::parse(laurent_json(lf));
  CHECK(j["powers"] == json::array({-2, -1, 0, 1}));
  CHECK(j["coeffs"].size() == 4);
  CHECK(j["coeffs"][0] == 1.0);
  CHECK(j["side"] == -1);
  CHECK(j["n_points"] == 16);
}

TEST_CASE("frame report carries the stacks") {
  ExprMap diag({"2*u1", "3*u2", "4*u3"});
  AdaptedFrame f = build_frame(diag, {0.5, 0.5, 0.5}, -3.0);
  json j = json::parse(frame_json(f));
  CHECK(j["rank"] == 2);
  CHECK(j["R"].size() == 1);
  CHECK(j["L"].size() == 1);
  CHECK(j["R_tilde"].size() == 2);
  CHECK(j["P_tilde"].size() == 2);
  CHECK(j["q"].size() == 3);
  CHECK(j["q"][0][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["t_b"] == -3.0);
}

TEST_CASE("non-finite slopes become json nulls") {
  SpatialFit f;
  f.omega_slope = -0.5;
  f.v_slopes = Mat(2, 2);
  f.v_errs = Mat(2, 2);
  f.v_slopes(0, 1) = std::numeric_limits<double>::quiet_NaN();
  f.ray = {1.0, 0.0};
  json j = json::parse(spatial_fit_json(f));
  CHECK(j["omega_slope"] == -0.5);
  CHECK(j["v_slopes"][0][1].is_null());
  CHECK(j["v_slopes"][0][0] == 0.0);
}

TEST_CASE("surface csv layout") {
  std::vector<BlowupBranchSet> sets(2);
  sets[0].u = {1.0, 2.0};
  sets[0].roots = {{3.0, 1, 0.5, 0.25}, {5.5, 2, 0.0, 1.0}};
  sets[1].u = {0.0, 1.0};

  std::ostringstream with_labels;
  write_surface_csv(with_labels, sets, {"a", "b"});
  CHECK(with_labels.str() ==
        "u1,u2,label,t,multiplicity\n"
        "1,2,a,3,1\n"
        "1,2,a,5.5,2\n"
        "0,1,b,,\n");

  std::ostringstream plain;
  write_surface_csv(plain, sets, {});
  CHECK(plain.str() ==
        "u1,u2,t,multiplicity\n"
        "1,2,3,1\n"
        "1,2,5.5,2\n"
        "0,1,,\n");
}

TEST_CASE("locus and series and exponent csv layouts") {
  std::ostringstream locus;
  write_locus_csv(locus, {{{0.25, -1.0}, 1.5, 1e-12}});
  CHECK(locus.str() == "u1,u2,t_b\n0.25,-1,1.5\n");

  std::ostringstream empty_locus;
  write_locus_csv(empty_locus, {});
  CHECK(empty_locus.str().empty());

  std::ostringstream series;
  write_series_csv(series, {"w1", "w2"}, {0.0, 0.5},
                   {{1.0, 2.0}, {3.0, 4.0}});
  CHECK(series.str() == "t,w1,w2\n0,1,2\n0.5,3,4\n");

  std::ostringstream expo;
  ExponentRow row;
  row.u = {1.0, 2.0};
  row.t_b = 2.5;
  row.slope = -0.5;
  row.slope_err = 0.01;
  row.level = 2;
  write_exponent_csv(expo, {row});
  CHECK(expo.str() == "u1,u2,t_b,slope,stderr,level\n1,2,2.5,-0.5,0.01,2\n");
}

TEST_CASE("grid csv masks failures") {
  LinearMap iso(1.0, 2);
  GridSpec spec{{0.0, 0.0}, {1.0, 1.0}, {2, 2}};
  FieldGrid bad = solve_grid(iso, spec, -1.0);
  std::ostringstream os;
  write_grid_csv(os, bad);
  std::istringstream lines(os.str());
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "x1,x2,u1,u2,branch,mask");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 2) == ",1");  // every cell masked
  }
  CHECK(rows == 4);
}

TEST_CASE("grid binary round trip") {
  RotationalMap rot(1.0);
  GridSpec spec{{-1.0, 0.0}, {1.0, 0.5}, {3, 2}};
  FieldGrid grid = solve_grid(rot, spec, 0.6);
  REQUIRE(grid.masked_count() == 0);

  std::stringstream buf;
  write_grid_binary(buf, grid);
  FieldGrid back = read_grid_binary(buf);

  CHECK(back.spec.lo == grid.spec.lo);
  CHECK(back.spec.hi == grid.spec.hi);
  CHECK(back.spec.count == grid.spec.count);
  CHECK(back.t == grid.t);
  REQUIRE(back.samples.size() == grid.samples.size());
  for (std::size_t k = 0; k < grid.samples.size(); ++k) {
    CHECK(back.samples[k].u == grid.samples[k].u);  // bitwise
    CHECK(back.samples[k].x == grid.samples[k].x);
    CHECK(back.samples[k].branch == grid.samples[k].branch);
    CHECK(back.samples[k].ok() == grid.samples[k].ok());
  }
}

TEST_CASE("grid binary rejects corrupt streams") {
  RotationalMap rot(1.0);
  GridSpec spec{{-1.0, 0.0}, {1.0, 0.5}, {2, 2}};
  FieldGrid grid = solve_grid(rot, spec, 0.6);
  std::stringstream buf;
  write_grid_binary(buf, grid);
  const std::string good = buf.str();

  std::istringstream bad_magic("NOTAGRID" + good.substr(8));
  CHECK(code_of([&] { read_grid_binary(bad_magic); }) == errc::io);

  std::istringstream truncated(good.substr(0, good.size() - 5));
  CHECK(code_of([&] { read_grid_binary(truncated); }) == errc::io);

  std::string zero_dim = good.substr(0, 8);
  zero_dim.append(4, '\0');  // dim = 0
  std::istringstream zd(zero_dim);
  CHECK(code_of([&] { read_grid_binary(zd); }) == errc::io);
}

TEST_CASE("text files land on disk") {
  const std::string path = "serialize_test_scratch.txt";
  write_text_file(path, "alpha\nbeta\n");
  std::ifstream is(path);
  std::stringstream content;
  content << is.rdbuf();
  CHECK(content.str() == "alpha\nbeta\n");
  std::remove(path.c_str());

  CHECK(code_of([] {
          write_text_file("/no_such_dir_hodo/x.txt", "y");
        }) == errc::io);
}

}  // TEST_SUITE
