// Spawns the installed CLI binary and checks the exit-code contract and the
// files it writes. Numerical depth lives in the core suites; here the
// interesting surface is argument plumbing, config merging, and presentation.
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

TEST_SUITE("cli") {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

static RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(HODO_CLI_PATH) + " " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) res.output += buf;
  const int rc = pclose(pipe);
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

// Unique scratch directory per test case, removed on scope exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::path("cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string str() const { return dir.string(); }
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

static std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

static bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

TEST_CASE("bad invocations exit with the config code") {
  CHECK(run_cli("").exit_code == 2);                      // no subcommand
  CHECK(run_cli("surface").exit_code == 2);               // no map
  CHECK(run_cli("surface --map nosuch").exit_code == 2);  // unknown builtin
  CHECK(run_cli("surface --map cubic --grid 10").exit_code == 2);
  CHECK(run_cli("exponent --map cubic --mode bogus --u 2,2").exit_code == 2);
  CHECK(run_cli("vorticity --map cubic --laurent --window 1e-3").exit_code ==
        2);

  const auto res = run_cli("surface --map nosuch");
  CHECK(contains(res.output, "parsing map spec"));
  CHECK(contains(res.output, "config"));
}

TEST_CASE("surface writes the grid and locus files") {
  Scratch out("surface");
  const auto res = run_cli(
      "surface --map cubic --grid 24x24 --box -2.5:2.5,-2.5:2.5 "
      "--locus-points 64 --check --out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "surface:"));
  CHECK(contains(res.output, "locus:"));
  CHECK(contains(res.output, "check ok: locus points satisfy"));

  const std::string surface = slurp(out.file("surface.csv"));
  CHECK(surface.rfind("u1,u2,branch,label,t,multiplicity\n", 0) == 0);
  CHECK(contains(surface, "D+"));
  CHECK(contains(surface, "D-"));

  const std::string locus = slurp(out.file("locus.csv"));
  CHECK(locus.rfind("u1,u2,t_b\n", 0) == 0);
  CHECK(locus.size() > std::string("u1,u2,t_b\n").size());
}

TEST_CASE("blowup-free maps exit with the empty code") {
  Scratch out("harmonic");
  const auto res = run_cli(
      "surface --map harmonic:W=u1^2*u2-u2^3/3 --grid 8x8 --check --out " +
      out.str());
  CHECK(res.exit_code == 3);
  CHECK(contains(res.output, "no root-merging points"));
  CHECK(contains(res.output, "check ok: harmonic map has no real blowup"));
  CHECK(!fs::exists(out.file("locus.csv")));
}

TEST_CASE("catastrophe check validates the reference values") {
  Scratch out("cata");
  const auto res = run_cli(
      "catastrophe --map cubic --grid-per-axis 80 --nm-restarts 4 "
      "--workers 2 --check --out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "check ok: cubic catastrophe time"));
  CHECK(contains(res.output, "check ok: t_c equals the first blowup time"));
  CHECK(!contains(res.output, "check FAILED"));

  const auto doc = json::parse(slurp(out.file("catastrophe.json")));
  CHECK(doc["t_c"].get<double>() == doctest::Approx(1.62019).epsilon(1e-3));
  CHECK(doc["branch"] == 0);
}

TEST_CASE("vorticity laurent check on the gaussian example") {
  Scratch out("laurent");
  const auto res = run_cli(
      "vorticity --map gaussian --nt 50 --laurent --check --out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "check ok: gaussian Laurent coefficient c_-1"));
  CHECK(contains(res.output, "check ok: gaussian Laurent coefficient c_1"));
  CHECK(!contains(res.output, "check FAILED"));

  const std::string series = slurp(out.file("series.csv"));
  CHECK(series.rfind("t,omega3\n", 0) == 0);

  const auto doc = json::parse(slurp(out.file("laurent.json")));
  CHECK(doc["order"] == 1);
  CHECK(doc["coeffs"][0].get<double>() ==
        doctest::Approx(0.270466).epsilon(1e-2));
}

TEST_CASE("temporal exponent fits from flags and a points file") {
  Scratch out("expo");
  const auto direct = run_cli(
      "exponent --map cubic --mode temporal --u 2,2 --check --out " +
      out.str());
  CHECK(direct.exit_code == 0);
  CHECK(contains(direct.output, "check ok: cubic temporal exponent, point 0"));

  const std::string exponent = slurp(out.file("exponent.csv"));
  CHECK(exponent.rfind("u1,u2,t_b,slope,stderr,level\n", 0) == 0);
  CHECK(contains(exponent, ",1\n"));  // simple pole, level 1

  {
    std::ofstream pts(out.file("points.csv"));
    pts << "u1,u2\n2,2\n2,2.2\n";
  }
  const auto from_file = run_cli(
      "exponent --map cubic --mode temporal --points-file " +
      out.file("points.csv") + " --check --out " + out.str());
  CHECK(from_file.exit_code == 0);
  CHECK(contains(from_file.output, "2 fits"));
  CHECK(contains(from_file.output, "check ok: cubic temporal exponent, point 1"));
}

TEST_CASE("locus points fit the double-root exponent") {
  Scratch out("locus");
  const auto res = run_cli(
      "exponent --map cubic --mode temporal --locus 12 "
      "--box 0.2:2.5,0.2:2.5 --check --out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "check ok: cubic temporal exponent, point 0"));
  CHECK(!contains(res.output, "check FAILED"));
  const std::string exponent = slurp(out.file("exponent.csv"));
  CHECK(contains(exponent, ",2\n"));  // merged roots report degree 2
}

TEST_CASE("spatial exponent fit through the cli") {
  Scratch out("spatial");
  const auto res = run_cli(
      "exponent --map cubic --mode spatial --u 2,2 --check --out " +
      out.str());
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "check ok: cubic spatial exponent, point 0"));
  CHECK(!contains(res.output, "check FAILED"));
}

TEST_CASE("second-level scan feeds the exponent command") {
  Scratch out("steep");
  const auto res = run_cli(
      "exponent --map cubic --mode spatial --second-level --tb 2.2 "
      "--box 0.2:2.5,0.2:2.5 --out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "second-level scan:"));
  const std::string exponent = slurp(out.file("exponent.csv"));
  CHECK(contains(exponent, ",2\n"));  // scanned points are level 2
}

TEST_CASE("field reconstruction rides the characteristics") {
  Scratch out("field");
  const auto at_zero = run_cli(
      "field --map gaussian --t 0 --grid 12x12 --box -0.8:0.8,-0.8:0.8 "
      "--workers 2 --check --out " + out.str());
  CHECK(at_zero.exit_code == 0);
  CHECK(contains(at_zero.output, "check ok: gaussian t=0 velocity"));
  CHECK(contains(at_zero.output, "check ok: reconstructed field rides"));
  const std::string csv = slurp(out.file("field.csv"));
  CHECK(csv.rfind("x1,x2,u1,u2,branch,mask\n", 0) == 0);

  const auto later = run_cli(
      "field --map gaussian --t 0.3 --grid 16x16 --box 0.2:1.2,0.2:1.2 "
      "--binary --check --out " + out.str());
  CHECK(later.exit_code == 0);
  const std::string bin = slurp(out.file("field.bin"));
  REQUIRE(bin.size() > 8);
  CHECK(bin.compare(0, 8, "HVGRID01") == 0);
}

TEST_CASE("fully masked grids exit with the empty code") {
  Scratch out("masked");
  // f = u makes M = (t + 1) I, identically singular at t = -1.
  const auto res = run_cli(
      "field --map expr:f1=u1,f2=u2 --t -1 --grid 4x4 --box -1:1,-1:1 "
      "--out " + out.str());
  CHECK(res.exit_code == 3);
  CHECK(contains(res.output, "16 masked"));
}

TEST_CASE("frame command writes the frame and spatial reports") {
  Scratch out("frame");
  const auto res = run_cli(
      "frame --map cubic --u 2,2 --spatial --check --out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(contains(res.output, "check ok: null vectors annihilate M"));
  CHECK(contains(res.output, "check ok: dual frame is complete"));

  const auto frame = json::parse(slurp(out.file("frame.json")));
  CHECK(frame["rank"] == 1);
  const auto spatial = json::parse(slurp(out.file("spatial.json")));
  CHECK(spatial["omega_slope"].get<double>() ==
        doctest::Approx(-0.5).epsilon(0.15));
  CHECK(spatial["n_valid"].get<int>() >= 6);

  const auto bad = run_cli("frame --map cubic --u 2,2 --tb 0 --out " +
                           out.str());
  CHECK(bad.exit_code == 1);
  CHECK(contains(bad.output, "full_rank"));
}

TEST_CASE("config files mirror the flags") {
  Scratch out("config");
  {
    std::ofstream cfg(out.file("run.json"));
    cfg << R"({"map": "cubic",
               "exponent": {"mode": "temporal", "u": "2,2"}})";
  }
  const auto res = run_cli("exponent --config " + out.file("run.json") +
                           " --out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(out.file("exponent.csv")));

  {
    std::ofstream cfg(out.file("bad.json"));
    cfg << R"({"map": "cubic", "exponent": {"bogus": 1}})";
  }
  const auto bad = run_cli("exponent --config " + out.file("bad.json") +
                           " --u 2,2 --out " + out.str());
  CHECK(bad.exit_code == 2);
  CHECK(contains(bad.output, "unknown key 'bogus'"));

  {
    std::ofstream cfg(out.file("broken.json"));
    cfg << "{not json";
  }
  CHECK(run_cli("exponent --config " + out.file("broken.json") + " --u 2,2")
            .exit_code == 2);
}

TEST_CASE("inline json map specs are accepted") {
  Scratch out("json");
  const auto res = run_cli(
      "exponent --map '{\"builtin\": \"cubic\"}' --mode temporal --u 2,2 "
      "--out " + out.str());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(out.file("exponent.csv")));
}

}  // TEST_SUITE
