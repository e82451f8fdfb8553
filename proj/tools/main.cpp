// hodovort command-line front end. Everything here is argument plumbing and
// CSV/JSON presentation on top of the public C API; no numerics of its own
// beyond the --check comparisons against reference values of the built-in
// example maps.
#include "hodovort.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitNoBlowup = 4;
constexpr int kExitCheckFailed = 5;

struct CliError {
  int code;
  std::string message;
};

int code_for(hv_status s) {
  switch (s) {
    case HV_OK: return kExitOk;
    case HV_ERR_INVALID_ARGUMENT:
    case HV_ERR_PARSE:
    case HV_ERR_CONFIG: return kExitConfig;
    case HV_ERR_EMPTY_LOCUS: return kExitEmpty;
    case HV_ERR_NO_BLOWUP: return kExitNoBlowup;
    default: return kExitRuntime;
  }
}

void require(hv_status s, const std::string& what) {
  if (s == HV_OK) return;
  throw CliError{code_for(s), what + ": " + hv_status_name(s) + " (" +
                                  hv_last_error() + ")"};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw CliError{kExitConfig, "bad number '" + s + "' in " + what};
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw CliError{kExitConfig, "bad integer '" + s + "' in " + what};
  }
}

std::vector<double> parse_point(const std::string& s, int dim,
                                const std::string& what) {
  const auto parts = split(s, ',');
  if (static_cast<int>(parts.size()) != dim)
    throw CliError{kExitConfig, what + " needs " + std::to_string(dim) +
                                    " comma-separated values, got '" + s + "'"};
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_double(p, what));
  return out;
}

// "NxM" or "NxMxK" grid counts.
std::vector<int> parse_grid(const std::string& s, int dim,
                            const std::string& what) {
  const auto parts = split(s, 'x');
  if (static_cast<int>(parts.size()) != dim)
    throw CliError{kExitConfig, what + " needs " + std::to_string(dim) +
                                    " x-separated counts, got '" + s + "'"};
  std::vector<int> out;
  for (const auto& p : parts) {
    int v = parse_int(p, what);
    if (v < 1) throw CliError{kExitConfig, what + " counts must be >= 1"};
    out.push_back(v);
  }
  return out;
}

// "lo:hi,lo:hi[,lo:hi]" per-axis bounds.
struct BoxSpec {
  std::vector<double> lo, hi;
};

BoxSpec parse_box(const std::string& s, int dim, const std::string& what) {
  const auto axes = split(s, ',');
  if (static_cast<int>(axes.size()) != dim)
    throw CliError{kExitConfig, what + " needs " + std::to_string(dim) +
                                    " lo:hi pairs, got '" + s + "'"};
  BoxSpec box;
  for (const auto& a : axes) {
    const auto lh = split(a, ':');
    if (lh.size() != 2)
      throw CliError{kExitConfig, what + " axis '" + a + "' is not lo:hi"};
    double lo = parse_double(lh[0], what);
    double hi = parse_double(lh[1], what);
    if (!(lo < hi))
      throw CliError{kExitConfig, what + " axis '" + a + "' has lo >= hi"};
    box.lo.push_back(lo);
    box.hi.push_back(hi);
  }
  return box;
}

// "lo:hi:n" fit window.
hv_fit_window parse_window(const std::string& s, const std::string& what) {
  const auto parts = split(s, ':');
  if (parts.size() != 3)
    throw CliError{kExitConfig, what + " must be lo:hi:n, got '" + s + "'"};
  hv_fit_window w;
  w.lo = parse_double(parts[0], what);
  w.hi = parse_double(parts[1], what);
  w.n_points = parse_int(parts[2], what);
  return w;
}

struct MapHandle {
  hv_map* m = nullptr;
  MapHandle() = default;
  MapHandle(const MapHandle&) = delete;
  MapHandle& operator=(const MapHandle&) = delete;
  ~MapHandle() { hv_map_free(m); }

  void create(const std::string& spec) {
    const auto first = spec.find_first_not_of(" \t\n");
    if (first != std::string::npos && spec[first] == '{')
      require(hv_map_create_json(spec.c_str(), &m), "parsing map JSON");
    else
      require(hv_map_create_spec(spec.c_str(), &m), "parsing map spec");
  }
  int dim() const { return hv_map_dim(m); }
  int branches() const { return hv_map_branch_count(m); }
  std::string name() const { return hv_map_name(m); }
};

struct Common {
  std::string map_spec;
  std::string config_path;
  std::string out = ".";
  int workers = 0;
  bool check = false;
  unsigned seed = 12345;
  json cfg = json::object();

  int resolved_workers() const {
    if (workers > 0) return workers;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return hw > 0 ? hw : 1;
  }

  std::ofstream open_out(const std::string& name) const {
    std::filesystem::create_directories(out);
    const std::string path = out + "/" + name;
    std::ofstream os(path);
    if (!os) throw CliError{kExitRuntime, "cannot open " + path};
    std::cout << "writing " << path << "\n";
    return os;
  }

  std::string out_path(const std::string& name) const {
    std::filesystem::create_directories(out);
    return out + "/" + name;
  }
};

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object())
    throw CliError{kExitConfig, where + " must be a JSON object"};
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const auto& a : allowed) known = known || key == a;
    if (!known)
      throw CliError{kExitConfig, "unknown key '" + key + "' in " + where};
  }
}

json config_section(const Common& c, const std::string& name,
                    const std::vector<std::string>& allowed) {
  if (!c.cfg.contains(name)) return json::object();
  json sec = c.cfg.at(name);
  check_keys(sec, allowed, "config." + name);
  return sec;
}

// CLI flags win; otherwise config values fill in. Config values use the same
// string syntax as the flags (grids "NxM", boxes "lo:hi,...", windows
// "lo:hi:n") so the two sources stay interchangeable.
template <typename T>
void merge(const CLI::App* cmd, const char* flag, const json& sec,
           const char* key, T& value) {
  if (cmd->count(flag) > 0 || !sec.contains(key)) return;
  try {
    value = sec.at(key).get<T>();
  } catch (const json::exception&) {
    throw CliError{kExitConfig, std::string("config key '") + key +
                                    "' has the wrong type"};
  }
}

struct Checker {
  bool enabled = false;
  int failures = 0;

  void expect(bool ok, const std::string& what) {
    if (!enabled) return;
    if (ok) {
      std::cout << "check ok: " << what << "\n";
    } else {
      ++failures;
      std::cout << "check FAILED: " << what << "\n";
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    expect(std::fabs(got - want) <= tol,
           what + " (got " + fmt(got) + ", want " + fmt(want) + " +/- " +
               fmt(tol) + ")");
  }
  void near_rel(double got, double want, double rel, const std::string& what) {
    near(got, want, rel * std::fabs(want), what);
  }
  int finalize(int base) const {
    if (enabled && failures > 0) return kExitCheckFailed;
    return base;
  }
};

// Reference data for the built-in examples, used only under --check.
constexpr double kCubicTc = 1.62019;
constexpr double kCubicUc1 = 1.59562;
constexpr double kCubicUc2 = 1.17844;
constexpr double kGaussTc = 0.642593;
constexpr double kGaussUc[2] = {0.803494, 0.584021};
constexpr double kGaussXc[2] = {0.759774, 0.77468};
constexpr double kGaussLaurent[3] = {0.270466, -0.0747002, 0.0206315};

const char* kDomainNames[3] = {"D+", "D-", "D0"};

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Smallest positive real root of det M(., u), or throw with exit code 4.
double blowup_time_at(const MapHandle& map, int branch,
                      const std::vector<double>& u) {
  double t[HV_MAX_DIM];
  int mult[HV_MAX_DIM];
  double d1[HV_MAX_DIM], d2[HV_MAX_DIM];
  int count = 0;
  require(hv_branch_times(map.m, branch, u.data(), t, mult, d1, d2, HV_MAX_DIM,
                          &count),
          "computing blowup times");
  double best = 0.0;
  bool found = false;
  for (int i = 0; i < count; ++i)
    if (t[i] > 0.0 && (!found || t[i] < best)) {
      best = t[i];
      found = true;
    }
  if (!found)
    throw CliError{kExitNoBlowup, "no positive blowup time at the given u"};
  return best;
}

/* ---- surface ----------------------------------------------------------- */

struct SurfaceOpts {
  std::string grid, box;
  int branch = -1;       // -1: every branch
  int locus_points = 256;
  int locus_branch = 0;
};

int cmd_surface(const Common& c, const SurfaceOpts& o, MapHandle& map) {
  const int dim = map.dim();
  std::vector<int> counts = o.grid.empty()
                                ? std::vector<int>(dim, dim == 2 ? 200 : 48)
                                : parse_grid(o.grid, dim, "--grid");
  BoxSpec box;
  if (o.box.empty()) {
    box.lo.resize(dim);
    box.hi.resize(dim);
    require(hv_map_search_box(map.m, box.lo.data(), box.hi.data()),
            "reading search box");
  } else {
    box = parse_box(o.box, dim, "--box");
  }

  Checker chk{c.check};
  auto os = c.open_out("surface.csv");
  for (int i = 0; i < dim; ++i) os << "u" << i + 1 << ",";
  os << "branch,label,t,multiplicity\n";

  const int b_lo = o.branch >= 0 ? o.branch : 0;
  const int b_hi = o.branch >= 0 ? o.branch + 1 : map.branches();
  long total = 1;
  for (int cnt : counts) total *= cnt;

  long rows = 0;
  bool any_root = false;
  double linear_beta = 0.0;
  bool linear_ok = true;
  if (map.name() == "linear") {
    // J = beta I, so any Jacobian diagonal entry recovers beta.
    std::vector<double> u0(dim, 0.0), jac(dim * dim);
    require(hv_map_jacobian(map.m, 0, u0.data(), jac.data()), "reading beta");
    linear_beta = jac[0];
  }

  std::vector<double> u(dim);
  for (int b = b_lo; b < b_hi; ++b) {
    for (long idx = 0; idx < total; ++idx) {
      long rem = idx;
      for (int ax = 0; ax < dim; ++ax) {
        const int k = static_cast<int>(rem % counts[ax]);
        rem /= counts[ax];
        u[ax] = counts[ax] == 1 ? box.lo[ax]
                                : box.lo[ax] + (box.hi[ax] - box.lo[ax]) * k /
                                                   (counts[ax] - 1);
      }
      if (!hv_map_in_domain(map.m, b, u.data())) continue;

      double t[HV_MAX_DIM];
      int mult[HV_MAX_DIM];
      double d1[HV_MAX_DIM], d2[HV_MAX_DIM];
      int count = 0;
      if (hv_branch_times(map.m, b, u.data(), t, mult, d1, d2, HV_MAX_DIM,
                          &count) != HV_OK)
        continue;  // derivative failures at domain edges are skipped, not fatal

      std::string label;
      if (dim <= 3) {
        int lab = 0;
        if (hv_classify_domain(map.m, b, u.data(), &lab) == HV_OK)
          label = kDomainNames[lab];
      }

      std::string prefix;
      for (int ax = 0; ax < dim; ++ax) prefix += fmt(u[ax]) + ",";
      prefix += std::to_string(b) + "," + label + ",";
      if (count == 0) {
        os << prefix << ",\n";
        ++rows;
      }
      for (int r = 0; r < count; ++r) {
        os << prefix << fmt(t[r]) << "," << mult[r] << "\n";
        ++rows;
        any_root = true;
        if (map.name() == "linear")
          linear_ok = linear_ok && std::fabs(t[r] + linear_beta) <= 1e-9;
      }
    }
  }
  std::cout << "surface: " << rows << " rows\n";

  // Root-merging locus (the boundary between domain labels).
  std::vector<double> locus_u(static_cast<std::size_t>(o.locus_points) * dim);
  std::vector<double> locus_t(o.locus_points);
  int locus_count = 0;
  bool locus_empty = false;
  {
    const hv_status s =
        hv_double_root_locus(map.m, o.locus_branch, box.lo.data(),
                             box.hi.data(), o.locus_points, locus_u.data(),
                             locus_t.data(), &locus_count);
    if (s == HV_ERR_EMPTY_LOCUS) {
      locus_empty = true;
      std::cout << "locus: no root-merging points in the box\n";
    } else {
      require(s, "tracing the root-merging locus");
      auto ls = c.open_out("locus.csv");
      for (int i = 0; i < dim; ++i) ls << "u" << i + 1 << ",";
      ls << "t_b\n";
      for (int i = 0; i < locus_count; ++i) {
        for (int ax = 0; ax < dim; ++ax) ls << fmt(locus_u[i * dim + ax]) << ",";
        ls << fmt(locus_t[i]) << "\n";
      }
      std::cout << "locus: " << locus_count << " points\n";
    }
  }

  if (chk.enabled) {
    if (starts_with(map.name(), "harmonic"))
      chk.expect(!any_root, "harmonic map has no real blowup times");
    if (map.name() == "linear")
      chk.expect(any_root && linear_ok,
                 "linear map blows up at t = " + fmt(-linear_beta) +
                     " everywhere");
    if (dim == 2 && !locus_empty) {
      double worst = 0.0;
      for (int i = 0; i < locus_count; ++i) {
        std::vector<double> lu(locus_u.begin() + i * dim,
                               locus_u.begin() + (i + 1) * dim);
        double disc = 0.0;
        require(hv_discriminant_2d(map.m, o.locus_branch, lu.data(), &disc),
                "evaluating the discriminant");
        // The cubic map's degeneracy quartic carries a factor 9 relative to
        // the raw discriminant; check the stricter quantity there.
        if (map.name() == "cubic") disc *= 9.0;
        worst = std::max(worst, std::fabs(disc));
      }
      chk.expect(worst <= 1e-5, "locus points satisfy the degeneracy equation"
                                " (worst |value| = " + fmt(worst) + ")");
    }
  }
  return chk.finalize(locus_empty ? kExitEmpty : kExitOk);
}

/* ---- catastrophe ------------------------------------------------------- */

struct CatastropheOpts {
  int grid_per_axis = 0;
  int refine_seeds = 0;
  int nm_restarts = -1;
  int branch = -1;
  std::string box;
};

int cmd_catastrophe(const Common& c, const CatastropheOpts& o, MapHandle& map) {
  const int dim = map.dim();
  hv_catastrophe_options co{};
  co.grid_per_axis = o.grid_per_axis;
  co.refine_seeds = o.refine_seeds;
  co.nm_restarts = o.nm_restarts;
  co.branch = o.branch;
  co.workers = c.resolved_workers();
  if (!o.box.empty()) {
    const BoxSpec box = parse_box(o.box, dim, "--box");
    co.use_box = 1;
    for (int i = 0; i < dim; ++i) {
      co.lo[i] = box.lo[i];
      co.hi[i] = box.hi[i];
    }
  }

  hv_catastrophe_result r{};
  require(hv_find_catastrophe(map.m, &co, &r), "searching for the catastrophe");

  json doc;
  doc["t_c"] = r.t_c;
  doc["u_c"] = std::vector<double>(r.u_c, r.u_c + dim);
  doc["x_c"] = std::vector<double>(r.x_c, r.x_c + dim);
  doc["branch"] = r.branch;
  doc["branch_name"] = r.branch_name;
  doc["n_evals"] = r.n_evals;
  const std::string text = doc.dump(2);
  std::cout << text << "\n";
  c.open_out("catastrophe.json") << text << "\n";

  Checker chk{c.check};
  if (chk.enabled) {
    // The search result must actually sit on the blowup surface.
    std::vector<double> uc(r.u_c, r.u_c + dim);
    const double t_first = blowup_time_at(map, r.branch, uc);
    chk.near(t_first, r.t_c, 1e-9 * std::max(1.0, std::fabs(r.t_c)),
             "t_c equals the first blowup time at u_c");
    if (map.name() == "cubic") {
      chk.near(r.t_c, kCubicTc, 1e-3, "cubic catastrophe time");
      chk.near(std::fabs(r.u_c[0]), kCubicUc1, 1e-3, "cubic |u_c1|");
      chk.near(std::fabs(r.u_c[1]), kCubicUc2, 1e-3, "cubic |u_c2|");
    }
    if (map.name() == "gaussian") {
      chk.near(r.t_c, kGaussTc, 1e-3, "gaussian catastrophe time");
      for (int i = 0; i < 2; ++i) {
        chk.near(r.u_c[i], kGaussUc[i], 1e-3,
                 "gaussian u_c" + std::to_string(i + 1));
        chk.near(r.x_c[i], kGaussXc[i], 1e-3,
                 "gaussian x_c" + std::to_string(i + 1));
      }
    }
  }
  return chk.finalize(kExitOk);
}

/* ---- vorticity --------------------------------------------------------- */

struct VorticityOpts {
  std::string u;
  double t_lo = 0.0;
  double t_hi = std::nan("");
  int nt = 200;
  int branch = 0;
  bool laurent = false;
  int order = 1;
  double tb = std::nan("");
  std::string window;
  std::string snap_times, snap_grid;
};

int cmd_vorticity(const Common& c, const VorticityOpts& o, MapHandle& map) {
  const int dim = map.dim();
  Checker chk{c.check};

  std::vector<double> u;
  if (!o.u.empty()) {
    u = parse_point(o.u, dim, "--u");
  } else if (chk.enabled && map.name() == "gaussian") {
    u = {kGaussUc[0], kGaussUc[1]};
  } else {
    BoxSpec box;
    box.lo.resize(dim);
    box.hi.resize(dim);
    require(hv_map_search_box(map.m, box.lo.data(), box.hi.data()),
            "reading search box");
    for (int i = 0; i < dim; ++i) u.push_back(0.5 * (box.lo[i] + box.hi[i]));
  }

  // Time range: stop just short of the first blowup when there is one.
  double t_hi = o.t_hi;
  if (std::isnan(t_hi)) {
    try {
      t_hi = 0.999 * blowup_time_at(map, o.branch, u);
    } catch (const CliError&) {
      t_hi = 10.0;
    }
  }

  auto os = c.open_out("series.csv");
  if (dim == 2)
    os << "t,omega3\n";
  else if (dim == 3)
    os << "t,omega1,omega2,omega3\n";
  else
    os << "t,norm\n";

  std::vector<double> ts, omegas;  // 2D samples kept for the checks
  for (int k = 0; k < o.nt; ++k) {
    const double t = o.nt == 1 ? o.t_lo
                               : o.t_lo + (t_hi - o.t_lo) * k / (o.nt - 1);
    if (dim == 2) {
      double w = 0.0;
      const hv_status s = hv_vorticity_scalar_2d(map.m, o.branch, t, u.data(), &w);
      if (s == HV_ERR_SINGULAR) {
        os << fmt(t) << ",\n";
        continue;
      }
      require(s, "evaluating vorticity");
      os << fmt(t) << "," << fmt(w) << "\n";
      ts.push_back(t);
      omegas.push_back(w);
    } else if (dim == 3) {
      double w[3] = {0, 0, 0};
      const hv_status s = hv_vorticity_vector(map.m, o.branch, t, u.data(), w);
      if (s == HV_ERR_SINGULAR) {
        os << fmt(t) << ",,,\n";
        continue;
      }
      require(s, "evaluating vorticity");
      os << fmt(t) << "," << fmt(w[0]) << "," << fmt(w[1]) << "," << fmt(w[2])
         << "\n";
    } else {
      std::vector<double> form(dim * dim);
      const hv_status s =
          hv_vorticity_two_form(map.m, o.branch, t, u.data(), form.data());
      if (s == HV_ERR_SINGULAR) {
        os << fmt(t) << ",\n";
        continue;
      }
      require(s, "evaluating vorticity");
      double nrm = 0.0;
      for (double v : form) nrm = std::max(nrm, std::fabs(v));
      os << fmt(t) << "," << fmt(nrm) << "\n";
    }
  }
  std::cout << "series: " << o.nt << " samples on [" << fmt(o.t_lo) << ", "
            << fmt(t_hi) << "]\n";

  hv_laurent_result laurent{};
  if (o.laurent) {
    const double tb = std::isnan(o.tb) ? blowup_time_at(map, o.branch, u) : o.tb;
    hv_fit_window window{0, 0, 0};
    if (!o.window.empty()) window = parse_window(o.window, "--window");
    require(hv_laurent_fit(map.m, o.branch, u.data(), tb, o.order,
                           o.window.empty() ? nullptr : &window, &laurent),
            "fitting the Laurent expansion");
    json doc;
    doc["t_b"] = tb;
    doc["order"] = laurent.order;
    doc["side"] = laurent.side;
    doc["coeffs"] =
        std::vector<double>(laurent.coeffs, laurent.coeffs + laurent.order + 2);
    doc["uncertainty"] = std::vector<double>(
        laurent.uncertainty, laurent.uncertainty + laurent.order + 2);
    doc["residual"] = laurent.residual;
    doc["n_points"] = laurent.n_points;
    const std::string text = doc.dump(2);
    std::cout << text << "\n";
    c.open_out("laurent.json") << text << "\n";
  }

  // Fixed-time snapshots over a u-grid, one file per requested time.
  if (!o.snap_times.empty()) {
    std::vector<int> counts = o.snap_grid.empty()
                                  ? std::vector<int>(dim, 64)
                                  : parse_grid(o.snap_grid, dim, "--snap-grid");
    BoxSpec box;
    box.lo.resize(dim);
    box.hi.resize(dim);
    require(hv_map_search_box(map.m, box.lo.data(), box.hi.data()),
            "reading search box");
    long total = 1;
    for (int cnt : counts) total *= cnt;
    int file_idx = 0;
    for (const auto& ts_str : split(o.snap_times, ',')) {
      const double t = parse_double(ts_str, "--snap-times");
      auto snap = c.open_out("omega_" + std::to_string(file_idx++) + ".csv");
      for (int i = 0; i < dim; ++i) snap << "u" << i + 1 << ",";
      snap << "t,omega\n";
      std::vector<double> up(dim);
      for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int ax = 0; ax < dim; ++ax) {
          const int k = static_cast<int>(rem % counts[ax]);
          rem /= counts[ax];
          up[ax] = counts[ax] == 1
                       ? box.lo[ax]
                       : box.lo[ax] + (box.hi[ax] - box.lo[ax]) * k /
                                          (counts[ax] - 1);
        }
        if (!hv_map_in_domain(map.m, o.branch, up.data())) continue;
        double w = 0.0;
        hv_status s;
        if (dim == 2) {
          s = hv_vorticity_scalar_2d(map.m, o.branch, t, up.data(), &w);
        } else {
          double wv[3];
          s = hv_vorticity_vector(map.m, o.branch, t, up.data(), wv);
          w = std::sqrt(wv[0] * wv[0] + wv[1] * wv[1] + wv[2] * wv[2]);
        }
        for (int ax = 0; ax < dim; ++ax) snap << fmt(up[ax]) << ",";
        if (s == HV_OK)
          snap << fmt(t) << "," << fmt(w) << "\n";
        else
          snap << fmt(t) << ",\n";
      }
    }
  }

  if (chk.enabled) {
    if (map.name() == "rotational") {
      // omega_3(t) = 2 alpha / (alpha^2 t^2 + 1), independent of u.
      std::vector<double> u0(dim, 0.0), jac(dim * dim);
      require(hv_map_jacobian(map.m, 0, u0.data(), jac.data()),
              "reading alpha");
      const double alpha = 1.0 / jac[1];  // J = [[0, 1/a], [-1/a, 0]]
      double worst = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const double want =
            2.0 * alpha / (alpha * alpha * ts[i] * ts[i] + 1.0);
        worst = std::max(worst, std::fabs(omegas[i] - want));
      }
      chk.expect(!ts.empty() && worst <= 1e-12,
                 "rotational vorticity matches 2a/(a^2 t^2 + 1) (worst " +
                     fmt(worst) + ")");
    }
    if (map.name() == "linear") {
      double worst = 0.0;
      for (double w : omegas) worst = std::max(worst, std::fabs(w));
      chk.expect(!omegas.empty() && worst <= 1e-15,
                 "linear map vorticity is identically zero");
    }
    if (map.name() == "gaussian" && o.laurent && laurent.order == 1) {
      static const double rel[3] = {1e-2, 1e-2, 5e-2};
      static const char* names[3] = {"c_-1", "c_0", "c_1"};
      for (int i = 0; i < 3; ++i)
        chk.near_rel(laurent.coeffs[i], kGaussLaurent[i], rel[i],
                     std::string("gaussian Laurent coefficient ") + names[i]);
    }
  }
  return chk.finalize(kExitOk);
}

/* ---- exponent ---------------------------------------------------------- */

struct ExponentOpts {
  std::string mode = "temporal";
  std::string u;
  int locus = 0;
  bool second_level = false;
  double tb = std::nan("");
  std::string window;
  std::string box;
  std::string points_file;
  int branch = 0;
  int direction = 0;
  int sheet = +1;
  int ray_n = 0;
  int trim = -1;
};

int cmd_exponent(const Common& c, const ExponentOpts& o, MapHandle& map) {
  const int dim = map.dim();
  if (o.mode != "temporal" && o.mode != "spatial")
    throw CliError{kExitConfig, "--mode must be temporal or spatial"};
  const bool spatial = o.mode == "spatial";

  BoxSpec box;
  box.lo.resize(dim);
  box.hi.resize(dim);
  if (o.box.empty())
    require(hv_map_search_box(map.m, box.lo.data(), box.hi.data()),
            "reading search box");
  else
    box = parse_box(o.box, dim, "--box");

  struct Point {
    std::vector<double> u;
    double t_b = std::nan("");
    int level = 1;
  };
  std::vector<Point> points;

  if (!o.u.empty()) {
    Point p;
    p.u = parse_point(o.u, dim, "--u");
    p.t_b = o.tb;
    points.push_back(p);
  }
  if (o.locus > 0) {
    std::vector<double> lu(static_cast<std::size_t>(o.locus) * dim);
    std::vector<double> lt(o.locus);
    int count = 0;
    require(hv_double_root_locus(map.m, o.branch, box.lo.data(), box.hi.data(),
                                 o.locus, lu.data(), lt.data(), &count),
            "tracing the root-merging locus");
    for (int i = 0; i < count; ++i) {
      Point p;
      p.u.assign(lu.begin() + i * dim, lu.begin() + (i + 1) * dim);
      p.t_b = lt[i];
      points.push_back(p);
    }
  }
  if (o.second_level) {
    if (std::isnan(o.tb))
      throw CliError{kExitConfig, "--second-level needs --tb"};
    std::vector<double> su(static_cast<std::size_t>(16) * dim);
    int count = 0;
    require(hv_second_level_scan(map.m, o.branch, o.tb, box.lo.data(),
                                 box.hi.data(), 16, su.data(), &count),
            "scanning for second-level points");
    for (int i = 0; i < count; ++i) {
      Point p;
      p.u.assign(su.begin() + i * dim, su.begin() + (i + 1) * dim);
      p.t_b = o.tb;
      p.level = 2;
      points.push_back(p);
    }
    std::cout << "second-level scan: " << count << " candidates\n";
  }
  if (!o.points_file.empty()) {
    std::ifstream is(o.points_file);
    if (!is) throw CliError{kExitConfig, "cannot open " + o.points_file};
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto parts = split(line, ',');
      if (static_cast<int>(parts.size()) < dim) continue;
      Point p;
      try {
        for (int i = 0; i < dim; ++i) {
          std::size_t pos = 0;
          p.u.push_back(std::stod(parts[i], &pos));
        }
      } catch (...) {
        continue;  // header or comment line
      }
      points.push_back(p);
    }
  }
  if (points.empty())
    throw CliError{kExitConfig,
                   "need --u, --locus N, --second-level, or --points-file"};

  hv_fit_window window{0, 0, 0};
  if (!o.window.empty()) window = parse_window(o.window, "--window");

  auto os = c.open_out("exponent.csv");
  for (int i = 0; i < dim; ++i) os << "u" << i + 1 << ",";
  os << "t_b,slope,stderr,level\n";

  std::vector<double> slopes;
  for (auto& p : points) {
    if (std::isnan(p.t_b)) {
      try {
        p.t_b = blowup_time_at(map, o.branch, p.u);
      } catch (const CliError& e) {
        std::cout << "skipping point (" << e.message << ")\n";
        continue;
      }
    }
    double slope = 0.0, err = 0.0;
    hv_status s;
    if (spatial) {
      hv_ray_spec ray{};
      ray.direction = o.direction;
      ray.sheet = o.sheet;
      if (!o.window.empty()) {
        ray.lo = window.lo;
        ray.hi = window.hi;
        ray.n_points = window.n_points;
      }
      if (o.ray_n > 0) ray.n_points = o.ray_n;
      ray.trim = o.trim;
      hv_spatial_fit fit{};
      s = hv_fit_spatial(map.m, o.branch, p.u.data(), p.t_b, &ray, &fit);
      if (s == HV_OK) {
        slope = fit.omega_slope;
        err = fit.omega_err;
        if (p.level == 1 && std::fabs(fit.fold_coeff) <= 1e-6) p.level = 2;
      }
    } else {
      int side = 0;
      s = hv_fit_temporal(map.m, o.branch, p.u.data(), p.t_b,
                          o.window.empty() ? nullptr : &window, &slope, &err,
                          &side);
      if (s == HV_OK) {
        // Report the exact power-counting order alongside the fitted slope.
        double rt[HV_MAX_DIM];
        int rm[HV_MAX_DIM], rd[HV_MAX_DIM];
        int count = 0;
        if (hv_temporal_degrees(map.m, o.branch, p.u.data(), rt, rm, rd,
                                HV_MAX_DIM, &count) == HV_OK)
          for (int i = 0; i < count; ++i)
            if (std::fabs(rt[i] - p.t_b) <=
                1e-6 * std::max(1.0, std::fabs(p.t_b)))
              p.level = rd[i];
      }
    }
    if (s != HV_OK) {
      std::cout << "skipping point: " << hv_status_name(s) << " ("
                << hv_last_error() << ")\n";
      continue;
    }
    for (int i = 0; i < dim; ++i) os << fmt(p.u[i]) << ",";
    os << fmt(p.t_b) << "," << fmt(slope) << "," << fmt(err) << "," << p.level
       << "\n";
    slopes.push_back(slope);
  }

  if (slopes.empty()) {
    std::cout << "exponent: no usable points\n";
    return kExitEmpty;
  }
  double mean = 0.0;
  for (double s : slopes) mean += s;
  mean /= static_cast<double>(slopes.size());
  std::cout << "exponent: " << slopes.size() << " fits, mean slope "
            << fmt(mean) << "\n";

  Checker chk{c.check};
  if (chk.enabled && map.name() == "cubic") {
    double want = 0.0, tol = 0.0;
    if (!spatial && o.locus == 0) {
      want = -1.0;
      tol = 0.03;
    } else if (!spatial) {
      want = -2.0;
      tol = 0.05;
    } else if (!o.second_level) {
      want = -0.5;
      tol = 0.05;
    } else {
      want = -2.0 / 3.0;
      tol = 0.05;
    }
    for (std::size_t i = 0; i < slopes.size(); ++i)
      chk.near(slopes[i], want, tol,
               "cubic " + o.mode + " exponent, point " + std::to_string(i));
  }
  return chk.finalize(kExitOk);
}

/* ---- field ------------------------------------------------------------- */

struct FieldOpts {
  double t = 0.0;
  std::string grid, box;
  bool binary = false;
  bool fd_curl = false;
  int stride = 8;
};

int cmd_field(const Common& c, const FieldOpts& o, MapHandle& map) {
  const int dim = map.dim();
  std::vector<int> counts = o.grid.empty()
                                ? std::vector<int>(dim, dim == 2 ? 64 : 24)
                                : parse_grid(o.grid, dim, "--grid");
  BoxSpec box;
  box.lo.resize(dim);
  box.hi.resize(dim);
  if (o.box.empty())
    require(hv_map_search_box(map.m, box.lo.data(), box.hi.data()),
            "reading search box");
  else
    box = parse_box(o.box, dim, "--box");

  hv_grid* grid = nullptr;
  require(hv_solve_grid(map.m, box.lo.data(), box.hi.data(), counts.data(),
                        o.t, c.resolved_workers(), &grid),
          "solving the field grid");
  struct GridGuard {
    hv_grid* g;
    ~GridGuard() { hv_grid_free(g); }
  } guard{grid};

  const long total = hv_grid_total(grid);
  const long masked = hv_grid_masked(grid);
  std::cout << "field: " << total << " cells, " << masked << " masked, t = "
            << fmt(o.t) << "\n";

  if (o.binary)
    require(hv_grid_write_binary(grid, c.out_path("field.bin").c_str()),
            "writing field.bin");
  else
    require(hv_grid_write_csv(grid, c.out_path("field.csv").c_str()),
            "writing field.csv");
  std::cout << "writing " << c.out_path(o.binary ? "field.bin" : "field.csv")
            << "\n";

  // Optional coarse cross-check column: FD curl of the reconstructed field
  // against the pointwise vorticity of the hodograph inverse (2D).
  if (o.fd_curl && dim == 2) {
    auto cs = c.open_out("fd_curl.csv");
    cs << "x1,x2,curl_fd,omega\n";
    hv_field_sample sample{};
    for (long idx = 0; idx < total; idx += o.stride) {
      require(hv_grid_get(grid, idx, &sample), "reading grid cell");
      if (sample.status != HV_SAMPLE_OK) continue;
      double grad[4];
      if (hv_fd_gradient(map.m, sample.x, o.t, 1e-5, grad) != HV_OK) continue;
      const double curl = grad[2] - grad[1];  // du2/dx1 - du1/dx2
      double omega = 0.0;
      if (hv_vorticity_scalar_2d(map.m, sample.branch, o.t, sample.u,
                                 &omega) != HV_OK)
        continue;
      cs << fmt(sample.x[0]) << "," << fmt(sample.x[1]) << "," << fmt(curl)
         << "," << fmt(omega) << "\n";
    }
  }

  Checker chk{c.check};
  if (chk.enabled) {
    hv_field_sample sample{};
    if (map.name() == "gaussian" && std::fabs(o.t) < 1e-12) {
      double worst = 0.0;
      long converged = 0;
      for (long idx = 0; idx < total; ++idx) {
        require(hv_grid_get(grid, idx, &sample), "reading grid cell");
        if (sample.status != HV_SAMPLE_OK) continue;
        ++converged;
        const double want =
            std::exp(-sample.x[0] * sample.x[0] - sample.x[1] * sample.x[1]);
        worst = std::max(worst, std::fabs(sample.u[0] - want));
      }
      chk.expect(converged > 0 && worst <= 1e-8,
                 "gaussian t=0 velocity matches exp(-x1^2-x2^2) (worst " +
                     fmt(worst) + ")");
    }
    if (map.name() == "gaussian" && o.t > 0.6 && o.t < kGaussTc) {
      // Close to the catastrophe the failed cells concentrate at x_c.
      double worst = 0.0;
      for (long idx = 0; idx < total; ++idx) {
        require(hv_grid_get(grid, idx, &sample), "reading grid cell");
        if (sample.status == HV_SAMPLE_OK) continue;
        const double d = std::hypot(sample.x[0] - kGaussXc[0],
                                    sample.x[1] - kGaussXc[1]);
        worst = std::max(worst, d);
      }
      chk.expect(masked > 0 && worst <= 0.05,
                 "masked cells cluster at the catastrophe point (worst "
                 "distance " + fmt(worst) + ")");
    }
    if (hv_map_has_initial_data(map.m) && masked < total) {
      // Transport consistency u(x,t) = u0(x - u t) on a subsample.
      std::mt19937 rng(c.seed);
      std::uniform_int_distribution<long> pick(0, total - 1);
      double worst = 0.0;
      int used = 0;
      for (int trial = 0; trial < 200 && used < 25; ++trial) {
        require(hv_grid_get(grid, pick(rng), &sample), "reading grid cell");
        if (sample.status != HV_SAMPLE_OK) continue;
        double defect = 0.0;
        if (hv_characteristics_check(map.m, sample.x, o.t, &defect) != HV_OK)
          continue;
        worst = std::max(worst, defect);
        ++used;
      }
      chk.expect(used > 0 && worst <= 1e-6,
                 "reconstructed field rides the characteristics (worst "
                 "defect " + fmt(worst) + ")");
    }
  }
  return chk.finalize(masked == total ? kExitEmpty : kExitOk);
}

/* ---- frame ------------------------------------------------------------- */

struct FrameOpts {
  std::string u;
  double tb = std::nan("");
  int branch = 0;
  bool spatial = false;
  int direction = 0;
  int sheet = +1;
};

int cmd_frame(const Common& c, const FrameOpts& o, MapHandle& map) {
  const int dim = map.dim();
  if (o.u.empty()) throw CliError{kExitConfig, "frame needs --u"};
  const std::vector<double> u = parse_point(o.u, dim, "--u");
  const double tb = std::isnan(o.tb) ? blowup_time_at(map, o.branch, u) : o.tb;

  hv_frame* frame = nullptr;
  require(hv_build_frame(map.m, o.branch, u.data(), tb, &frame),
          "building the adapted frame");
  struct FrameGuard {
    hv_frame* f;
    ~FrameGuard() { hv_frame_free(f); }
  } guard{frame};

  std::cout << "frame: t_b = " << fmt(tb) << ", rank "
            << hv_frame_rank(frame) << ", " << hv_frame_null_count(frame)
            << " null direction(s)\n";
  require(hv_frame_write_json(frame, c.out_path("frame.json").c_str()),
          "writing frame.json");
  std::cout << "writing " << c.out_path("frame.json") << "\n";

  if (o.spatial) {
    hv_ray_spec ray{};
    ray.direction = o.direction;
    ray.sheet = o.sheet;
    hv_spatial_fit fit{};
    require(hv_fit_spatial(map.m, o.branch, u.data(), tb, &ray, &fit),
            "fitting spatial exponents");
    json doc;
    doc["omega_slope"] = fit.omega_slope;
    doc["omega_err"] = fit.omega_err;
    doc["fold_coeff"] = fit.fold_coeff;
    doc["n_valid"] = fit.n_valid;
    doc["ray"] = std::vector<double>(fit.ray, fit.ray + dim);
    json vs = json::array(), ve = json::array();
    for (int i = 0; i < dim; ++i) {
      json rs = json::array(), re = json::array();
      for (int j = 0; j < dim; ++j) {
        rs.push_back(fit.v_slopes[i * dim + j]);
        re.push_back(fit.v_errs[i * dim + j]);
      }
      vs.push_back(rs);
      ve.push_back(re);
    }
    doc["v_slopes"] = vs;
    doc["v_errs"] = ve;
    const std::string text = doc.dump(2);
    std::cout << text << "\n";
    c.open_out("spatial.json") << text << "\n";
  }

  Checker chk{c.check};
  if (chk.enabled) {
    const int nn = hv_frame_null_count(frame);
    // M = t_b I + J at the frame point, assembled through the map API.
    std::vector<double> jac(dim * dim);
    require(hv_map_jacobian(map.m, o.branch, u.data(), jac.data()),
            "reading the Jacobian");
    std::vector<double> m(dim * dim);
    double mnorm = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        m[i * dim + j] = jac[i * dim + j] + (i == j ? tb : 0.0);
        mnorm = std::max(mnorm, std::fabs(m[i * dim + j]));
      }
    double worst_null = 0.0;
    std::vector<double> vec(dim), lvec(dim);
    for (int k = 0; k < nn; ++k) {
      require(hv_frame_vector(frame, HV_FRAME_R, k, vec.data()),
              "reading frame vector");
      require(hv_frame_vector(frame, HV_FRAME_L, k, lvec.data()),
              "reading frame vector");
      for (int i = 0; i < dim; ++i) {
        double mr = 0.0, lm = 0.0;
        for (int j = 0; j < dim; ++j) {
          mr += m[i * dim + j] * vec[j];
          lm += lvec[j] * m[j * dim + i];
        }
        worst_null = std::max(worst_null, std::fabs(mr));
        worst_null = std::max(worst_null, std::fabs(lm));
      }
    }
    chk.expect(worst_null <= 1e-10 * std::max(1.0, mnorm),
               "null vectors annihilate M (worst residual " + fmt(worst_null) +
                   ")");

    // Completeness: sum_a P^(a) L^(a) + sum_b P~^(b) L~^(b) = I.
    std::vector<double> sum(dim * dim, 0.0);
    auto accumulate = [&](hv_frame_set pset, hv_frame_set lset, int count) {
      std::vector<double> pv(dim), lv(dim);
      for (int k = 0; k < count; ++k) {
        require(hv_frame_vector(frame, pset, k, pv.data()),
                "reading frame vector");
        require(hv_frame_vector(frame, lset, k, lv.data()),
                "reading frame vector");
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) sum[i * dim + j] += pv[i] * lv[j];
      }
    };
    accumulate(HV_FRAME_P, HV_FRAME_L, nn);
    accumulate(HV_FRAME_P_TILDE, HV_FRAME_L_TILDE, dim - nn);
    double worst_complete = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        worst_complete = std::max(
            worst_complete, std::fabs(sum[i * dim + j] - (i == j ? 1.0 : 0.0)));
    chk.expect(worst_complete <= 1e-12,
               "dual frame is complete (worst deviation " +
                   fmt(worst_complete) + ")");
  }
  return chk.finalize(kExitOk);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Hodograph analysis of vorticity blowups for the homogeneous Euler "
      "equation"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--map", common.map_spec,
                 "Map spec 'name[:key=value,...]' or inline JSON");
  app.add_option("--config", common.config_path,
                 "JSON config file; keys mirror the flags");
  app.add_option("--out", common.out, "Output directory")
      ->capture_default_str();
  app.add_option("--workers", common.workers,
                 "Worker threads (0 = all cores)");
  app.add_flag("--check", common.check,
               "Assert reference values for built-in maps; exit 5 on "
               "violation");
  app.add_option("--seed", common.seed, "RNG seed for sampled checks")
      ->capture_default_str();

  SurfaceOpts surface;
  auto* cmd_surf = app.add_subcommand(
      "surface", "Blowup times and domain labels over a u-grid");
  cmd_surf->fallthrough();
  cmd_surf->add_option("--grid", surface.grid, "Grid counts, e.g. 400x400");
  cmd_surf->add_option("--box", surface.box, "u-box lo:hi,lo:hi[,lo:hi]");
  cmd_surf->add_option("--branch", surface.branch,
                       "Branch index (-1 = all branches)");
  cmd_surf->add_option("--locus-points", surface.locus_points,
                       "Root-merging locus sample count")
      ->capture_default_str();
  cmd_surf->add_option("--locus-branch", surface.locus_branch,
                       "Branch used for the locus trace");

  CatastropheOpts cata;
  auto* cmd_cata = app.add_subcommand(
      "catastrophe", "Earliest blowup point over the search box");
  cmd_cata->fallthrough();
  cmd_cata->add_option("--grid-per-axis", cata.grid_per_axis,
                       "Seeding grid resolution (0 = default)");
  cmd_cata->add_option("--refine-seeds", cata.refine_seeds,
                       "Simplex refinement seeds (0 = default)");
  cmd_cata->add_option("--nm-restarts", cata.nm_restarts,
                       "Shrinking-radius restarts (-1 = default)");
  cmd_cata->add_option("--branch", cata.branch,
                       "Branch index (-1 = all branches)");
  cmd_cata->add_option("--box", cata.box, "Search u-box lo:hi,...");

  VorticityOpts vort;
  auto* cmd_vort = app.add_subcommand(
      "vorticity", "Vorticity time series, Laurent fits, and snapshots");
  cmd_vort->fallthrough();
  cmd_vort->add_option("--u", vort.u, "Evaluation point u1,u2[,u3]");
  cmd_vort->add_option("--t-lo", vort.t_lo, "Series start time")
      ->capture_default_str();
  cmd_vort->add_option("--t-hi", vort.t_hi,
                       "Series end time (default 0.999 t_b)");
  cmd_vort->add_option("--nt", vort.nt, "Series sample count")
      ->capture_default_str();
  cmd_vort->add_option("--branch", vort.branch, "Branch index");
  cmd_vort->add_flag("--laurent", vort.laurent, "Fit a Laurent expansion");
  cmd_vort->add_option("--order", vort.order, "Laurent pole order")
      ->capture_default_str();
  cmd_vort->add_option("--tb", vort.tb, "Blowup time (default: first root)");
  cmd_vort->add_option("--window", vort.window, "Fit window lo:hi:n");
  cmd_vort->add_option("--snap-times", vort.snap_times,
                       "Comma list of snapshot times");
  cmd_vort->add_option("--snap-grid", vort.snap_grid,
                       "Snapshot grid counts, e.g. 64x64");

  ExponentOpts expo;
  auto* cmd_expo = app.add_subcommand(
      "exponent", "Temporal and fixed-time blowup exponents");
  cmd_expo->fallthrough();
  cmd_expo->add_option("--mode", expo.mode, "temporal | spatial")
      ->capture_default_str();
  cmd_expo->add_option("--u", expo.u, "Single evaluation point");
  cmd_expo->add_option("--locus", expo.locus,
                       "Fit at N root-merging locus points");
  cmd_expo->add_flag("--second-level", expo.second_level,
                     "Fit at scanned second-level points (needs --tb)");
  cmd_expo->add_option("--tb", expo.tb, "Blowup time override");
  cmd_expo->add_option("--window", expo.window, "Fit window lo:hi:n");
  cmd_expo->add_option("--box", expo.box, "u-box for locus/scan modes");
  cmd_expo->add_option("--points-file", expo.points_file,
                       "CSV of u rows to fit at");
  cmd_expo->add_option("--branch", expo.branch, "Branch index");
  cmd_expo->add_option("--direction", expo.direction,
                       "Spatial ray: 0 = singular, k >= 1 = control");
  cmd_expo->add_option("--sheet", expo.sheet, "Spatial sheet (+1 or -1)");
  cmd_expo->add_option("--ray-n", expo.ray_n, "Spatial ray sample count");
  cmd_expo->add_option("--trim", expo.trim,
                       "Window points trimmed at each end (-1 = default)");

  FieldOpts field;
  auto* cmd_fld = app.add_subcommand(
      "field", "Reconstruct the velocity field on an x-grid");
  cmd_fld->fallthrough();
  cmd_fld->add_option("--t", field.t, "Evaluation time")->capture_default_str();
  cmd_fld->add_option("--grid", field.grid, "Grid counts, e.g. 128x128");
  cmd_fld->add_option("--box", field.box, "x-box lo:hi,...");
  cmd_fld->add_flag("--binary", field.binary,
                    "Write field.bin instead of field.csv");
  cmd_fld->add_flag("--fd-curl", field.fd_curl,
                    "Emit an FD-curl cross-check file (2D)");
  cmd_fld->add_option("--stride", field.stride, "FD-curl cell stride")
      ->capture_default_str();

  FrameOpts frame;
  auto* cmd_frm = app.add_subcommand(
      "frame", "Adapted frame (and optional spatial fit) at a blowup point");
  cmd_frm->fallthrough();
  cmd_frm->add_option("--u", frame.u, "Blowup point u1,u2[,u3]");
  cmd_frm->add_option("--tb", frame.tb, "Blowup time (default: first root)");
  cmd_frm->add_option("--branch", frame.branch, "Branch index");
  cmd_frm->add_flag("--spatial", frame.spatial, "Also fit spatial exponents");
  cmd_frm->add_option("--direction", frame.direction,
                      "Spatial ray: 0 = singular, k >= 1 = control");
  cmd_frm->add_option("--sheet", frame.sheet, "Spatial sheet (+1 or -1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (!common.config_path.empty()) {
      std::ifstream is(common.config_path);
      if (!is)
        throw CliError{kExitConfig, "cannot open " + common.config_path};
      try {
        is >> common.cfg;
      } catch (const json::exception& e) {
        throw CliError{kExitConfig,
                       common.config_path + ": " + std::string(e.what())};
      }
      check_keys(common.cfg,
                 {"map", "out", "workers", "seed", "surface", "catastrophe",
                  "vorticity", "exponent", "field", "frame"},
                 "config");
      merge(&app, "--map", common.cfg, "map", common.map_spec);
      merge(&app, "--out", common.cfg, "out", common.out);
      merge(&app, "--workers", common.cfg, "workers", common.workers);
      merge(&app, "--seed", common.cfg, "seed", common.seed);
    }
    if (common.map_spec.empty())
      throw CliError{kExitConfig, "no map given (use --map or config 'map')"};

    MapHandle map;
    map.create(common.map_spec);

    if (app.got_subcommand(cmd_surf)) {
      const json sec = config_section(
          common, "surface",
          {"grid", "box", "branch", "locus-points", "locus-branch"});
      merge(cmd_surf, "--grid", sec, "grid", surface.grid);
      merge(cmd_surf, "--box", sec, "box", surface.box);
      merge(cmd_surf, "--branch", sec, "branch", surface.branch);
      merge(cmd_surf, "--locus-points", sec, "locus-points",
            surface.locus_points);
      merge(cmd_surf, "--locus-branch", sec, "locus-branch",
            surface.locus_branch);
      return cmd_surface(common, surface, map);
    }
    if (app.got_subcommand(cmd_cata)) {
      const json sec = config_section(common, "catastrophe",
                                      {"grid-per-axis", "refine-seeds",
                                       "nm-restarts", "branch", "box"});
      merge(cmd_cata, "--grid-per-axis", sec, "grid-per-axis",
            cata.grid_per_axis);
      merge(cmd_cata, "--refine-seeds", sec, "refine-seeds", cata.refine_seeds);
      merge(cmd_cata, "--nm-restarts", sec, "nm-restarts", cata.nm_restarts);
      merge(cmd_cata, "--branch", sec, "branch", cata.branch);
      merge(cmd_cata, "--box", sec, "box", cata.box);
      return cmd_catastrophe(common, cata, map);
    }
    if (app.got_subcommand(cmd_vort)) {
      const json sec = config_section(
          common, "vorticity",
          {"u", "t-lo", "t-hi", "nt", "branch", "laurent", "order", "tb",
           "window", "snap-times", "snap-grid"});
      merge(cmd_vort, "--u", sec, "u", vort.u);
      merge(cmd_vort, "--t-lo", sec, "t-lo", vort.t_lo);
      merge(cmd_vort, "--t-hi", sec, "t-hi", vort.t_hi);
      merge(cmd_vort, "--nt", sec, "nt", vort.nt);
      merge(cmd_vort, "--branch", sec, "branch", vort.branch);
      merge(cmd_vort, "--laurent", sec, "laurent", vort.laurent);
      merge(cmd_vort, "--order", sec, "order", vort.order);
      merge(cmd_vort, "--tb", sec, "tb", vort.tb);
      merge(cmd_vort, "--window", sec, "window", vort.window);
      merge(cmd_vort, "--snap-times", sec, "snap-times", vort.snap_times);
      merge(cmd_vort, "--snap-grid", sec, "snap-grid", vort.snap_grid);
      return cmd_vorticity(common, vort, map);
    }
    if (app.got_subcommand(cmd_expo)) {
      const json sec = config_section(
          common, "exponent",
          {"mode", "u", "locus", "second-level", "tb", "window", "box",
           "points-file", "branch", "direction", "sheet", "ray-n", "trim"});
      merge(cmd_expo, "--mode", sec, "mode", expo.mode);
      merge(cmd_expo, "--u", sec, "u", expo.u);
      merge(cmd_expo, "--locus", sec, "locus", expo.locus);
      merge(cmd_expo, "--second-level", sec, "second-level", expo.second_level);
      merge(cmd_expo, "--tb", sec, "tb", expo.tb);
      merge(cmd_expo, "--window", sec, "window", expo.window);
      merge(cmd_expo, "--box", sec, "box", expo.box);
      merge(cmd_expo, "--points-file", sec, "points-file", expo.points_file);
      merge(cmd_expo, "--branch", sec, "branch", expo.branch);
      merge(cmd_expo, "--direction", sec, "direction", expo.direction);
      merge(cmd_expo, "--sheet", sec, "sheet", expo.sheet);
      merge(cmd_expo, "--ray-n", sec, "ray-n", expo.ray_n);
      merge(cmd_expo, "--trim", sec, "trim", expo.trim);
      return cmd_exponent(common, expo, map);
    }
    if (app.got_subcommand(cmd_fld)) {
      const json sec = config_section(
          common, "field", {"t", "grid", "box", "binary", "fd-curl", "stride"});
      merge(cmd_fld, "--t", sec, "t", field.t);
      merge(cmd_fld, "--grid", sec, "grid", field.grid);
      merge(cmd_fld, "--box", sec, "box", field.box);
      merge(cmd_fld, "--binary", sec, "binary", field.binary);
      merge(cmd_fld, "--fd-curl", sec, "fd-curl", field.fd_curl);
      merge(cmd_fld, "--stride", sec, "stride", field.stride);
      return cmd_field(common, field, map);
    }
    if (app.got_subcommand(cmd_frm)) {
      const json sec = config_section(
          common, "frame",
          {"u", "tb", "branch", "spatial", "direction", "sheet"});
      merge(cmd_frm, "--u", sec, "u", frame.u);
      merge(cmd_frm, "--tb", sec, "tb", frame.tb);
      merge(cmd_frm, "--branch", sec, "branch", frame.branch);
      merge(cmd_frm, "--spatial", sec, "spatial", frame.spatial);
      merge(cmd_frm, "--direction", sec, "direction", frame.direction);
      merge(cmd_frm, "--sheet", sec, "sheet", frame.sheet);
      return cmd_frame(common, frame, map);
    }
    throw CliError{kExitConfig, "no subcommand given"};
  } catch (const CliError& e) {
    std::cerr << "hodovort: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "hodovort: " << e.what() << "\n";
    return kExitRuntime;
  }
}
