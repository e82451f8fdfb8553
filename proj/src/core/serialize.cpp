#include "core/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "core/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "grid binary layout assumes a little-endian host");

namespace hodo {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) { return json(v); }

json mat_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (std::isfinite(v))
        row.push_back(v);
      else
        row.push_back(nullptr);
    }
    rows.push_back(row);
  }
  return rows;
}

json vecs_json(const std::vector<Vec>& vs) {
  json arr = json::array();
  for (const Vec& v : vs) arr.push_back(vec_json(v));
  return arr;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string catastrophe_json(const CatastropheResult& r) {
  json j;
  j["t_c"] = r.t_c;
  j["u_c"] = vec_json(r.u_c);
  j["x_c"] = vec_json(r.x_c);
  j["branch"] = r.branch;
  j["branch_name"] = r.branch_name;
  j["n_evals"] = r.n_evals;
  return j.dump(2) + "\n";
}

std::string laurent_json(const LaurentFit& f) {
  json j;
  j["order"] = f.order;
  j["side"] = f.side;
  json powers = json::array();
  for (int p = -f.order; p <= 1; ++p) powers.push_back(p);
  j["powers"] = powers;
  j["coeffs"] = vec_json(f.coeffs);
  j["uncertainty"] = vec_json(f.uncertainty);
  j["residual"] = f.residual;
  j["n_points"] = f.n_points;
  return j.dump(2) + "\n";
}

std::string frame_json(const AdaptedFrame& f) {
  json j;
  j["u_b"] = vec_json(f.u_b);
  j["t_b"] = f.t_b;
  j["rank"] = f.rank;
  j["R"] = vecs_json(f.r_null);
  j["L"] = vecs_json(f.l_null);
  j["R_tilde"] = vecs_json(f.r_comp);
  j["L_tilde"] = vecs_json(f.l_comp);
  j["P"] = vecs_json(f.p);
  j["P_tilde"] = vecs_json(f.p_tilde);
  j["q"] = mat_json(q_matrix(f));
  return j.dump(2) + "\n";
}

std::string spatial_fit_json(const SpatialFit& f) {
  json j;
  j["omega_slope"] = f.omega_slope;
  j["omega_err"] = f.omega_err;
  j["v_slopes"] = mat_json(f.v_slopes);
  j["v_errs"] = mat_json(f.v_errs);
  j["n_valid"] = f.n_valid;
  j["ray"] = vec_json(f.ray);
  j["fold_coeff"] = f.fold_coeff;
  return j.dump(2) + "\n";
}

void write_surface_csv(std::ostream& os,
                       const std::vector<BlowupBranchSet>& sets,
                       const std::vector<std::string>& labels) {
  const bool with_label = !labels.empty();
  if (sets.empty()) return;
  const std::size_t dim = sets[0].u.size();
  for (std::size_t i = 0; i < dim; ++i) os << "u" << (i + 1) << ",";
  if (with_label) os << "label,";
  os << "t,multiplicity\n";
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const BlowupBranchSet& s = sets[k];
    std::string prefix;
    for (double v : s.u) prefix += fmt_double(v) + ",";
    if (with_label) prefix += labels[k] + ",";
    if (s.roots.empty()) {
      os << prefix << ",\n";
      continue;
    }
    for (const RootInfo& r : s.roots)
      os << prefix << fmt_double(r.t) << "," << r.multiplicity << "\n";
  }
}

void write_locus_csv(std::ostream& os, const std::vector<LocusPoint>& pts) {
  if (pts.empty()) return;
  const std::size_t dim = pts[0].u.size();
  for (std::size_t i = 0; i < dim; ++i) os << "u" << (i + 1) << ",";
  os << "t_b\n";
  for (const LocusPoint& p : pts) {
    for (double v : p.u) os << fmt_double(v) << ",";
    os << fmt_double(p.t_b) << "\n";
  }
}

void write_series_csv(std::ostream& os, const std::vector<std::string>& headers,
                      const std::vector<double>& t,
                      const std::vector<Vec>& values) {
  os << "t";
  for (const std::string& h : headers) os << "," << h;
  os << "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << fmt_double(t[i]);
    for (double v : values[i]) os << "," << fmt_double(v);
    os << "\n";
  }
}

void write_exponent_csv(std::ostream& os,
                        const std::vector<ExponentRow>& rows) {
  if (rows.empty()) return;
  const std::size_t dim = rows[0].u.size();
  for (std::size_t i = 0; i < dim; ++i) os << "u" << (i + 1) << ",";
  os << "t_b,slope,stderr,level\n";
  for (const ExponentRow& r : rows) {
    for (double v : r.u) os << fmt_double(v) << ",";
    os << fmt_double(r.t_b) << "," << fmt_double(r.slope) << ","
       << fmt_double(r.slope_err) << "," << r.level << "\n";
  }
}

void write_grid_csv(std::ostream& os, const FieldGrid& grid) {
  const std::size_t dim = grid.spec.dim();
  for (std::size_t i = 0; i < dim; ++i) os << "x" << (i + 1) << ",";
  for (std::size_t i = 0; i < dim; ++i) os << "u" << (i + 1) << ",";
  os << "branch,mask\n";
  for (const FieldSample& s : grid.samples) {
    for (double v : s.x) os << fmt_double(v) << ",";
    for (double v : s.u) os << fmt_double(v) << ",";
    os << s.branch << "," << (s.ok() ? 0 : 1) << "\n";
  }
}

namespace {

void put_raw(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void put_f64(std::ostream& os, double v) { put_raw(os, &v, sizeof(v)); }
void put_u32(std::ostream& os, std::uint32_t v) { put_raw(os, &v, sizeof(v)); }

void get_raw(std::istream& is, void* p, std::size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) fail(errc::io, "grid binary: truncated stream");
}

double get_f64(std::istream& is) {
  double v;
  get_raw(is, &v, sizeof(v));
  return v;
}
std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v;
  get_raw(is, &v, sizeof(v));
  return v;
}

constexpr char kGridMagic[8] = {'H', 'V', 'G', 'R', 'I', 'D', '0', '1'};

}  // namespace

void write_grid_binary(std::ostream& os, const FieldGrid& grid) {
  put_raw(os, kGridMagic, sizeof(kGridMagic));
  const std::size_t dim = grid.spec.dim();
  put_u32(os, static_cast<std::uint32_t>(dim));
  for (std::size_t a = 0; a < dim; ++a) {
    put_f64(os, grid.spec.lo[a]);
    put_f64(os, grid.spec.hi[a]);
    put_u32(os, static_cast<std::uint32_t>(grid.spec.count[a]));
  }
  put_f64(os, grid.t);
  for (const FieldSample& s : grid.samples) {
    for (double v : s.u) put_f64(os, v);
    put_f64(os, static_cast<double>(s.branch));
    put_f64(os, s.ok() ? 0.0 : 1.0);
  }
}

FieldGrid read_grid_binary(std::istream& is) {
  char magic[8];
  get_raw(is, magic, sizeof(magic));
  if (std::memcmp(magic, kGridMagic, sizeof(magic)) != 0)
    fail(errc::io, "grid binary: bad magic");
  FieldGrid grid;
  const std::uint32_t dim = get_u32(is);
  if (dim == 0 || dim > 16) fail(errc::io, "grid binary: implausible dim");
  grid.spec.lo.resize(dim);
  grid.spec.hi.resize(dim);
  grid.spec.count.resize(dim);
  for (std::uint32_t a = 0; a < dim; ++a) {
    grid.spec.lo[a] = get_f64(is);
    grid.spec.hi[a] = get_f64(is);
    grid.spec.count[a] = static_cast<int>(get_u32(is));
    if (grid.spec.count[a] < 1) fail(errc::io, "grid binary: bad axis count");
  }
  grid.t = get_f64(is);
  const long total = grid.spec.total();
  grid.samples.resize(total);
  for (long idx = 0; idx < total; ++idx) {
    FieldSample& s = grid.samples[idx];
    s.t = grid.t;
    s.u.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) s.u[i] = get_f64(is);
    s.branch = static_cast<int>(get_f64(is));
    const double mask = get_f64(is);
    s.status = mask == 0.0 ? SampleStatus::ok : SampleStatus::no_convergence;
    // Reconstruct the cell coordinates from the spec.
    s.x.resize(dim);
    long rem = idx;
    for (std::uint32_t a = 0; a < dim; ++a) {
      s.x[a] = grid.spec.coord(static_cast<int>(a),
                               static_cast<int>(rem % grid.spec.count[a]));
      rem /= grid.spec.count[a];
    }
  }
  return grid;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io, "cannot open for writing: " + path);
  os << content;
  if (!os) fail(errc::io, "write failed: " + path);
}

}  // namespace hodo
