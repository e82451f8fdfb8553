#include "hodovort.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "core/blowup.hpp"
#include "core/errors.hpp"
#include "core/field.hpp"
#include "core/frame.hpp"
#include "core/hodograph.hpp"
#include "core/initial_map.hpp"
#include "core/mapspec.hpp"
#include "core/serialize.hpp"
#include "core/smallmat.hpp"
#include "core/vorticity.hpp"

struct hv_map {
  std::unique_ptr<hodo::InitialMap> impl;
  std::string name;
};

struct hv_grid {
  hodo::FieldGrid impl;
};

struct hv_frame {
  hodo::AdaptedFrame impl;
};

namespace {

thread_local std::string g_error;

hv_status status_of(hodo::errc c) {
  return static_cast<hv_status>(static_cast<int>(c) + 1);
}

template <typename Fn>
hv_status guarded(Fn&& fn) {
  try {
    fn();
    g_error.clear();
    return HV_OK;
  } catch (const hodo::error& e) {
    g_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_error = e.what();
    return HV_ERR_INTERNAL;
  }
}

hv_status bad_arg(const char* msg) {
  g_error = msg;
  return HV_ERR_INVALID_ARGUMENT;
}

hodo::Vec to_vec(const double* p, std::size_t n) {
  return hodo::Vec(p, p + n);
}

void from_vec(const hodo::Vec& v, double* out) {
  std::copy(v.begin(), v.end(), out);
}

void from_mat(const hodo::Mat& m, double* out) {
  std::copy(m.data().begin(), m.data().end(), out);
}

// Branch range check shared by every per-branch entry point.
void check_branch(const hv_map* map, int branch) {
  if (branch < 0 || branch >= map->impl->branch_count())
    hodo::fail(hodo::errc::invalid_argument,
               "branch index " + std::to_string(branch) + " out of range");
}

hodo::MapRef ref(const hv_map* map, int branch) {
  check_branch(map, branch);
  return hodo::MapRef(*map->impl, branch);
}

hodo::FitWindow window_of(const hv_fit_window* w) {
  hodo::FitWindow fw;
  if (w) {
    if (w->lo > 0) fw.lo = w->lo;
    if (w->hi > 0) fw.hi = w->hi;
    if (w->n_points > 0) fw.n_points = w->n_points;
  }
  return fw;
}

void fill_sample(const hodo::FieldSample& s, hv_field_sample* out) {
  std::memset(out, 0, sizeof(*out));
  from_vec(s.x, out->x);
  out->t = s.t;
  from_vec(s.u, out->u);
  out->branch = s.branch;
  out->residual = s.residual;
  out->newton_iters = s.newton_iters;
  out->status = static_cast<int>(s.status);
}

void finish_map(std::unique_ptr<hodo::InitialMap> m, hv_map** out) {
  if (m->dim() > HV_MAX_DIM)
    hodo::fail(hodo::errc::invalid_argument,
               "map dimension exceeds HV_MAX_DIM");
  auto handle = std::make_unique<hv_map>();
  handle->name = m->name();
  handle->impl = std::move(m);
  *out = handle.release();
}

void checked_write(const char* path,
                   const std::function<void(std::ostream&)>& body,
                   bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os)
    hodo::fail(hodo::errc::io, std::string("cannot open ") + path);
  body(os);
  os.flush();
  if (!os)
    hodo::fail(hodo::errc::io, std::string("write failed: ") + path);
}

}  // namespace

extern "C" {

const char* hv_last_error(void) { return g_error.c_str(); }

const char* hv_status_name(hv_status s) {
  if (s == HV_OK) return "ok";
  if (s < HV_OK || s > HV_ERR_INTERNAL) return "unknown";
  return hodo::errc_name(static_cast<hodo::errc>(static_cast<int>(s) - 1));
}

const char* hv_version(void) { return "1.0.0"; }

/* ---- map lifecycle ----------------------------------------------------- */

hv_status hv_map_create_spec(const char* spec, hv_map** out) {
  if (!spec || !out) return bad_arg("null argument to hv_map_create_spec");
  *out = nullptr;
  return guarded([&] { finish_map(hodo::map_from_spec(spec), out); });
}

hv_status hv_map_create_json(const char* json_text, hv_map** out) {
  if (!json_text || !out) return bad_arg("null argument to hv_map_create_json");
  *out = nullptr;
  return guarded([&] { finish_map(hodo::map_from_json(json_text), out); });
}

void hv_map_free(hv_map* map) { delete map; }

int hv_map_dim(const hv_map* map) {
  return map ? static_cast<int>(map->impl->dim()) : 0;
}

int hv_map_branch_count(const hv_map* map) {
  return map ? map->impl->branch_count() : 0;
}

const char* hv_map_name(const hv_map* map) {
  return map ? map->name.c_str() : "";
}

hv_status hv_map_branch_name(const hv_map* map, int branch, char* buf,
                             size_t cap) {
  if (!map || !buf || cap == 0) return bad_arg("null argument to hv_map_branch_name");
  return guarded([&] {
    check_branch(map, branch);
    const std::string name = map->impl->branch_name(branch);
    std::snprintf(buf, cap, "%s", name.c_str());
  });
}

hv_status hv_map_search_box(const hv_map* map, double* lo, double* hi) {
  if (!map || !lo || !hi) return bad_arg("null argument to hv_map_search_box");
  return guarded([&] {
    const hodo::Box box = map->impl->search_box();
    from_vec(box.lo, lo);
    from_vec(box.hi, hi);
  });
}

hv_status hv_map_f(const hv_map* map, int branch, const double* u,
                   double* out_f) {
  if (!map || !u || !out_f) return bad_arg("null argument to hv_map_f");
  return guarded([&] {
    auto r = ref(map, branch);
    from_vec(r.f(to_vec(u, r.dim())), out_f);
  });
}

hv_status hv_map_jacobian(const hv_map* map, int branch, const double* u,
                          double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_map_jacobian");
  return guarded([&] {
    auto r = ref(map, branch);
    from_mat(r.jacobian(to_vec(u, r.dim())), out);
  });
}

int hv_map_has_initial_data(const hv_map* map) {
  return map && map->impl->has_initial_data() ? 1 : 0;
}

hv_status hv_map_initial_data(const hv_map* map, const double* x,
                              double* out_u) {
  if (!map || !x || !out_u) return bad_arg("null argument to hv_map_initial_data");
  return guarded([&] {
    from_vec(map->impl->initial_data(to_vec(x, map->impl->dim())), out_u);
  });
}

int hv_map_in_domain(const hv_map* map, int branch, const double* u) {
  if (!map || !u) return 0;
  if (branch < 0 || branch >= map->impl->branch_count()) return 0;
  return map->impl->in_domain(to_vec(u, map->impl->dim()), branch) ? 1 : 0;
}

/* ---- hodograph matrix -------------------------------------------------- */

hv_status hv_det(const hv_map* map, int branch, double t, const double* u,
                 double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_det");
  return guarded([&] {
    auto r = ref(map, branch);
    *out = hodo::build_matrix(r, t, to_vec(u, r.dim())).det;
  });
}

hv_status hv_adjugate(const hv_map* map, int branch, double t, const double* u,
                      double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_adjugate");
  return guarded([&] {
    auto r = ref(map, branch);
    from_mat(hodo::build_matrix(r, t, to_vec(u, r.dim())).adj, out);
  });
}

hv_status hv_velocity_gradient(const hv_map* map, int branch, double t,
                               const double* u, double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_velocity_gradient");
  return guarded([&] {
    auto r = ref(map, branch);
    const auto mh = hodo::build_matrix(r, t, to_vec(u, r.dim()));
    from_mat(hodo::derivatives_from_inverse(mh), out);
  });
}

hv_status hv_char_coeffs(const hv_map* map, int branch, const double* u,
                         double* out_a) {
  if (!map || !u || !out_a) return bad_arg("null argument to hv_char_coeffs");
  return guarded([&] {
    auto r = ref(map, branch);
    from_vec(hodo::characteristic_coefficients(r, to_vec(u, r.dim())).a, out_a);
  });
}

hv_status hv_rank(const hv_map* map, int branch, double t, const double* u,
                  int* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_rank");
  return guarded([&] {
    auto r = ref(map, branch);
    *out = hodo::build_matrix(r, t, to_vec(u, r.dim())).rank;
  });
}

/* ---- blowup surface ---------------------------------------------------- */

hv_status hv_branch_times(const hv_map* map, int branch, const double* u,
                          double* out_t, int* out_mult, double* out_d1,
                          double* out_d2, int cap, int* count) {
  if (!map || !u || !out_t || !out_mult || !out_d1 || !out_d2 || !count)
    return bad_arg("null argument to hv_branch_times");
  return guarded([&] {
    auto r = ref(map, branch);
    const auto set = hodo::branch_times(r, to_vec(u, r.dim()));
    *count = static_cast<int>(set.roots.size());
    const int n = std::min(*count, cap);
    for (int i = 0; i < n; ++i) {
      out_t[i] = set.roots[i].t;
      out_mult[i] = set.roots[i].multiplicity;
      out_d1[i] = set.roots[i].d1;
      out_d2[i] = set.roots[i].d2;
    }
  });
}

hv_status hv_discriminant_2d(const hv_map* map, int branch, const double* u,
                             double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_discriminant_2d");
  return guarded([&] {
    auto r = ref(map, branch);
    *out = hodo::discriminant_2d(r, to_vec(u, r.dim()));
  });
}

hv_status hv_classify_domain(const hv_map* map, int branch, const double* u,
                             int* out_label) {
  if (!map || !u || !out_label) return bad_arg("null argument to hv_classify_domain");
  return guarded([&] {
    auto r = ref(map, branch);
    *out_label = static_cast<int>(hodo::classify_domain(r, to_vec(u, r.dim())));
  });
}

hv_status hv_find_catastrophe(const hv_map* map,
                              const hv_catastrophe_options* opts,
                              hv_catastrophe_result* out) {
  if (!map || !out) return bad_arg("null argument to hv_find_catastrophe");
  return guarded([&] {
    hodo::CatastropheOptions co;
    hodo::Box box = map->impl->search_box();
    if (opts) {
      if (opts->grid_per_axis > 0) co.grid_per_axis = opts->grid_per_axis;
      if (opts->refine_seeds > 0) co.refine_seeds = opts->refine_seeds;
      if (opts->nm_restarts >= 0) co.nm_restarts = opts->nm_restarts;
      co.branch = opts->branch;
      if (opts->workers > 0) co.workers = opts->workers;
      if (opts->use_box) {
        const std::size_t n = map->impl->dim();
        box.lo = to_vec(opts->lo, n);
        box.hi = to_vec(opts->hi, n);
      }
    }
    const auto r = hodo::find_catastrophe(*map->impl, box, co);
    std::memset(out, 0, sizeof(*out));
    out->t_c = r.t_c;
    from_vec(r.u_c, out->u_c);
    from_vec(r.x_c, out->x_c);
    out->branch = r.branch;
    out->n_evals = r.n_evals;
    std::snprintf(out->branch_name, sizeof(out->branch_name), "%s",
                  r.branch_name.c_str());
  });
}

hv_status hv_double_root_locus(const hv_map* map, int branch, const double* lo,
                               const double* hi, int n_points, double* out_u,
                               double* out_t, int* count) {
  if (!map || !lo || !hi || !out_u || !out_t || !count)
    return bad_arg("null argument to hv_double_root_locus");
  if (n_points <= 0) return bad_arg("hv_double_root_locus needs n_points > 0");
  return guarded([&] {
    auto r = ref(map, branch);
    const std::size_t n = r.dim();
    const hodo::Box box{to_vec(lo, n), to_vec(hi, n)};
    const auto pts = hodo::double_root_locus(r, box, n_points);
    *count = static_cast<int>(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      from_vec(pts[i].u, out_u + i * n);
      out_t[i] = pts[i].t_b;
    }
  });
}

hv_status hv_second_level_scan(const hv_map* map, int branch, double t_b,
                               const double* lo, const double* hi,
                               int max_points, double* out_u, int* count) {
  if (!map || !lo || !hi || !out_u || !count)
    return bad_arg("null argument to hv_second_level_scan");
  if (max_points <= 0) return bad_arg("hv_second_level_scan needs max_points > 0");
  return guarded([&] {
    auto r = ref(map, branch);
    const std::size_t n = r.dim();
    const hodo::Box box{to_vec(lo, n), to_vec(hi, n)};
    const auto pts = hodo::second_level_scan(r, t_b, box, max_points);
    *count = static_cast<int>(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      from_vec(pts[i].u, out_u + i * n);
  });
}

/* ---- vorticity --------------------------------------------------------- */

hv_status hv_vorticity_scalar_2d(const hv_map* map, int branch, double t,
                                 const double* u, double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_vorticity_scalar_2d");
  return guarded([&] {
    auto r = ref(map, branch);
    *out = hodo::vorticity_scalar_2d(r, t, to_vec(u, r.dim()));
  });
}

hv_status hv_vorticity_vector(const hv_map* map, int branch, double t,
                              const double* u, double* out3) {
  if (!map || !u || !out3) return bad_arg("null argument to hv_vorticity_vector");
  return guarded([&] {
    auto r = ref(map, branch);
    from_vec(hodo::vorticity_vector(r, t, to_vec(u, r.dim())).axial, out3);
  });
}

hv_status hv_vorticity_two_form(const hv_map* map, int branch, double t,
                                const double* u, double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_vorticity_two_form");
  return guarded([&] {
    auto r = ref(map, branch);
    from_mat(hodo::vorticity_two_form(r, t, to_vec(u, r.dim())), out);
  });
}

hv_status hv_stress_tensor(const hv_map* map, int branch, double t,
                           const double* u, double* out) {
  if (!map || !u || !out) return bad_arg("null argument to hv_stress_tensor");
  return guarded([&] {
    auto r = ref(map, branch);
    from_mat(hodo::stress_tensor(r, t, to_vec(u, r.dim())), out);
  });
}

hv_status hv_sigma(const hv_map* map, int branch, const double* u_b, double t_b,
                   double* out_sigma, double* out_sigma_prime, double* out_d1,
                   double* out_d2, int* n_axial) {
  if (!map || !u_b || !out_sigma || !out_sigma_prime || !out_d1 || !out_d2 ||
      !n_axial)
    return bad_arg("null argument to hv_sigma");
  return guarded([&] {
    auto r = ref(map, branch);
    const auto sc = hodo::sigma_coefficients(r, to_vec(u_b, r.dim()), t_b);
    *n_axial = static_cast<int>(sc.sigma.size());
    from_vec(sc.sigma, out_sigma);
    from_vec(sc.sigma_prime, out_sigma_prime);
    *out_d1 = sc.d1;
    *out_d2 = sc.d2;
  });
}

hv_status hv_temporal_degrees(const hv_map* map, int branch, const double* u_b,
                              double* out_t, int* out_mult, int* out_degree,
                              int cap, int* count) {
  if (!map || !u_b || !out_t || !out_mult || !out_degree || !count)
    return bad_arg("null argument to hv_temporal_degrees");
  return guarded([&] {
    auto r = ref(map, branch);
    const auto degs = hodo::temporal_blowup_order(r, to_vec(u_b, r.dim()));
    *count = static_cast<int>(degs.size());
    const int n = std::min(*count, cap);
    for (int i = 0; i < n; ++i) {
      out_t[i] = degs[i].root.t;
      out_mult[i] = degs[i].root.multiplicity;
      out_degree[i] = degs[i].degree;
    }
  });
}

hv_status hv_fit_temporal(const hv_map* map, int branch, const double* u_b,
                          double t_b, const hv_fit_window* window,
                          double* slope, double* slope_err, int* side) {
  if (!map || !u_b || !slope || !slope_err || !side)
    return bad_arg("null argument to hv_fit_temporal");
  return guarded([&] {
    auto r = ref(map, branch);
    const auto fit = hodo::fit_temporal_exponent(r, to_vec(u_b, r.dim()), t_b,
                                                 window_of(window));
    *slope = fit.slope;
    *slope_err = fit.slope_err;
    *side = fit.side;
  });
}

hv_status hv_laurent_fit(const hv_map* map, int branch, const double* u_b,
                         double t_b, int order, const hv_fit_window* window,
                         hv_laurent_result* out) {
  if (!map || !u_b || !out) return bad_arg("null argument to hv_laurent_fit");
  if (order < 1 || order + 2 > HV_MAX_DIM)
    return bad_arg("hv_laurent_fit order out of range");
  return guarded([&] {
    auto r = ref(map, branch);
    const auto fit = hodo::laurent_fit(r, to_vec(u_b, r.dim()), t_b, order,
                                       window_of(window));
    std::memset(out, 0, sizeof(*out));
    out->order = fit.order;
    out->side = fit.side;
    out->n_points = fit.n_points;
    from_vec(fit.coeffs, out->coeffs);
    from_vec(fit.uncertainty, out->uncertainty);
    out->residual = fit.residual;
  });
}

/* ---- field reconstruction ---------------------------------------------- */

hv_status hv_solve_point(const hv_map* map, const double* x, double t,
                         hv_field_sample* out) {
  if (!map || !x || !out) return bad_arg("null argument to hv_solve_point");
  return guarded([&] {
    const auto s =
        hodo::solve_point_auto(*map->impl, to_vec(x, map->impl->dim()), t);
    fill_sample(s, out);
  });
}

hv_status hv_solve_point_branch(const hv_map* map, int branch, const double* x,
                                double t, const double* seed,
                                hv_field_sample* out) {
  if (!map || !x || !seed || !out)
    return bad_arg("null argument to hv_solve_point_branch");
  return guarded([&] {
    auto r = ref(map, branch);
    const std::size_t n = r.dim();
    const auto s = hodo::solve_point(r, to_vec(x, n), t, to_vec(seed, n));
    fill_sample(s, out);
  });
}

hv_status hv_solve_grid(const hv_map* map, const double* lo, const double* hi,
                        const int* count, double t, int workers,
                        hv_grid** out) {
  if (!map || !lo || !hi || !count || !out)
    return bad_arg("null argument to hv_solve_grid");
  *out = nullptr;
  return guarded([&] {
    const std::size_t n = map->impl->dim();
    hodo::GridSpec spec;
    spec.lo = to_vec(lo, n);
    spec.hi = to_vec(hi, n);
    spec.count.assign(count, count + n);
    for (int c : spec.count)
      if (c < 1)
        hodo::fail(hodo::errc::invalid_argument, "grid count must be >= 1");
    auto grid = std::make_unique<hv_grid>();
    grid->impl = hodo::solve_grid(*map->impl, spec, t, workers);
    *out = grid.release();
  });
}

void hv_grid_free(hv_grid* grid) { delete grid; }

long hv_grid_total(const hv_grid* grid) {
  return grid ? grid->impl.spec.total() : 0;
}

long hv_grid_masked(const hv_grid* grid) {
  return grid ? grid->impl.masked_count() : 0;
}

hv_status hv_grid_get(const hv_grid* grid, long index, hv_field_sample* out) {
  if (!grid || !out) return bad_arg("null argument to hv_grid_get");
  if (index < 0 || index >= grid->impl.spec.total())
    return bad_arg("hv_grid_get index out of range");
  fill_sample(grid->impl.samples[static_cast<std::size_t>(index)], out);
  g_error.clear();
  return HV_OK;
}

hv_status hv_grid_write_csv(const hv_grid* grid, const char* path) {
  if (!grid || !path) return bad_arg("null argument to hv_grid_write_csv");
  return guarded([&] {
    checked_write(path, [&](std::ostream& os) { hodo::write_grid_csv(os, grid->impl); },
                  false);
  });
}

hv_status hv_grid_write_binary(const hv_grid* grid, const char* path) {
  if (!grid || !path) return bad_arg("null argument to hv_grid_write_binary");
  return guarded([&] {
    checked_write(path,
                  [&](std::ostream& os) { hodo::write_grid_binary(os, grid->impl); },
                  true);
  });
}

hv_status hv_grid_read_binary(const char* path, hv_grid** out) {
  if (!path || !out) return bad_arg("null argument to hv_grid_read_binary");
  *out = nullptr;
  return guarded([&] {
    std::ifstream is(path, std::ios::binary);
    if (!is)
      hodo::fail(hodo::errc::io, std::string("cannot open ") + path);
    auto grid = std::make_unique<hv_grid>();
    grid->impl = hodo::read_grid_binary(is);
    *out = grid.release();
  });
}

hv_status hv_fd_gradient(const hv_map* map, const double* x, double t, double h,
                         double* out) {
  if (!map || !x || !out) return bad_arg("null argument to hv_fd_gradient");
  if (h <= 0) return bad_arg("hv_fd_gradient needs h > 0");
  return guarded([&] {
    from_mat(hodo::fd_gradient(*map->impl, to_vec(x, map->impl->dim()), t, h),
             out);
  });
}

hv_status hv_characteristics_check(const hv_map* map, const double* x, double t,
                                   double* out) {
  if (!map || !x || !out)
    return bad_arg("null argument to hv_characteristics_check");
  return guarded([&] {
    *out = hodo::characteristics_check(*map->impl,
                                       to_vec(x, map->impl->dim()), t);
  });
}

/* ---- adapted frame ----------------------------------------------------- */

hv_status hv_build_frame(const hv_map* map, int branch, const double* u_b,
                         double t_b, hv_frame** out) {
  if (!map || !u_b || !out) return bad_arg("null argument to hv_build_frame");
  *out = nullptr;
  return guarded([&] {
    auto r = ref(map, branch);
    auto frame = std::make_unique<hv_frame>();
    frame->impl = hodo::build_frame(r, to_vec(u_b, r.dim()), t_b);
    *out = frame.release();
  });
}

void hv_frame_free(hv_frame* frame) { delete frame; }

int hv_frame_rank(const hv_frame* frame) { return frame ? frame->impl.rank : 0; }

int hv_frame_null_count(const hv_frame* frame) {
  return frame ? frame->impl.null_count() : 0;
}

hv_status hv_frame_vector(const hv_frame* frame, hv_frame_set which, int index,
                          double* out) {
  if (!frame || !out) return bad_arg("null argument to hv_frame_vector");
  const std::vector<hodo::Vec>* set = nullptr;
  switch (which) {
    case HV_FRAME_R: set = &frame->impl.r_null; break;
    case HV_FRAME_L: set = &frame->impl.l_null; break;
    case HV_FRAME_R_TILDE: set = &frame->impl.r_comp; break;
    case HV_FRAME_L_TILDE: set = &frame->impl.l_comp; break;
    case HV_FRAME_P: set = &frame->impl.p; break;
    case HV_FRAME_P_TILDE: set = &frame->impl.p_tilde; break;
  }
  if (!set) return bad_arg("hv_frame_vector: unknown vector set");
  if (index < 0 || index >= static_cast<int>(set->size()))
    return bad_arg("hv_frame_vector index out of range");
  from_vec((*set)[static_cast<std::size_t>(index)], out);
  g_error.clear();
  return HV_OK;
}

hv_status hv_frame_q(const hv_frame* frame, double* out) {
  if (!frame || !out) return bad_arg("null argument to hv_frame_q");
  return guarded([&] { from_mat(hodo::q_matrix(frame->impl), out); });
}

hv_status hv_frame_displacement_to_y(const hv_frame* frame, const double* dx,
                                     double* out) {
  if (!frame || !dx || !out)
    return bad_arg("null argument to hv_frame_displacement_to_y");
  return guarded([&] {
    from_vec(hodo::displacement_to_y(frame->impl,
                                     to_vec(dx, frame->impl.dim())),
             out);
  });
}

hv_status hv_frame_write_json(const hv_frame* frame, const char* path) {
  if (!frame || !path) return bad_arg("null argument to hv_frame_write_json");
  return guarded([&] {
    hodo::write_text_file(path, hodo::frame_json(frame->impl) + "\n");
  });
}

hv_status hv_fit_spatial(const hv_map* map, int branch, const double* u_b,
                         double t_b, const hv_ray_spec* ray,
                         hv_spatial_fit* out) {
  if (!map || !u_b || !out) return bad_arg("null argument to hv_fit_spatial");
  return guarded([&] {
    auto r = ref(map, branch);
    hodo::RaySpec spec;
    if (ray) {
      if (ray->direction > 0) spec.direction = ray->direction;
      if (ray->sheet != 0) spec.sheet = ray->sheet < 0 ? -1 : +1;
      if (ray->lo > 0) spec.lo = ray->lo;
      if (ray->hi > 0) spec.hi = ray->hi;
      if (ray->n_points > 0) spec.n_points = ray->n_points;
      if (ray->trim >= 0) spec.trim = ray->trim;
    }
    const auto fit =
        hodo::fit_spatial_exponent(r, to_vec(u_b, r.dim()), t_b, spec);
    std::memset(out, 0, sizeof(*out));
    out->omega_slope = fit.omega_slope;
    out->omega_err = fit.omega_err;
    out->fold_coeff = fit.fold_coeff;
    out->n_valid = fit.n_valid;
    const int n = static_cast<int>(r.dim());
    out->dim = n;
    from_vec(fit.ray, out->ray);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out->v_slopes[i * n + j] = fit.v_slopes(i, j);
        out->v_errs[i * n + j] = fit.v_errs(i, j);
      }
  });
}

} /* extern "C" */
