/* C interface to the hodograph vorticity-blowup library.
 *
 * All functions returning hv_status set a thread-local message retrievable
 * through hv_last_error() on failure. Buffers are caller-allocated; sizes
 * derive from hv_map_dim() unless stated otherwise. Matrices are row-major.
 */
#ifndef HODOVORT_H
#define HODOVORT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef HV_API
#define HV_API __attribute__((visibility("default")))
#endif

#define HV_MAX_DIM 8

typedef enum {
  HV_OK = 0,
  HV_ERR_INVALID_ARGUMENT,
  HV_ERR_PARSE,
  HV_ERR_CONFIG,
  HV_ERR_DOMAIN,
  HV_ERR_DERIVATIVE,
  HV_ERR_SINGULAR,
  HV_ERR_DEGENERATE,
  HV_ERR_NO_CONVERGENCE,
  HV_ERR_BRANCH_VIOLATION,
  HV_ERR_NO_BLOWUP,
  HV_ERR_EMPTY_LOCUS,
  HV_ERR_WINDOW,
  HV_ERR_CONTAMINATION,
  HV_ERR_NOT_AVAILABLE,
  HV_ERR_FULL_RANK,
  HV_ERR_ZERO_VORTICITY,
  HV_ERR_IO,
  HV_ERR_INTERNAL
} hv_status;

typedef enum {
  HV_SAMPLE_OK = 0,
  HV_SAMPLE_NO_CONVERGENCE,
  HV_SAMPLE_SINGULAR,
  HV_SAMPLE_BRANCH_VIOLATION,
  HV_SAMPLE_OUT_OF_DOMAIN
} hv_sample_status;

/* Domain labels for the 2D discriminant decomposition. */
typedef enum { HV_DOMAIN_DPLUS = 0, HV_DOMAIN_DMINUS = 1, HV_DOMAIN_DZERO = 2 } hv_domain_label;

typedef struct hv_map hv_map;
typedef struct hv_grid hv_grid;
typedef struct hv_frame hv_frame;

HV_API const char* hv_last_error(void);
HV_API const char* hv_status_name(hv_status s);
HV_API const char* hv_version(void);

/* ---- map lifecycle ----------------------------------------------------- */

/* Spec strings look like "cubic", "rotational:alpha=1",
 * "harmonic:W=(u1^2-u2^2)/2", "expr:f1=u1+u2,f2=u2". */
HV_API hv_status hv_map_create_spec(const char* spec, hv_map** out);
/* JSON object with the same content ({"builtin": ..., "params": {...}} or
 * {"expr": [...], "dim": n, "box": [[lo,hi],...]}); unknown keys rejected. */
HV_API hv_status hv_map_create_json(const char* json_text, hv_map** out);
HV_API void hv_map_free(hv_map* map);

HV_API int hv_map_dim(const hv_map* map);
HV_API int hv_map_branch_count(const hv_map* map);
HV_API const char* hv_map_name(const hv_map* map);
HV_API hv_status hv_map_branch_name(const hv_map* map, int branch, char* buf,
                                    size_t cap);
HV_API hv_status hv_map_search_box(const hv_map* map, double* lo, double* hi);
HV_API hv_status hv_map_f(const hv_map* map, int branch, const double* u,
                          double* out_f);
HV_API hv_status hv_map_jacobian(const hv_map* map, int branch,
                                 const double* u, double* out);
HV_API int hv_map_has_initial_data(const hv_map* map);
HV_API hv_status hv_map_initial_data(const hv_map* map, const double* x,
                                     double* out_u);
HV_API int hv_map_in_domain(const hv_map* map, int branch, const double* u);

/* ---- hodograph matrix -------------------------------------------------- */

HV_API hv_status hv_det(const hv_map* map, int branch, double t,
                        const double* u, double* out);
HV_API hv_status hv_adjugate(const hv_map* map, int branch, double t,
                             const double* u, double* out);
HV_API hv_status hv_velocity_gradient(const hv_map* map, int branch, double t,
                                      const double* u, double* out);
HV_API hv_status hv_char_coeffs(const hv_map* map, int branch, const double* u,
                                double* out_a);
HV_API hv_status hv_rank(const hv_map* map, int branch, double t,
                         const double* u, int* out);

/* ---- blowup surface ---------------------------------------------------- */

/* Real roots of det M(., u) with multiplicities and derivative diagnostics.
 * Arrays hold up to `cap` entries; *count reports how many exist. */
HV_API hv_status hv_branch_times(const hv_map* map, int branch,
                                 const double* u, double* out_t, int* out_mult,
                                 double* out_d1, double* out_d2, int cap,
                                 int* count);
HV_API hv_status hv_discriminant_2d(const hv_map* map, int branch,
                                    const double* u, double* out);
HV_API hv_status hv_classify_domain(const hv_map* map, int branch,
                                    const double* u, int* out_label);

typedef struct {
  int grid_per_axis; /* <= 0: default 200 */
  int refine_seeds;  /* <= 0: default 5 */
  int nm_restarts;   /* <  0: default 8 */
  int branch;        /* -1: search every branch */
  int workers;       /* <= 0: 1 */
  int use_box;       /* nonzero: lo/hi override the map's search box */
  double lo[HV_MAX_DIM];
  double hi[HV_MAX_DIM];
} hv_catastrophe_options;

typedef struct {
  double t_c;
  double u_c[HV_MAX_DIM];
  double x_c[HV_MAX_DIM];
  int branch;
  long n_evals;
  char branch_name[32];
} hv_catastrophe_result;

/* opts may be NULL for defaults. HV_ERR_NO_BLOWUP when the box is clean. */
HV_API hv_status hv_find_catastrophe(const hv_map* map,
                                     const hv_catastrophe_options* opts,
                                     hv_catastrophe_result* out);

/* Root-merging locus points. out_u holds n_points * dim doubles. */
HV_API hv_status hv_double_root_locus(const hv_map* map, int branch,
                                      const double* lo, const double* hi,
                                      int n_points, double* out_u,
                                      double* out_t, int* count);

/* Candidate second-level (cusp) points on det M(t_b, .) = 0, 2D maps. */
HV_API hv_status hv_second_level_scan(const hv_map* map, int branch,
                                      double t_b, const double* lo,
                                      const double* hi, int max_points,
                                      double* out_u, int* count);

/* ---- vorticity --------------------------------------------------------- */

HV_API hv_status hv_vorticity_scalar_2d(const hv_map* map, int branch,
                                        double t, const double* u,
                                        double* out);
HV_API hv_status hv_vorticity_vector(const hv_map* map, int branch, double t,
                                     const double* u, double* out3);
HV_API hv_status hv_vorticity_two_form(const hv_map* map, int branch, double t,
                                       const double* u, double* out);
HV_API hv_status hv_stress_tensor(const hv_map* map, int branch, double t,
                                  const double* u, double* out);

/* Residue data at a simple root. Axial component count: 1 (2D), 3 (3D),
 * n(n-1)/2 beyond; reported in *n_axial. */
HV_API hv_status hv_sigma(const hv_map* map, int branch, const double* u_b,
                          double t_b, double* out_sigma,
                          double* out_sigma_prime, double* out_d1,
                          double* out_d2, int* n_axial);

/* Per-root temporal blowup orders (0 = bounded). */
HV_API hv_status hv_temporal_degrees(const hv_map* map, int branch,
                                     const double* u_b, double* out_t,
                                     int* out_mult, int* out_degree, int cap,
                                     int* count);

typedef struct {
  double lo;    /* <= 0: default 1e-6 */
  double hi;    /* <= 0: default 1e-2 */
  int n_points; /* <= 0: default 16 */
} hv_fit_window;

HV_API hv_status hv_fit_temporal(const hv_map* map, int branch,
                                 const double* u_b, double t_b,
                                 const hv_fit_window* window, double* slope,
                                 double* slope_err, int* side);

typedef struct {
  int order;
  int side;
  int n_points;
  double coeffs[HV_MAX_DIM];      /* c_{-order}..c_1, order+2 entries */
  double uncertainty[HV_MAX_DIM];
  double residual;
} hv_laurent_result;

HV_API hv_status hv_laurent_fit(const hv_map* map, int branch,
                                const double* u_b, double t_b, int order,
                                const hv_fit_window* window,
                                hv_laurent_result* out);

/* ---- field reconstruction ---------------------------------------------- */

typedef struct {
  double x[HV_MAX_DIM];
  double t;
  double u[HV_MAX_DIM];
  int branch;
  double residual;
  int newton_iters;
  int status; /* hv_sample_status */
} hv_field_sample;

/* Branch-resolving solve with automatic seeding. Failures are reported in
 * out->status, not as an hv_status error. */
HV_API hv_status hv_solve_point(const hv_map* map, const double* x, double t,
                                hv_field_sample* out);
HV_API hv_status hv_solve_point_branch(const hv_map* map, int branch,
                                       const double* x, double t,
                                       const double* seed,
                                       hv_field_sample* out);

HV_API hv_status hv_solve_grid(const hv_map* map, const double* lo,
                               const double* hi, const int* count, double t,
                               int workers, hv_grid** out);
HV_API void hv_grid_free(hv_grid* grid);
HV_API long hv_grid_total(const hv_grid* grid);
HV_API long hv_grid_masked(const hv_grid* grid);
HV_API hv_status hv_grid_get(const hv_grid* grid, long index,
                             hv_field_sample* out);
HV_API hv_status hv_grid_write_csv(const hv_grid* grid, const char* path);
HV_API hv_status hv_grid_write_binary(const hv_grid* grid, const char* path);
HV_API hv_status hv_grid_read_binary(const char* path, hv_grid** out);

HV_API hv_status hv_fd_gradient(const hv_map* map, const double* x, double t,
                                double h, double* out);
HV_API hv_status hv_characteristics_check(const hv_map* map, const double* x,
                                          double t, double* out);

/* ---- adapted frame ----------------------------------------------------- */

typedef enum {
  HV_FRAME_R = 0,
  HV_FRAME_L = 1,
  HV_FRAME_R_TILDE = 2,
  HV_FRAME_L_TILDE = 3,
  HV_FRAME_P = 4,
  HV_FRAME_P_TILDE = 5
} hv_frame_set;

HV_API hv_status hv_build_frame(const hv_map* map, int branch,
                                const double* u_b, double t_b,
                                hv_frame** out);
HV_API void hv_frame_free(hv_frame* frame);
HV_API int hv_frame_rank(const hv_frame* frame);
HV_API int hv_frame_null_count(const hv_frame* frame);
HV_API hv_status hv_frame_vector(const hv_frame* frame, hv_frame_set which,
                                 int index, double* out);
HV_API hv_status hv_frame_q(const hv_frame* frame, double* out);
HV_API hv_status hv_frame_displacement_to_y(const hv_frame* frame,
                                            const double* dx, double* out);
HV_API hv_status hv_frame_write_json(const hv_frame* frame, const char* path);

typedef struct {
  int direction; /* 0: singular ray; k >= 1: k-th control direction */
  int sheet;     /* +1 or -1 */
  double lo;     /* <= 0: default 1e-7 */
  double hi;     /* <= 0: default 1e-3 */
  int n_points;  /* <= 0: default 20 */
  int trim;      /* <  0: default 4 */
} hv_ray_spec;

typedef struct {
  double omega_slope;
  double omega_err;
  double fold_coeff;
  int n_valid;
  int dim;
  double ray[HV_MAX_DIM];
  double v_slopes[HV_MAX_DIM * HV_MAX_DIM]; /* row-major dim x dim; NaN = n/a */
  double v_errs[HV_MAX_DIM * HV_MAX_DIM];
} hv_spatial_fit;

HV_API hv_status hv_fit_spatial(const hv_map* map, int branch,
                                const double* u_b, double t_b,
                                const hv_ray_spec* ray, hv_spatial_fit* out);

#undef HV_API

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HODOVORT_H */
