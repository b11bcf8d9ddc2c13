/* C interface to the one-way radiative transfer library.
 *
 * Conventions:
 *   - every function returns an owrte_status (0 == OWRTE_OK); on failure the
 *     thread-local message from owrte_last_error() describes what went wrong
 *   - objects from the _create and _build calls are released with the
 *     matching _free; freeing NULL is a no-op
 *   - array arguments are caller-allocated; sizes come from owrte_grid_size
 *     or are passed explicitly
 */
#ifndef OWRTE_H
#define OWRTE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum owrte_status {
  OWRTE_OK = 0,
  OWRTE_ERR_INVALID_ARGUMENT = 1,
  OWRTE_ERR_DOMAIN = 2,
  OWRTE_ERR_RANGE = 3,
  OWRTE_ERR_TOLERANCE = 4,
  OWRTE_ERR_INSTABILITY = 5,
  OWRTE_ERR_UNSUPPORTED = 6,
  OWRTE_ERR_CONFIG = 7,
  OWRTE_ERR_IO = 8,
  OWRTE_ERR_INTERNAL = 9
} owrte_status;

/* Message for the most recent failing call on this thread. */
const char* owrte_last_error(void);
const char* owrte_version(void);

/* ---------------------------------------------------------------- params */

typedef struct owrte_params {
  double k;         /* wavenumber */
  double ell;       /* correlation length */
  double alpha;     /* fluctuation strength */
  int d;            /* transverse dimension, 1 or 2 */
  double kappa_max; /* cone edge; 0 selects the default */
} owrte_params;

/* Fill with defaults: k = 2*pi, ell = 1, alpha = 0.05, d = 1, kappa_max = 0. */
void owrte_params_init(owrte_params* params);

/* Resolve kappa_max = 0 to the default edge for these parameters. */
owrte_status owrte_params_resolve(owrte_params* params);

/* --------------------------------------------------------------- spectrum */

typedef struct owrte_spectrum owrte_spectrum;

owrte_status owrte_spectrum_gaussian(double variance_scale, int d_total,
                                     owrte_spectrum** out);
owrte_status owrte_spectrum_lorentzian2d(double r0, double q_cutoff,
                                         owrte_spectrum** out);
owrte_status owrte_spectrum_tabulated(const double* s, const double* r,
                                      size_t n, int d_total,
                                      owrte_spectrum** out);
void owrte_spectrum_free(owrte_spectrum* spectrum);

owrte_status owrte_spectrum_autocov(const owrte_spectrum* spectrum, double s,
                                    double* out);
owrte_status owrte_spectrum_psd_iso(const owrte_spectrum* spectrum, double q,
                                    double* out);

/* ------------------------------------------------------------------- grid */

typedef struct owrte_grid owrte_grid;

/* Gauss-Legendre grid on the cone; d comes from params (d = 2 uses n_radial x
 * n_angular nodes, pass n_angular = 0 with d = 1). */
owrte_status owrte_grid_create(const owrte_params* params, int n,
                               int n_angular, owrte_grid** out);
/* Uniform midpoint grid on |kappa_x| <= kappa_window (d = 1 only). */
owrte_status owrte_grid_uniform(const owrte_params* params,
                                double kappa_window, int n, owrte_grid** out);
void owrte_grid_free(owrte_grid* grid);

owrte_status owrte_grid_size(const owrte_grid* grid, size_t* out);
/* Any output pointer may be NULL to skip that column. */
owrte_status owrte_grid_nodes(const owrte_grid* grid, double* kappa_x,
                              double* kappa_y, double* weight, double* beta);

/* ----------------------------------------------------------- cross section */

typedef struct owrte_table owrte_table;

owrte_status owrte_table_build(const owrte_params* params,
                               const owrte_spectrum* spectrum,
                               const owrte_grid* grid, int compute_imag_q,
                               owrte_table** out);
/* Small-angle (paraxial) variant of the collision table. */
owrte_status owrte_paraxial_table(const owrte_params* params,
                                  const owrte_spectrum* spectrum,
                                  const owrte_grid* grid, owrte_table** out);
void owrte_table_free(owrte_table* table);

/* sigma, mfp, q_re, q_im have grid-size length; any may be NULL. */
owrte_status owrte_table_columns(const owrte_table* table, double* sigma,
                                 double* mfp, double* q_re, double* q_im);
/* Row-major n x n differential kernel. */
owrte_status owrte_table_kernel(const owrte_table* table, double* q);
owrte_status owrte_table_stats(const owrte_table* table, double* max_sigma,
                               double* min_mfp, double* max_mfp);

/* High-frequency mean free path asymptote at direction kappa[2]. */
owrte_status owrte_mfp_highfreq(const owrte_params* params,
                                const owrte_spectrum* spectrum,
                                const double* kappa, double* out);

/* Total cross section Sigma(kappa) quadratured on the supplied grid; does not
 * need a prebuilt table, so it doubles as an independent cross-check. */
owrte_status owrte_total_xsection(const owrte_params* params,
                                  const owrte_spectrum* spectrum,
                                  const double* kappa, const owrte_grid* grid,
                                  double* out);

/* ----------------------------------------------------- limit verifications */

/* Henyey-Greenstein parameters implied by the Lorentzian medium (d = 1). */
owrte_status owrte_hg_params(double k_ell, double r0,
                             const owrte_params* params, double* g,
                             double* mu_s);
owrte_status owrte_hg_verify(const owrte_params* params,
                             const owrte_spectrum* spectrum, double r0,
                             int n_theta, double* max_rel_dev);
/* 3-D radiative transfer reduction check at a pair of directions (d = 2). */
owrte_status owrte_rte3d_verify(const owrte_params* params,
                                const owrte_spectrum* spectrum,
                                const double* kappa, const double* kappa_prime,
                                double c0, double* rel_dev);

/* -------------------------------------------------------------- transport */

/* out = collision operator applied to v (both grid-size). */
owrte_status owrte_collision_apply(const owrte_table* table, const double* v,
                                   double* out);

typedef enum owrte_angular_method {
  OWRTE_ANGULAR_RK4 = 0,
  OWRTE_ANGULAR_MATRIX_EXP = 1
} owrte_angular_method;

/* Homogeneous-in-x solve from (i0, z0) to each z_targets[t] (non-decreasing);
 * out is n_targets x n row-major.  step_fraction/fixed_step <= 0 keep the
 * defaults. */
owrte_status owrte_solve_angular(const owrte_table* table, const double* i0,
                                 double z0, const double* z_targets,
                                 size_t n_targets, int method,
                                 double step_fraction, double fixed_step,
                                 double* out);

/* Wigner solve on a periodic x-box: w0 and out slices are n_nodes x n_cells
 * row-major (node-major), n_cells = cells[0] * max(cells[1], 1); out is
 * n_targets such slices.  steps_per_mfp <= 0 keeps the default (50). */
owrte_status owrte_solve_wigner(const owrte_table* table, const double* w0,
                                double z0, const double* box,
                                const int* cells, const double* z_targets,
                                size_t n_targets, int steps_per_mfp,
                                double* out);

/* Paraxial solve (table from owrte_paraxial_table).  leakage_warning/
 * max_boundary_fraction report mass reaching the window edge. */
owrte_status owrte_solve_paraxial(const owrte_table* table, const double* i0,
                                  double z0, const double* z_targets,
                                  size_t n_targets, double* out,
                                  int* leakage_warning,
                                  double* max_boundary_fraction);

/* -------------------------------------------------------------- diffusion */

/* Angular diffusion tensor a[4] (row-major 2x2) and drift b[2] at kappa[2]. */
owrte_status owrte_diffusion_coeffs(const owrte_params* params,
                                    const owrte_spectrum* spectrum,
                                    const double* kappa, double* a, double* b);
owrte_status owrte_paraxial_diffusion_coeff(const owrte_params* params,
                                            const owrte_spectrum* spectrum,
                                            double* out);

/* Fokker-Planck solve on a uniform window grid (d = 1): a and b hold the
 * per-node scalar coefficients, gamma the small parameter; cfl <= 0 keeps the
 * default (0.2).  out is n_targets x n row-major. */
owrte_status owrte_solve_kappa_diffusion(const owrte_params* params,
                                         const owrte_grid* grid,
                                         const double* a, const double* b,
                                         double gamma, const double* i0,
                                         double z0, const double* z_targets,
                                         size_t n_targets, double cfl,
                                         double* out);

/* ------------------------------------------------------------ Monte Carlo */

typedef struct owrte_process owrte_process;
typedef struct owrte_ensemble owrte_ensemble;

owrte_status owrte_process_create(const owrte_table* table,
                                  owrte_process** out);
void owrte_process_free(owrte_process* process);

/* initial_law: probability mass per node (normalized internally). */
owrte_status owrte_ensemble_create(const owrte_grid* grid,
                                   const double* initial_law,
                                   size_t n_particles, uint64_t seed,
                                   owrte_ensemble** out);
void owrte_ensemble_free(owrte_ensemble* ensemble);

owrte_status owrte_ensemble_evolve(owrte_ensemble* ensemble,
                                   const owrte_process* process, double dz);
owrte_status owrte_estimate_intensity(const owrte_ensemble* ensemble,
                                      double* intensity, double* std_error);
/* mixed_start_warning (nullable) is set to 1 when the unscattered particles
 * span more than one node, i.e. the ensemble was not launched
 * monoenergetically. */
owrte_status owrte_estimate_coherent(const owrte_ensemble* ensemble,
                                     double* fraction, double* std_error,
                                     int* mixed_start_warning);
owrte_status owrte_ensemble_stats(const owrte_ensemble* ensemble,
                                  double* mean_n_scatter,
                                  double* kappa_variance, double* x_variance);

/* ----------------------------------------------------------- mean field */

typedef enum owrte_source_kind {
  OWRTE_SOURCE_GAUSSIAN_BEAM = 0,
  OWRTE_SOURCE_TABULATED = 1
} owrte_source_kind;

/* Angular amplitudes of the source; re/im are grid-size.  profile_* are used
 * only for the tabulated kind. */
owrte_status owrte_source_amplitudes(const owrte_params* params,
                                     const owrte_grid* grid, int kind,
                                     double kappa_width, double flux,
                                     const double* profile_kappa,
                                     const double* profile_value,
                                     size_t n_profile, double* re, double* im);
owrte_status owrte_mean_amplitude(const owrte_table* table, const double* re0,
                                  const double* im0, double z, double* re,
                                  double* im);
owrte_status owrte_homogeneous_field(const owrte_params* params,
                                     const owrte_grid* grid, const double* re,
                                     const double* im, const double* x,
                                     double z, double* re_u, double* im_u);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OWRTE_H */
