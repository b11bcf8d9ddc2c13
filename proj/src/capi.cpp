// C binding: thin translation layer over the C++ core.  Every entry point
// catches, stores the message thread-locally, and returns a status code.

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "owrte.h"
#include "owrte/coherent.hpp"
#include "owrte/common.hpp"
#include "owrte/geometry.hpp"
#include "owrte/medium.hpp"
#include "owrte/montecarlo.hpp"
#include "owrte/transport.hpp"
#include "owrte/xsection.hpp"

struct owrte_spectrum {
  explicit owrte_spectrum(owrte::MediumSpectrum s) : spectrum(std::move(s)) {}
  owrte::MediumSpectrum spectrum;
};

struct owrte_grid {
  std::shared_ptr<const owrte::AngularGrid> grid;
};

struct owrte_table {
  std::shared_ptr<const owrte::CrossSectionTable> table;
};

struct owrte_process {
  std::unique_ptr<const owrte::JumpProcess> process;
};

struct owrte_ensemble {
  owrte::ParticleEnsemble ensemble;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
owrte_status guarded(Fn&& fn) {
  try {
    fn();
    return OWRTE_OK;
  } catch (const owrte::Error& e) {
    g_last_error = e.what();
    return static_cast<owrte_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OWRTE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OWRTE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return OWRTE_ERR_INTERNAL;
  }
}

void need(bool ok, const char* what) {
  owrte::require(ok, owrte::ErrorCode::invalid_argument, what);
}

owrte::TransportParams to_params(const owrte_params* params) {
  need(params != nullptr, "params is NULL");
  owrte::TransportParams p;
  p.k = params->k;
  p.ell = params->ell;
  p.alpha = params->alpha;
  p.d = params->d;
  p.kappa_max = params->kappa_max;
  p.finalize();
  return p;
}

const owrte::MediumSpectrum& to_spectrum(const owrte_spectrum* s) {
  need(s != nullptr, "spectrum is NULL");
  return s->spectrum;
}

std::shared_ptr<const owrte::AngularGrid> to_grid(const owrte_grid* g) {
  need(g != nullptr && g->grid != nullptr, "grid is NULL");
  return g->grid;
}

std::shared_ptr<const owrte::CrossSectionTable> to_table(
    const owrte_table* t) {
  need(t != nullptr && t->table != nullptr, "table is NULL");
  return t->table;
}

std::vector<double> to_targets(const double* z_targets, size_t n_targets) {
  need(z_targets != nullptr && n_targets > 0, "z_targets is NULL or empty");
  return std::vector<double>(z_targets, z_targets + n_targets);
}

owrte::IntensityField to_field(std::shared_ptr<const owrte::AngularGrid> grid,
                               const double* values, double z) {
  need(values != nullptr, "intensity values are NULL");
  owrte::IntensityField f;
  f.grid = std::move(grid);
  f.z = z;
  const auto n = static_cast<Eigen::Index>(f.grid->size());
  f.values = Eigen::Map<const Eigen::VectorXd>(values, n);
  return f;
}

void store_fields(const std::vector<owrte::IntensityField>& fields,
                  double* out) {
  need(out != nullptr, "output buffer is NULL");
  double* cursor = out;
  for (const auto& f : fields) {
    std::memcpy(cursor, f.values.data(),
                sizeof(double) * static_cast<std::size_t>(f.values.size()));
    cursor += f.values.size();
  }
}

}  // namespace

extern "C" {

const char* owrte_last_error(void) { return g_last_error.c_str(); }

const char* owrte_version(void) { return "0.1.0"; }

void owrte_params_init(owrte_params* params) {
  if (params == nullptr) return;
  params->k = owrte::two_pi;
  params->ell = 1.0;
  params->alpha = 0.05;
  params->d = 1;
  params->kappa_max = 0.0;
}

owrte_status owrte_params_resolve(owrte_params* params) {
  return guarded([&] {
    need(params != nullptr, "params is NULL");
    const owrte::TransportParams p = to_params(params);
    params->kappa_max = p.kappa_max;
  });
}

/* --------------------------------------------------------------- spectrum */

owrte_status owrte_spectrum_gaussian(double variance_scale, int d_total,
                                     owrte_spectrum** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    auto h = std::make_unique<owrte_spectrum>(
        owrte::MediumSpectrum::gaussian(variance_scale, d_total));
    *out = h.release();
  });
}

owrte_status owrte_spectrum_lorentzian2d(double r0, double q_cutoff,
                                         owrte_spectrum** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    auto h = std::make_unique<owrte_spectrum>(
        owrte::MediumSpectrum::lorentzian2d(r0, q_cutoff));
    *out = h.release();
  });
}

owrte_status owrte_spectrum_tabulated(const double* s, const double* r,
                                      size_t n, int d_total,
                                      owrte_spectrum** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    need(s != nullptr && r != nullptr && n > 0, "sample arrays are NULL");
    auto h = std::make_unique<owrte_spectrum>(owrte::MediumSpectrum::tabulated(
        std::vector<double>(s, s + n), std::vector<double>(r, r + n), d_total));
    *out = h.release();
  });
}

void owrte_spectrum_free(owrte_spectrum* spectrum) { delete spectrum; }

owrte_status owrte_spectrum_autocov(const owrte_spectrum* spectrum, double s,
                                    double* out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    *out = to_spectrum(spectrum).autocov_iso(s);
  });
}

owrte_status owrte_spectrum_psd_iso(const owrte_spectrum* spectrum, double q,
                                    double* out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    *out = to_spectrum(spectrum).psd_iso(q);
  });
}

/* ------------------------------------------------------------------- grid */

owrte_status owrte_grid_create(const owrte_params* params, int n,
                               int n_angular, owrte_grid** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    const owrte::TransportParams p = to_params(params);
    need(p.d == 2 || n_angular == 0, "n_angular is only used for d = 2");
    auto h = std::make_unique<owrte_grid>();
    h->grid = std::make_shared<const owrte::AngularGrid>(
        p.d == 1 ? owrte::make_grid_1d(p, n)
                 : owrte::make_grid_2d(p, n, n_angular));
    *out = h.release();
  });
}

owrte_status owrte_grid_uniform(const owrte_params* params,
                                double kappa_window, int n, owrte_grid** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    const owrte::TransportParams p = to_params(params);
    auto h = std::make_unique<owrte_grid>();
    h->grid = std::make_shared<const owrte::AngularGrid>(
        owrte::make_uniform_grid_1d(p, kappa_window, n));
    *out = h.release();
  });
}

void owrte_grid_free(owrte_grid* grid) { delete grid; }

owrte_status owrte_grid_size(const owrte_grid* grid, size_t* out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    *out = to_grid(grid)->size();
  });
}

owrte_status owrte_grid_nodes(const owrte_grid* grid, double* kappa_x,
                              double* kappa_y, double* weight, double* beta) {
  return guarded([&] {
    const auto g = to_grid(grid);
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (kappa_x != nullptr) kappa_x[i] = g->nodes[i].x();
      if (kappa_y != nullptr) kappa_y[i] = g->nodes[i].y();
      if (weight != nullptr) weight[i] = g->weights[i];
      if (beta != nullptr) beta[i] = g->beta_at(i);
    }
  });
}

/* ----------------------------------------------------------- cross section */

owrte_status owrte_table_build(const owrte_params* params,
                               const owrte_spectrum* spectrum,
                               const owrte_grid* grid, int compute_imag_q,
                               owrte_table** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    const owrte::TransportParams p = to_params(params);
    owrte::TableOptions options;
    options.compute_imag_q = compute_imag_q != 0;
    auto h = std::make_unique<owrte_table>();
    h->table = std::make_shared<const owrte::CrossSectionTable>(
        owrte::build_xsection_table(p, to_spectrum(spectrum), to_grid(grid),
                                    options));
    *out = h.release();
  });
}

owrte_status owrte_paraxial_table(const owrte_params* params,
                                  const owrte_spectrum* spectrum,
                                  const owrte_grid* grid, owrte_table** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    const owrte::TransportParams p = to_params(params);
    auto h = std::make_unique<owrte_table>();
    h->table = std::make_shared<const owrte::CrossSectionTable>(
        owrte::build_paraxial_table(p, to_spectrum(spectrum), to_grid(grid)));
    *out = h.release();
  });
}

void owrte_table_free(owrte_table* table) { delete table; }

owrte_status owrte_table_columns(const owrte_table* table, double* sigma,
                                 double* mfp, double* q_re, double* q_im) {
  return guarded([&] {
    const auto t = to_table(table);
    const auto n = static_cast<Eigen::Index>(t->size());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sigma != nullptr) sigma[i] = t->sigma[i];
      if (mfp != nullptr) mfp[i] = t->mfp[i];
      if (q_re != nullptr) q_re[i] = t->q_exponent[i].real();
      if (q_im != nullptr) q_im[i] = t->q_exponent[i].imag();
    }
  });
}

owrte_status owrte_table_kernel(const owrte_table* table, double* q) {
  return guarded([&] {
    need(q != nullptr, "q is NULL");
    const auto t = to_table(table);
    const auto n = static_cast<Eigen::Index>(t->size());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        q[i * n + j] = t->q_matrix(i, j);
      }
    }
  });
}

owrte_status owrte_table_stats(const owrte_table* table, double* max_sigma,
                               double* min_mfp, double* max_mfp) {
  return guarded([&] {
    const auto t = to_table(table);
    if (max_sigma != nullptr) *max_sigma = t->max_sigma();
    if (min_mfp != nullptr) *min_mfp = t->min_mfp();
    if (max_mfp != nullptr) *max_mfp = t->max_mfp();
  });
}

owrte_status owrte_mfp_highfreq(const owrte_params* params,
                                const owrte_spectrum* spectrum,
                                const double* kappa, double* out) {
  return guarded([&] {
    need(kappa != nullptr && out != nullptr, "kappa/out is NULL");
    *out = owrte::mfp_highfreq(to_params(params), to_spectrum(spectrum),
                               owrte::Vec(kappa[0], kappa[1]));
  });
}

owrte_status owrte_total_xsection(const owrte_params* params,
                                  const owrte_spectrum* spectrum,
                                  const double* kappa, const owrte_grid* grid,
                                  double* out) {
  return guarded([&] {
    need(kappa != nullptr && out != nullptr, "kappa/out is NULL");
    *out = owrte::total_xsection(to_params(params), to_spectrum(spectrum),
                                 owrte::Vec(kappa[0], kappa[1]),
                                 *to_grid(grid));
  });
}

/* ----------------------------------------------------- limit verifications */

owrte_status owrte_hg_params(double k_ell, double r0,
                             const owrte_params* params, double* g,
                             double* mu_s) {
  return guarded([&] {
    const owrte::HGParams hg = owrte::hg_params(k_ell, r0, to_params(params));
    if (g != nullptr) *g = hg.g;
    if (mu_s != nullptr) *mu_s = hg.mu_s;
  });
}

owrte_status owrte_hg_verify(const owrte_params* params,
                             const owrte_spectrum* spectrum, double r0,
                             int n_theta, double* max_rel_dev) {
  return guarded([&] {
    need(max_rel_dev != nullptr, "max_rel_dev is NULL");
    *max_rel_dev = owrte::verify_hg_identification(
        to_params(params), to_spectrum(spectrum), r0, n_theta);
  });
}

owrte_status owrte_rte3d_verify(const owrte_params* params,
                                const owrte_spectrum* spectrum,
                                const double* kappa, const double* kappa_prime,
                                double c0, double* rel_dev) {
  return guarded([&] {
    need(kappa != nullptr && kappa_prime != nullptr && rel_dev != nullptr,
         "kappa/kappa_prime/rel_dev is NULL");
    *rel_dev = owrte::verify_rte3d_reduction(
        to_params(params), to_spectrum(spectrum),
        owrte::Vec(kappa[0], kappa[1]),
        owrte::Vec(kappa_prime[0], kappa_prime[1]), c0);
  });
}

/* -------------------------------------------------------------- transport */

owrte_status owrte_collision_apply(const owrte_table* table, const double* v,
                                   double* out) {
  return guarded([&] {
    need(v != nullptr && out != nullptr, "v/out is NULL");
    const auto t = to_table(table);
    const auto n = static_cast<Eigen::Index>(t->size());
    const Eigen::VectorXd result =
        owrte::collision_apply(*t, Eigen::Map<const Eigen::VectorXd>(v, n));
    Eigen::Map<Eigen::VectorXd>(out, n) = result;
  });
}

owrte_status owrte_solve_angular(const owrte_table* table, const double* i0,
                                 double z0, const double* z_targets,
                                 size_t n_targets, int method,
                                 double step_fraction, double fixed_step,
                                 double* out) {
  return guarded([&] {
    const auto t = to_table(table);
    owrte::AngularOptions options;
    need(method == OWRTE_ANGULAR_RK4 || method == OWRTE_ANGULAR_MATRIX_EXP,
         "unknown angular method");
    options.method = method == OWRTE_ANGULAR_RK4
                         ? owrte::AngularMethod::rk4
                         : owrte::AngularMethod::matrix_exp;
    if (step_fraction > 0.0) options.step_fraction = step_fraction;
    if (fixed_step > 0.0) options.fixed_step = fixed_step;
    const auto fields = owrte::solve_angular(
        *t, to_field(t->grid, i0, z0), to_targets(z_targets, n_targets),
        options);
    store_fields(fields, out);
  });
}

owrte_status owrte_solve_wigner(const owrte_table* table, const double* w0,
                                double z0, const double* box,
                                const int* cells, const double* z_targets,
                                size_t n_targets, int steps_per_mfp,
                                double* out) {
  return guarded([&] {
    need(w0 != nullptr && box != nullptr && cells != nullptr && out != nullptr,
         "w0/box/cells/out is NULL");
    const auto t = to_table(table);
    owrte::WignerField field = owrte::make_wigner_field(
        t->grid, {box[0], box[1]}, {cells[0], cells[1]});
    field.z = z0;
    field.values = Eigen::Map<const Eigen::VectorXd>(
        w0, field.values.size());
    owrte::WignerOptions options;
    if (steps_per_mfp > 0) options.steps_per_mfp = steps_per_mfp;
    const auto fields = owrte::solve_wigner(
        *t, field, to_targets(z_targets, n_targets), options);
    double* cursor = out;
    for (const auto& f : fields) {
      Eigen::Map<Eigen::VectorXd>(cursor, f.values.size()) = f.values;
      cursor += f.values.size();
    }
  });
}

owrte_status owrte_solve_paraxial(const owrte_table* table, const double* i0,
                                  double z0, const double* z_targets,
                                  size_t n_targets, double* out,
                                  int* leakage_warning,
                                  double* max_boundary_fraction) {
  return guarded([&] {
    const auto t = to_table(table);
    const owrte::ParaxialResult result = owrte::solve_paraxial(
        *t, to_field(t->grid, i0, z0), to_targets(z_targets, n_targets));
    store_fields(result.fields, out);
    if (leakage_warning != nullptr) {
      *leakage_warning = result.leakage_warning ? 1 : 0;
    }
    if (max_boundary_fraction != nullptr) {
      *max_boundary_fraction = result.max_boundary_fraction;
    }
  });
}

/* -------------------------------------------------------------- diffusion */

owrte_status owrte_diffusion_coeffs(const owrte_params* params,
                                    const owrte_spectrum* spectrum,
                                    const double* kappa, double* a, double* b) {
  return guarded([&] {
    need(kappa != nullptr, "kappa is NULL");
    const owrte::DiffusionCoeffs c = owrte::diffusion_coeffs(
        to_params(params), to_spectrum(spectrum),
        owrte::Vec(kappa[0], kappa[1]));
    if (a != nullptr) {
      a[0] = c.a(0, 0);
      a[1] = c.a(0, 1);
      a[2] = c.a(1, 0);
      a[3] = c.a(1, 1);
    }
    if (b != nullptr) {
      b[0] = c.b.x();
      b[1] = c.b.y();
    }
  });
}

owrte_status owrte_paraxial_diffusion_coeff(const owrte_params* params,
                                            const owrte_spectrum* spectrum,
                                            double* out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    *out =
        owrte::paraxial_diffusion_coeff(to_params(params), to_spectrum(spectrum));
  });
}

owrte_status owrte_solve_kappa_diffusion(const owrte_params* params,
                                         const owrte_grid* grid,
                                         const double* a, const double* b,
                                         double gamma, const double* i0,
                                         double z0, const double* z_targets,
                                         size_t n_targets, double cfl,
                                         double* out) {
  return guarded([&] {
    need(a != nullptr && b != nullptr, "coefficient arrays are NULL");
    const auto g = to_grid(grid);
    std::vector<owrte::DiffusionCoeffs> coeffs(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
      coeffs[i].kappa = g->nodes[i];
      coeffs[i].a(0, 0) = a[i];
      coeffs[i].b.x() = b[i];
    }
    owrte::KappaDiffusionOptions options;
    if (cfl > 0.0) options.cfl = cfl;
    const auto fields = owrte::solve_kappa_diffusion(
        to_params(params), coeffs, gamma, to_field(g, i0, z0),
        to_targets(z_targets, n_targets), options);
    store_fields(fields, out);
  });
}

/* ------------------------------------------------------------ Monte Carlo */

owrte_status owrte_process_create(const owrte_table* table,
                                  owrte_process** out) {
  return guarded([&] {
    need(out != nullptr, "out is NULL");
    auto h = std::make_unique<owrte_process>();
    h->process = std::make_unique<const owrte::JumpProcess>(to_table(table));
    *out = h.release();
  });
}

void owrte_process_free(owrte_process* process) { delete process; }

owrte_status owrte_ensemble_create(const owrte_grid* grid,
                                   const double* initial_law,
                                   size_t n_particles, uint64_t seed,
                                   owrte_ensemble** out) {
  return guarded([&] {
    need(out != nullptr && initial_law != nullptr, "out/initial_law is NULL");
    const auto g = to_grid(grid);
    auto h = std::make_unique<owrte_ensemble>();
    h->ensemble = owrte::make_ensemble(
        g, std::vector<double>(initial_law, initial_law + g->size()),
        n_particles, seed);
    *out = h.release();
  });
}

void owrte_ensemble_free(owrte_ensemble* ensemble) { delete ensemble; }

owrte_status owrte_ensemble_evolve(owrte_ensemble* ensemble,
                                   const owrte_process* process, double dz) {
  return guarded([&] {
    need(ensemble != nullptr, "ensemble is NULL");
    need(process != nullptr && process->process != nullptr, "process is NULL");
    process->process->evolve(ensemble->ensemble, dz);
  });
}

owrte_status owrte_estimate_intensity(const owrte_ensemble* ensemble,
                                      double* intensity, double* std_error) {
  return guarded([&] {
    need(ensemble != nullptr, "ensemble is NULL");
    const owrte::IntensityEstimate est =
        owrte::estimate_intensity(ensemble->ensemble);
    const auto n = est.intensity.values.size();
    if (intensity != nullptr) {
      Eigen::Map<Eigen::VectorXd>(intensity, n) = est.intensity.values;
    }
    if (std_error != nullptr) {
      Eigen::Map<Eigen::VectorXd>(std_error, n) = est.std_error;
    }
  });
}

owrte_status owrte_estimate_coherent(const owrte_ensemble* ensemble,
                                     double* fraction, double* std_error,
                                     int* mixed_start_warning) {
  return guarded([&] {
    need(ensemble != nullptr, "ensemble is NULL");
    const owrte::CoherentEstimate est =
        owrte::estimate_coherent(ensemble->ensemble);
    if (fraction != nullptr) *fraction = est.fraction;
    if (std_error != nullptr) *std_error = est.std_error;
    if (mixed_start_warning != nullptr)
      *mixed_start_warning = est.mixed_start_warning ? 1 : 0;
  });
}

owrte_status owrte_ensemble_stats(const owrte_ensemble* ensemble,
                                  double* mean_n_scatter,
                                  double* kappa_variance, double* x_variance) {
  return guarded([&] {
    need(ensemble != nullptr, "ensemble is NULL");
    const owrte::EnsembleStats stats = owrte::ensemble_stats(ensemble->ensemble);
    if (mean_n_scatter != nullptr) *mean_n_scatter = stats.mean_n_scatter;
    if (kappa_variance != nullptr) *kappa_variance = stats.kappa_variance;
    if (x_variance != nullptr) *x_variance = stats.x_variance;
  });
}

/* ------------------------------------------------------------- mean field */

owrte_status owrte_source_amplitudes(const owrte_params* params,
                                     const owrte_grid* grid, int kind,
                                     double kappa_width, double flux,
                                     const double* profile_kappa,
                                     const double* profile_value,
                                     size_t n_profile, double* re,
                                     double* im) {
  return guarded([&] {
    need(re != nullptr && im != nullptr, "re/im is NULL");
    need(kind == OWRTE_SOURCE_GAUSSIAN_BEAM || kind == OWRTE_SOURCE_TABULATED,
         "unknown source kind");
    owrte::SourceModel source;
    source.kind = kind == OWRTE_SOURCE_GAUSSIAN_BEAM
                      ? owrte::SourceKind::gaussian_beam
                      : owrte::SourceKind::tabulated;
    source.kappa_width = kappa_width;
    source.flux = flux;
    if (source.kind == owrte::SourceKind::tabulated) {
      need(profile_kappa != nullptr && profile_value != nullptr &&
               n_profile > 0,
           "tabulated source needs profile arrays");
      source.profile_kappa.assign(profile_kappa, profile_kappa + n_profile);
      source.profile_value.assign(profile_value, profile_value + n_profile);
    }
    const auto g = to_grid(grid);
    const Eigen::VectorXcd a =
        owrte::source_amplitudes(source, to_params(params), *g);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      re[i] = a[i].real();
      im[i] = a[i].imag();
    }
  });
}

owrte_status owrte_mean_amplitude(const owrte_table* table, const double* re0,
                                  const double* im0, double z, double* re,
                                  double* im) {
  return guarded([&] {
    need(re0 != nullptr && im0 != nullptr && re != nullptr && im != nullptr,
         "amplitude arrays are NULL");
    const auto t = to_table(table);
    const auto n = static_cast<Eigen::Index>(t->size());
    Eigen::VectorXcd a0(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a0[i] = std::complex<double>(re0[i], im0[i]);
    }
    const Eigen::VectorXcd a = owrte::mean_amplitude(a0, *t, z);
    for (Eigen::Index i = 0; i < n; ++i) {
      re[i] = a[i].real();
      im[i] = a[i].imag();
    }
  });
}

owrte_status owrte_homogeneous_field(const owrte_params* params,
                                     const owrte_grid* grid, const double* re,
                                     const double* im, const double* x,
                                     double z, double* re_u, double* im_u) {
  return guarded([&] {
    need(re != nullptr && im != nullptr && x != nullptr && re_u != nullptr &&
             im_u != nullptr,
         "array arguments are NULL");
    const auto g = to_grid(grid);
    const auto n = static_cast<Eigen::Index>(g->size());
    Eigen::VectorXcd a0(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a0[i] = std::complex<double>(re[i], im[i]);
    }
    const std::complex<double> u = owrte::homogeneous_field(
        a0, to_params(params), *g, owrte::Vec(x[0], x[1]), z);
    *re_u = u.real();
    *im_u = u.imag();
  });
}

} /* extern "C" */
