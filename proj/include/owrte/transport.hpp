#ifndef OWRTE_TRANSPORT_HPP
#define OWRTE_TRANSPORT_HPP

#include <Eigen/Core>
#include <array>
#include <memory>
#include <vector>

#include "owrte/xsection.hpp"

namespace owrte {

// Angular intensity I(kappa) sampled on a grid at a given range z.
struct IntensityField {
  std::shared_ptr<const AngularGrid> grid;
  Eigen::VectorXd values;
  double z = 0.0;

  double total() const;     // \int I dmu = sum w_i I_i
  Vec mean_kappa() const;   // first moment of the normalized field
  double kappa_variance() const;  // scalar variance of |kappa|-components
};

// Right-hand side of the angular transport equation:
//   (L I)_i = sum_j w_j Q_ij (I_j - I_i).
// Conserves sum_i w_i I_i identically (kernel symmetry).
Eigen::VectorXd collision_apply(const CrossSectionTable& table,
                                const Eigen::VectorXd& values);

enum class AngularMethod { rk4, matrix_exp };

struct AngularOptions {
  AngularMethod method = AngularMethod::rk4;
  // rk4 step = step_fraction / max Sigma (default well below the 0.1 bound,
  // so the integrator error sits near the cross-method tolerance).
  double step_fraction = 0.01;
  // If > 0, use exactly this step instead (the Wigner solver passes its
  // collision substep here so marginalization matches to rounding).
  double fixed_step = 0.0;
};

// Integrates dI/dz = L I from i0 to each z in z_targets (increasing, >= i0.z).
std::vector<IntensityField> solve_angular(const CrossSectionTable& table,
                                          const IntensityField& i0,
                                          const std::vector<double>& z_targets,
                                          const AngularOptions& options = {});

// Phase-space density W(kappa_i, x) on a periodic box.  values is laid out as
// one contiguous spatial block per kappa node (size() * spatial_cells()).
struct WignerField {
  std::shared_ptr<const AngularGrid> grid;
  std::array<double, 2> box = {0.0, 0.0};  // box edge lengths (y unused, d=1)
  std::array<int, 2> cells = {0, 0};
  Eigen::VectorXd values;
  double z = 0.0;

  int spatial_cells() const { return cells[0] * std::max(cells[1], 1); }
  double cell_volume() const;
  double x_coord(int axis, int index) const;  // cell-center coordinate
  double total() const;  // sum w_i * cell_volume * W
  // Marginal over x: returns the angular intensity \int W dx.
  IntensityField marginal_kappa() const;
  double& at(std::size_t node, int ix, int iy = 0);
  double at(std::size_t node, int ix, int iy = 0) const;
};

WignerField make_wigner_field(std::shared_ptr<const AngularGrid> grid,
                              std::array<double, 2> box, std::array<int, 2> cells);

struct WignerOptions {
  int steps_per_mfp = 50;          // collision substeps per min mean free path
  double negative_tol = 1e-10;     // abort threshold, relative to max W
};

// Strang-split integration of
//   dW/dz = -(kappa/beta) . grad_x W + (L W)(kappa)   (periodic in x).
// Advection is applied spectrally (exact shifts per kappa node), the collision
// substep uses rk4 with the table kernel.
std::vector<WignerField> solve_wigner(const CrossSectionTable& table,
                                      const WignerField& w0,
                                      const std::vector<double>& z_targets,
                                      const WignerOptions& options = {});

// Ballistic characteristic map of an initial point source at x = 0:
// each node contributes weight I_i at x = (kappa_i / beta_i) z.
struct CharacteristicPoint {
  Vec kappa;
  Vec x;
  double weight;
};
std::vector<CharacteristicPoint> point_source_wigner(const IntensityField& i0,
                                                     double z);

// ---- Paraxial limit ------------------------------------------------------

// Difference-only kernel of the paraxial approximation:
//   Q_pa(kappa, kappa') = (k^2 ell^{d+1} alpha^2 / 4)
//                         * \tilde R(k ell (kappa - kappa'), 0).
double paraxial_xsection(const TransportParams& params,
                         const MediumSpectrum& spectrum, const Vec& kappa,
                         const Vec& kappa_prime);

// Kernel table with the paraxial cross section on an (uncapped) window grid;
// reuses the angular solve machinery.
CrossSectionTable build_paraxial_table(const TransportParams& params,
                                       const MediumSpectrum& spectrum,
                                       std::shared_ptr<const AngularGrid> grid);

struct ParaxialResult {
  std::vector<IntensityField> fields;
  bool leakage_warning = false;   // boundary mass exceeded leakage_threshold
  double max_boundary_fraction = 0.0;
  double leakage_threshold = 1e-6;
};

ParaxialResult solve_paraxial(const CrossSectionTable& paraxial_table,
                              const IntensityField& i0,
                              const std::vector<double>& z_targets,
                              const AngularOptions& options = {});

// ---- kappa-diffusion limit ------------------------------------------------

// Local expansion coefficients of the collision operator (diffusion in
// kappa):  dI/dz = gamma [ A_jl d^2_{kappa_j kappa_l} + gamma B_j d_kappa_j ] I
// in range measured in wavelength units.
struct DiffusionCoeffs {
  Vec kappa;
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();  // top-left d x d block used
  Vec b = Vec::Zero();
};

DiffusionCoeffs diffusion_coeffs(const TransportParams& params,
                                 const MediumSpectrum& spectrum, const Vec& kappa);

// Residual paraxial diffusion coefficient D_res = lim_{kappa->0} A(kappa).
double paraxial_diffusion_coeff(const TransportParams& params,
                                const MediumSpectrum& spectrum);

struct KappaDiffusionOptions {
  double cfl = 0.2;  // rk4 step as a fraction of the explicit stability limit
};

// Explicit finite-difference solve of the kappa-diffusion equation on a d = 1
// grid (zero-flux edges).  gamma = 2 pi / (k ell) is passed by the caller; the
// equation itself lives in wavelength-scaled range, but z_targets stay in the
// same dimensional units as the transport solvers (the conversion dz_scaled =
// dz * k / (2 pi) happens once, internally).
std::vector<IntensityField> solve_kappa_diffusion(
    const TransportParams& params, const std::vector<DiffusionCoeffs>& coeffs,
    double gamma, const IntensityField& i0, const std::vector<double>& z_targets,
    const KappaDiffusionOptions& options = {});

}  // namespace owrte

#endif
