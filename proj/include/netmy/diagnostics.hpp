#ifndef NETMY_DIAGNOSTICS_HPP
#define NETMY_DIAGNOSTICS_HPP

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "netmy/baselines.hpp"
#include "netmy/neural_field.hpp"
#include "netmy/objective.hpp"
#include "netmy/scene.hpp"

namespace netmy {

struct CenterBiasReport {
  ScalarField grad_map;          // |d fidelity / d rho| at iter 0
  double center_outer_ratio;     // central 3x3 mean over r > H/4 ring mean
  std::pair<int, int> peak;      // arg-max pixel of |grad|
  double peak_center_dist_px;
  std::optional<double> final_center_mass_ratio;  // filled by callers that run a solver
};

/// Gradient of the data-fidelity term alone on a uniform initialization.
CenterBiasReport iter0_center_bias(const Spectrum& obs, OperatorKind op, const KernelStack& kernels,
                                   double gamma, double init_value);

/// Mass within the central disk of the given radius over total mass.
double center_mass_ratio(const ScalarField& rho, double radius_px = 8.0);

struct BarrierProfile {
  std::vector<double> t;       // includes 0 and 1
  std::vector<double> loss;
  double barrier_height;       // max interior loss - max(endpoint losses)
  double argmax_t;
};

/// Full objective along rho(t) = (1-t) rho_collapse + t rho_star.
BarrierProfile energy_barrier_scan(const ScalarField& rho_collapse, const ScalarField& rho_star,
                                   const ScalarField& omega_L, const Spectrum& obs, OperatorKind op,
                                   const KernelStack& kernels, double gamma, const LossWeights& weights,
                                   int n_points = 51);

/// G_theta * probe with G_theta = J_rho J_rho^T, realized as one reverse pass
/// (J^T probe) followed by one tangent pass (J v). Requires a prior forward
/// at the given beta to populate the model's activations.
ScalarField filter_kernel_probe(NetmyModel& model, const MlpParams& params, double beta,
                                const ScalarField& probe);

/// Density-head Jacobian rows assembled by per-pixel reverse passes
/// (|Omega| x P); test-scale oracle for filter_kernel_probe.
Eigen::MatrixXd assemble_density_jacobian(NetmyModel& model, const MlpParams& params, double beta);

struct DecayReport {
  std::vector<double> k;         // radial bin centers, rad/nm
  std::vector<double> envelope;  // radially averaged |FFT| / (1 + k z0)^m
  double fitted_slope;           // expected near -z0
  double intercept;
  double dc_value;               // |FFT| at k = 0
  double spatial_sum;            // sum of the sampled kernel
  double k_lo, k_hi;             // fitted band
};

/// Radially averaged spectrum of the summed-power kernel, measured on a
/// dedicated 64x64 sampling at z0/8 pitch (the reconstruction-grid sampling
/// aliases the kernel peak and cannot exhibit the continuum envelope), with
/// the algebraic factor (1 + k z0)^2 divided out and a log-linear mid-band
/// fit over k in [kmax/8, kmax/2].
DecayReport kernel_frequency_decay(const KernelStack& kernels);
DecayReport kernel_frequency_decay_z0(double z0);

struct ChiPoint {
  double chi;
  double rel_error;  // ||F2 - F3||_F / ||F3||_F on the stress scene
};

/// Two-source Larmor-spread stress family: unit sources two pixels apart at
/// standoff 30 nm on the default 64x64 grid, F2 evaluated with the
/// nearest-source Larmor fill. chi = (Larmor spread over the kernel
/// footprint) / gamma.
std::vector<ChiPoint> chi_sweep(const std::vector<double>& chi_values);

/// Radius where the summed power falls to `frac` of its on-axis peak (nm).
double kernel_footprint_radius(double z0, double frac = 0.01);

/// On-axis noise power from a uniform sheet at standoff z0, evaluated on a
/// fixed fine physical grid (2.5 nm pitch, 2000 nm extent).
double sheet_noise_power(double z0);

struct AdmmSweepResult {
  double mean_ratio_f1 = 0.0;
  double mean_ratio_f2 = 0.0;
  std::vector<double> ratios_f1, ratios_f2;  // one per (scene, config)
};

/// Center-mass aggregate over a scene x config grid under both inversion
/// operators; configs vary the ADMM loss/penalty settings.
AdmmSweepResult admm_center_sweep(int n_scenes, int n_configs, int outer_cycles, uint64_t seed);

}  // namespace netmy

#endif
