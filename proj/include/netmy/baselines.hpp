#ifndef NETMY_BASELINES_HPP
#define NETMY_BASELINES_HPP

#include <Eigen/Core>
#include <functional>

#include "netmy/neural_field.hpp"
#include "netmy/objective.hpp"

namespace netmy {

/// Canonical weights shared by the free-density/primitive baselines: the
/// log-MSE data term plus L1 and TV, none of the method-specific extras.
inline LossWeights baseline_weights() {
  LossWeights w;
  w.fidelity = 1.0;
  w.nm = 0.0;
  w.ds = 0.0;
  w.l1_sparsity = 1e-2;
  w.l1_extra = 0.0;
  w.tv = 1e-3;
  return w;
}

/// Peak density a single centered unit source would need to explain the
/// observed energy under the inversion operator (used for ADMM's box).
double implied_single_pixel_amplitude(const Spectrum& obs, OperatorKind op, const KernelStack& kernels,
                                      double gamma);

struct TikhonovConfig {
  long epochs = 5000;
  double lr = 5e-3;
  double weight_decay = 1e-5;  // coupled L2 in Adam
  double clip = 1.0;
  double l2_weight = 1e-3;
  double rho_init = 0.1;
  double omega_init = 2.0;
  LossWeights weights = baseline_weights();
};

SolverResult run_tikhonov(const Spectrum& obs, OperatorKind op, const TikhonovConfig& config, uint64_t seed,
                          double gamma = 0.5);

struct AdmmConfig {
  int outer_cycles = 200;
  int inner_iters = 30;
  double inner_lr = 5e-3;
  double mu = 1e-3;        // augmented-Lagrangian penalty
  double l1_weight = 1e-2; // handled by the z-prox, not the smooth objective
  double stop_linf = 1e-3;
  double rho_max_factor = 10.0;
  double rho_init = 0.1;
  double omega_init = 2.0;
  double clip = 1.0;
  bool reset_inner_state = false;  // inner Adam moments persist across cycles by default
  double tv_weight = 1e-3;
  double fidelity_weight = 1.0;
};

SolverResult run_admm(const Spectrum& obs, OperatorKind op, const AdmmConfig& config, uint64_t seed,
                      double gamma = 0.5);

struct SplatConfig {
  int k_init = 64;
  int cap = 128;
  long iters = 400;
  double lr = 1e-3;
  int schedule_every = 50;
  double prune_amp_frac = 1e-3;
  double split_sigma_px = 4.0;
  double clone_grad_factor = 5.0;
  double merge_dist_px = 1.0;
  double init_sigma_px = 1.5;
  double init_amp = 0.5;
  double omega_init = 2.0;
  double clip = 1.0;
  LossWeights weights = baseline_weights();
};

struct SplatPrimitive {
  double cy, cx;      // center, pixel units
  double sy, sx;      // widths per axis, pixels, > 0
  double amplitude;   // >= 0
};

/// Rasterizes a splat set onto a grid.
ScalarField rasterize_splats(const std::vector<SplatPrimitive>& splats, int rows, int cols);

SolverResult run_gaussian_splat(const Spectrum& obs, OperatorKind op, const SplatConfig& config, uint64_t seed,
                                double gamma = 0.5);

struct LbfgsOptions {
  int history = 20;
  int max_iters = 100;
  double c1 = 1e-4;  // strong Wolfe sufficient decrease
  double c2 = 0.9;   // strong Wolfe curvature
  double grad_tol = 1e-10;
  double fallback_step = 1e-3;  // used when the line search fails
};

struct LbfgsReport {
  int iterations = 0;
  bool converged = false;
  int line_search_failures = 0;
};

/// Two-loop L-BFGS with strong-Wolfe line search and optional box handled by
/// projection; the curvature history restarts whenever the active set
/// changes. fg returns the objective value and fills the gradient.
LbfgsReport lbfgs_minimize(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fg,
                           Eigen::VectorXd& x, const LbfgsOptions& options,
                           const Eigen::VectorXd* lower = nullptr, const Eigen::VectorXd* upper = nullptr);

struct LbfgsSolverConfig {
  LbfgsOptions opts;
  double rho_init = 0.1;
  double omega_init = 2.0;
  LossWeights weights = baseline_weights();
};

SolverResult run_lbfgs(const Spectrum& obs, OperatorKind op, const LbfgsSolverConfig& config, uint64_t seed,
                       double gamma = 0.5);

}  // namespace netmy

#endif
