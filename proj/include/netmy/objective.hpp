#ifndef NETMY_OBJECTIVE_HPP
#define NETMY_OBJECTIVE_HPP

#include "netmy/field.hpp"
#include "netmy/operators.hpp"

namespace netmy {

/// Default loss weights. The two L1 entries act as a single combined weight;
/// the extra part can be toggled off for ablations.
struct LossWeights {
  double fidelity = 2.0;
  double nm = 0.5;
  double ds = 0.1;
  double l1_sparsity = 1e-2;
  double l1_extra = 1e-3;
  double tv = 1e-3;

  double l1_total() const { return l1_sparsity + l1_extra; }
};

enum class Stage { coarse, fine };

enum class NormMode { max_norm, mean_norm };

struct NormalizedNoiseMap {
  ScalarField values;
  NormMode mode;
};

/// Per-pixel frequency sum N(r) = sum_w S(w, r).
ScalarField noise_map(const Spectrum& spectrum);

/// Division by the spatial max / mean. Throws DegenerateInputError when the
/// field has no positive max (max mode) or nonpositive mean (mean mode).
NormalizedNoiseMap max_normalize(const ScalarField& field);
NormalizedNoiseMap mean_normalize(const ScalarField& field);

/// Pixelwise log-MSE between max-normalized noise maps, offset 1e-10.
double fidelity_logmse(const Spectrum& pred, const Spectrum& obs);
double fidelity_logmse_maps(const ScalarField& pred_map, const ScalarField& obs_map);

double loss_l1(const ScalarField& rho);
/// Anisotropic TV with forward differences, zero contribution on the final
/// row/column.
double loss_tv(const ScalarField& rho);

/// MSE of mean-normalized noise maps.
double loss_nm(const ScalarField& pred_map, const ScalarField& obs_map);
/// MSE of mean-normalized rho^2 against the mean-normalized observed map.
double loss_ds(const ScalarField& rho, const ScalarField& obs_map);

struct LossBreakdown {
  double fidelity = 0.0;  // weighted contributions
  double nm = 0.0;
  double ds = 0.0;
  double l1 = 0.0;
  double tv = 0.0;
  double total = 0.0;
};

struct ObjectiveOptions {
  /// Propagate gradients through the max-normalization denominator (the
  /// arg-max pixel's nonlocal term). Off detaches the max for ablation.
  bool grad_through_max = true;
};

/// Bundles an observation with an inversion operator, caching the observed
/// noise map and its normalizations. Pure and safe to share const.
class Objective {
 public:
  Objective(const Spectrum& obs, OperatorKind op, const KernelStack& kernels, double gamma,
            const LossWeights& weights, Stage stage, ObjectiveOptions options = {});

  /// Loss with optional analytic gradients with respect to rho and omega_L.
  LossBreakdown eval(const ScalarField& rho, const ScalarField& omega_L, ScalarField* d_rho = nullptr,
                     ScalarField* d_omega = nullptr) const;

  const ScalarField& obs_map() const { return obs_map_; }
  OperatorKind op() const { return op_; }
  const KernelStack& kernels() const { return kernels_; }
  const Spectrum& obs() const { return obs_; }
  double gamma() const { return gamma_; }
  Stage stage() const { return stage_; }
  const LossWeights& weights() const { return weights_; }

 private:
  const Spectrum& obs_;
  OperatorKind op_;
  const KernelStack& kernels_;
  double gamma_;
  LossWeights weights_;
  Stage stage_;
  ObjectiveOptions options_;

  ScalarField obs_map_;       // frequency-summed
  ScalarField obs_lmax_;      // log10(clamped max-normalized + 1e-10)
  ScalarField obs_mean_norm_; // obs_map / mean
};

/// Spec-level convenience wrappers around Objective.
LossBreakdown total_loss(const ScalarField& rho, const ScalarField& omega_L, const Spectrum& obs,
                         OperatorKind op, const KernelStack& kernels, double gamma, const LossWeights& weights,
                         Stage stage);
LossBreakdown grad_total_loss(const ScalarField& rho, const ScalarField& omega_L, const Spectrum& obs,
                              OperatorKind op, const KernelStack& kernels, double gamma,
                              const LossWeights& weights, Stage stage, ScalarField& d_rho, ScalarField& d_omega,
                              ObjectiveOptions options = {});

/// Energy-anchored scale correction: alpha = E_obs/E_pred for F2 and
/// sqrt(E_obs/E_pred) for F1. Returns (alpha * rho_hat, alpha).
/// Throws SolverError when the predicted energy is not positive.
std::pair<ScalarField, double> scale_correction(const ScalarField& rho_hat, const ScalarField& omega_hat,
                                                const Spectrum& obs, OperatorKind op, const KernelStack& kernels,
                                                double gamma);

}  // namespace netmy

#endif
