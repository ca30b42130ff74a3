#ifndef NETMY_NEURAL_FIELD_HPP
#define NETMY_NEURAL_FIELD_HPP

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "netmy/field.hpp"
#include "netmy/objective.hpp"
#include "netmy/operators.hpp"

#include "json.hpp"

namespace netmy {

/// Annealing envelope w_k(beta) = (1 - cos(pi clip(beta - k, 0, 1))) / 2.
double anneal_weight(int k, double beta);

/// Annealed Fourier encoding of one normalized coordinate pair. Layout:
/// (x, y, then per octave k: w_k sin(2^k pi x), w_k cos(2^k pi x),
///  w_k sin(2^k pi y), w_k cos(2^k pi y)). Dimension 2 + 4 K.
Eigen::VectorXd encode_point(double x, double y, double beta, int octaves);

/// Pixel-center coordinate grid on [-1,1]^2 with cached unscaled trig tables.
class CoordinateGrid {
 public:
  CoordinateGrid(int rows, int cols, int octaves);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long n() const { return static_cast<long>(rows_) * cols_; }
  int octaves() const { return octaves_; }
  int encoded_dim() const { return 2 + 4 * octaves_; }

  /// Applies the annealing weights for the given beta into E (n x dim).
  void encode(double beta, Eigen::MatrixXd& E) const;

 private:
  int rows_, cols_, octaves_;
  Eigen::MatrixXd table_;  // n x dim, band blocks unscaled
};

struct MlpConfig {
  int input_dim = 50;
  int hidden = 320;
  int layers = 6;      // total affine layers, the last one linear to out_dim
  int skip_layer = 3;  // 1-based layer whose input gets the encoding re-injected; 0 = none
  int out_dim = 3;     // density logit, gate logit, Larmor logit

  int layer_in(int l) const {  // l is 1-based
    int in = l == 1 ? input_dim : hidden;
    if (l != 1 && l == skip_layer) in += input_dim;
    return in;
  }
  int layer_out(int l) const { return l == layers ? out_dim : hidden; }
  long param_count() const;
};

/// Flat parameter vector with per-layer matrix views.
class MlpParams {
 public:
  MlpParams() = default;
  explicit MlpParams(const MlpConfig& cfg);

  /// Uniform fan-in initialization U(-1/sqrt(fan_in), 1/sqrt(fan_in)); seeded.
  static MlpParams init(const MlpConfig& cfg, uint64_t seed);

  const MlpConfig& config() const { return cfg_; }
  Eigen::VectorXd& flat() { return theta_; }
  const Eigen::VectorXd& flat() const { return theta_; }

  Eigen::Map<const Eigen::MatrixXd> weight(int l) const;  // layer_in x layer_out
  Eigen::Map<const Eigen::VectorXd> bias(int l) const;
  Eigen::Map<Eigen::MatrixXd> weight(int l);
  Eigen::Map<Eigen::VectorXd> bias(int l);

  long weight_offset(int l) const { return w_off_[l - 1]; }
  long bias_offset(int l) const { return b_off_[l - 1]; }

 private:
  MlpConfig cfg_;
  Eigen::VectorXd theta_;
  std::vector<long> w_off_, b_off_;
};

struct HeadConfig {
  double tau = 0.3;
  double omega_min = 1.5;
  double omega_max = 2.5;
};

struct FieldOutput {
  ScalarField rho;
  ScalarField omega;  // 0 off the predicted support
  ScalarField mask;   // 1 on support
};

/// Coordinate-MLP field with gated-softplus density and banded, support-masked
/// Larmor heads. Holds the activation workspace for the fixed-topology
/// reverse pass; one instance per solver, not thread-shared.
class NetmyModel {
 public:
  NetmyModel(const MlpConfig& mlp, const HeadConfig& heads, const CoordinateGrid* grid);

  const CoordinateGrid& grid() const { return *grid_; }
  const HeadConfig& heads() const { return heads_; }

  /// Forward over the whole grid; records activations for backward/jvp.
  FieldOutput forward(const MlpParams& params, double beta);

  /// Reverse pass from image-space gradients; the support mask is a constant.
  /// Gradients accumulate into `grad` (caller zeroes it).
  void backward(const MlpParams& params, const ScalarField& d_rho, const ScalarField& d_omega,
                Eigen::VectorXd& grad) const;

  /// Tangent (forward-mode) pass in parameter direction v, using the stored
  /// activations: returns the induced (d rho, d omega) fields.
  void jvp(const MlpParams& params, const Eigen::VectorXd& v, ScalarField& d_rho_out,
           ScalarField& d_omega_out) const;

 private:
  MlpConfig cfg_;
  HeadConfig heads_;
  const CoordinateGrid* grid_;

  // stored forward state
  Eigen::MatrixXd enc_;                  // n x input_dim
  std::vector<Eigen::MatrixXd> hidden_;  // post-tanh activations per hidden layer
  Eigen::MatrixXd out_;                  // n x 3 raw head logits
  Eigen::ArrayXd softplus_, sig_gate_, sig_omega_, rho_, mask_;
};

struct StageConfig {
  int resolution;
  long epochs;
  double lr;
};

struct TrainingSchedule {
  StageConfig stage1{32, 3000, 1e-3};
  StageConfig stage2{64, 7000, 5e-4};
  double weight_decay = 1e-4;
  double grad_clip = 1.0;
  double lr_floor_frac = 0.01;
  HeadConfig heads;
  MlpConfig mlp;
  double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;
  bool grad_through_max = true;

  /// Uniform epoch multiplier for desk-scale runs (at least 1 epoch per stage).
  void scale_epochs(double factor);

  nlohmann::json to_json() const;
};

struct SolverResult {
  ScalarField rho_hat;
  ScalarField omega_hat;
  double alpha = 1.0;
  std::vector<LossBreakdown> trace;
  long iterations = 0;
  double wall_seconds = 0.0;
  nlohmann::json config;
};

/// Computes the gradient of the stage loss with respect to every MLP
/// parameter at the given beta (single forward + reverse through the
/// operator). Used directly by tests and diagnostics; run_netmy inlines the
/// same steps.
Eigen::VectorXd param_gradient(NetmyModel& model, const MlpParams& params, double beta, const Objective& objective);

/// Two-stage annealed multiscale optimization against one observation.
/// Deterministic given the seed. Throws SolverError on NaN loss.
SolverResult run_netmy(const Spectrum& obs, OperatorKind op, const TrainingSchedule& schedule,
                       const LossWeights& weights, uint64_t seed, double gamma = 0.5);

/// 2x2 (or general factor) mean-pool of each frequency plane; spacing scales
/// by the factor so the field of view is preserved.
Spectrum downsample_spectrum(const Spectrum& obs, int factor);

void save_result(const SolverResult& r, const std::filesystem::path& dir);
SolverResult load_result(const std::filesystem::path& dir);

}  // namespace netmy

#endif
