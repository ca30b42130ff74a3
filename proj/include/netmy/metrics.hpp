#ifndef NETMY_METRICS_HPP
#define NETMY_METRICS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "netmy/field.hpp"
#include "netmy/operators.hpp"

#include "json.hpp"

namespace netmy {

/// Gradient-magnitude similarity deviation with Prewitt gradients. Inputs are
/// rescaled to the unit range by their own maxima first; c = 0.0026.
double gmsd(const ScalarField& pred, const ScalarField& truth);

/// Strict local maxima over 8-neighborhoods at or above rel_threshold * max.
/// Equal-valued plateaus collapse to their rounded centroid.
std::vector<std::pair<int, int>> extract_peaks(const ScalarField& field, double rel_threshold = 0.05);

struct HungarianMatch {
  double f1 = 0.0;
  int tp = 0, fp = 0, fn = 0;
  std::vector<std::pair<int, int>> pairs;  // (pred index, true index)
};

/// One-to-one minimum-cost matching at a fixed radius (pairs beyond it are
/// forbidden); maximizes match count first, then minimizes total distance.
/// Both-empty peak sets score F1 = 0.
HungarianMatch hungarian_f1(const std::vector<std::pair<int, int>>& pred_peaks,
                            const std::vector<std::pair<int, int>>& true_peaks, double radius = 2.0);

/// Minimum-cost assignment on a square cost matrix; returns per-row column
/// assignment. Exposed for the metric tests.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

/// Sliced Wasserstein-2 distance: mean over random unit directions of the 1-D
/// W2 between the projected, L1-normalized mass distributions. Coordinates in
/// pixels, mass at pixel centers. Throws DegenerateInputError on zero mass.
double sliced_wasserstein(const ScalarField& pred, const ScalarField& truth, int n_projections = 128,
                          uint64_t seed = 0);

/// Exact 1-D W2 between weighted point sets (weights need not be normalized).
double wasserstein1d(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b);

double density_mse(const ScalarField& pred, const ScalarField& truth);

/// SSIM with k1 = 0.01, k2 = 0.03, uniform 7x7 window, dynamic range from the
/// truth max, averaged over the support of the truth only.
double masked_ssim(const ScalarField& pred, const ScalarField& truth);

/// MSE between frequency-summed noise maps.
double noise_mse(const Spectrum& pred, const Spectrum& obs);

struct MetricsReport {
  double gmsd = 0.0;
  double hungarian_f1 = 0.0;
  double swd = 0.0;
  double density_mse = 0.0;
  double masked_ssim = 0.0;
  double noise_mse = 0.0;
  int pred_peaks = 0, true_peaks = 0, matched = 0;

  nlohmann::json to_json() const;
};

struct MetricsParams {
  double peak_rel_threshold = 0.05;
  double match_radius = 2.0;
  int swd_projections = 128;
  uint64_t swd_seed = 0;
};

MetricsReport compute_metrics(const ScalarField& rho_hat, const ScalarField& rho_true, const Spectrum& pred_spec,
                              const Spectrum& obs_spec, const MetricsParams& params = {});

}  // namespace netmy

#endif
