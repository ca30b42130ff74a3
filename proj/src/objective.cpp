#include "netmy/objective.hpp"

#include <cmath>

#include "netmy/errors.hpp"

namespace netmy {

namespace {
constexpr double kLogOffset = 1e-10;
constexpr double kLn10 = 2.302585092994045684017991454684;

double clamp0(double x) { return x < 0.0 ? 0.0 : x; }
}  // namespace

ScalarField noise_map(const Spectrum& spectrum) {
  const GridGeometry& g = spectrum.geometry;
  ScalarField n(g.height, g.width, 0.0);
  for (int f = 0; f < spectrum.nf(); ++f) {
    const double* plane = spectrum.plane(f);
    for (long i = 0; i < n.size(); ++i) n[i] += plane[i];
  }
  return n;
}

NormalizedNoiseMap max_normalize(const ScalarField& field) {
  double m = field.max();
  if (!(m > 0.0)) throw DegenerateInputError("max_normalize: field has no positive entries");
  NormalizedNoiseMap out{field, NormMode::max_norm};
  out.values *= 1.0 / m;
  return out;
}

NormalizedNoiseMap mean_normalize(const ScalarField& field) {
  double mu = field.sum() / field.size();
  if (!(mu > 0.0)) throw DegenerateInputError("mean_normalize: field mean is not positive");
  NormalizedNoiseMap out{field, NormMode::mean_norm};
  out.values *= 1.0 / mu;
  return out;
}

double fidelity_logmse_maps(const ScalarField& pred_map, const ScalarField& obs_map) {
  if (!pred_map.same_shape(obs_map)) throw InvalidInputError("fidelity_logmse: shape mismatch");
  NormalizedNoiseMap p = max_normalize(pred_map);
  NormalizedNoiseMap o = max_normalize(obs_map);
  double acc = 0.0;
  for (long i = 0; i < p.values.size(); ++i) {
    double d = std::log10(clamp0(p.values[i]) + kLogOffset) - std::log10(clamp0(o.values[i]) + kLogOffset);
    acc += d * d;
  }
  return acc / p.values.size();
}

double fidelity_logmse(const Spectrum& pred, const Spectrum& obs) {
  if (pred.nf() != obs.nf() || !(pred.geometry == obs.geometry))
    throw InvalidInputError("fidelity_logmse: spectrum shape mismatch");
  return fidelity_logmse_maps(noise_map(pred), noise_map(obs));
}

double loss_l1(const ScalarField& rho) {
  double s = 0.0;
  for (long i = 0; i < rho.size(); ++i) s += std::abs(rho[i]);
  return s;
}

double loss_tv(const ScalarField& rho) {
  double s = 0.0;
  for (int r = 0; r < rho.rows(); ++r)
    for (int c = 0; c < rho.cols(); ++c) {
      if (c + 1 < rho.cols()) s += std::abs(rho.at(r, c + 1) - rho.at(r, c));
      if (r + 1 < rho.rows()) s += std::abs(rho.at(r + 1, c) - rho.at(r, c));
    }
  return s;
}

double loss_nm(const ScalarField& pred_map, const ScalarField& obs_map) {
  if (!pred_map.same_shape(obs_map)) throw InvalidInputError("loss_nm: shape mismatch");
  NormalizedNoiseMap p = mean_normalize(pred_map);
  NormalizedNoiseMap o = mean_normalize(obs_map);
  double acc = 0.0;
  for (long i = 0; i < p.values.size(); ++i) {
    double d = p.values[i] - o.values[i];
    acc += d * d;
  }
  return acc / p.values.size();
}

double loss_ds(const ScalarField& rho, const ScalarField& obs_map) {
  if (!rho.same_shape(obs_map)) throw InvalidInputError("loss_ds: shape mismatch");
  ScalarField sq(rho.rows(), rho.cols());
  for (long i = 0; i < rho.size(); ++i) sq[i] = rho[i] * rho[i];
  return loss_nm(sq, obs_map);
}

Objective::Objective(const Spectrum& obs, OperatorKind op, const KernelStack& kernels, double gamma,
                     const LossWeights& weights, Stage stage, ObjectiveOptions options)
    : obs_(obs), op_(op), kernels_(kernels), gamma_(gamma), weights_(weights), stage_(stage), options_(options) {
  if (op_ == OperatorKind::F3) throw InvalidInputError("Objective: inversion is restricted to F1/F2");
  if (obs.geometry.height != kernels.geometry().height || obs.geometry.width != kernels.geometry().width)
    throw InvalidInputError("Objective: observation and kernel resolutions differ");
  obs_map_ = noise_map(obs);

  double m = obs_map_.max();
  if (!(m > 0.0)) throw DegenerateInputError("Objective: observed noise map has no positive max");
  obs_lmax_ = ScalarField(obs_map_.rows(), obs_map_.cols());
  for (long i = 0; i < obs_map_.size(); ++i) obs_lmax_[i] = std::log10(clamp0(obs_map_[i] / m) + kLogOffset);

  double mu = obs_map_.sum() / obs_map_.size();
  if (!(mu > 0.0)) throw DegenerateInputError("Objective: observed noise map mean is not positive");
  obs_mean_norm_ = obs_map_;
  obs_mean_norm_ *= 1.0 / mu;
}

LossBreakdown Objective::eval(const ScalarField& rho, const ScalarField& omega_L, ScalarField* d_rho,
                              ScalarField* d_omega) const {
  const GridGeometry& g = kernels_.geometry();
  if (rho.rows() != g.height || rho.cols() != g.width || !rho.same_shape(omega_L))
    throw InvalidInputError("Objective::eval: field resolution mismatch");
  const long n = rho.size();
  const double inv_n = 1.0 / n;

  // Forward: A(r) is the pixelwise source contribution, Lambda(r) the
  // frequency-summed Lorentzian response at omega_L(r). All map-level losses
  // depend on the spectrum only through N = A .* Lambda.
  ScalarField b;  // F1 only: convolved NV field before squaring
  ScalarField a;
  if (op_ == OperatorKind::F2) {
    a = kernels_.convolve(rho, KernelStack::Kernel::summed_power);
  } else {
    b = kernels_.convolve(rho, KernelStack::Kernel::nv_projected);
    a = ScalarField(g.height, g.width);
    for (long i = 0; i < n; ++i) a[i] = b[i] * b[i];
  }

  ScalarField lam(g.height, g.width, 0.0), dlam(g.height, g.width, 0.0);
  const bool need_grad = d_rho != nullptr || d_omega != nullptr;
  for (int f = 0; f < obs_.nf(); ++f) {
    double w = obs_.freqs.values[f];
    for (long i = 0; i < n; ++i) {
      lam[i] += lorentzian(w, omega_L[i], gamma_);
      if (need_grad) dlam[i] += lorentzian_domega(w, omega_L[i], gamma_);
    }
  }

  ScalarField npred(g.height, g.width);
  for (long i = 0; i < n; ++i) npred[i] = a[i] * lam[i];

  LossBreakdown bd;
  const double w_fid = stage_ == Stage::coarse ? weights_.fidelity : weights_.nm;
  const double w_nm = stage_ == Stage::coarse ? weights_.nm : weights_.fidelity;
  const double w_ds = weights_.ds;
  const double w_l1 = weights_.l1_total();
  const double w_tv = weights_.tv;

  ScalarField d_npred(g.height, g.width, 0.0);

  // log-MSE fidelity on max-normalized maps
  double m_pred = npred.max();
  long k_pred = npred.argmax();
  if (!(m_pred > 0.0)) throw DegenerateInputError("Objective::eval: predicted noise map has no positive max");
  {
    double acc = 0.0, coupling = 0.0;
    for (long i = 0; i < n; ++i) {
      double nh = clamp0(npred[i] / m_pred);
      double d = std::log10(nh + kLogOffset) - obs_lmax_[i];
      acc += d * d;
      if (need_grad && w_fid != 0.0 && npred[i] >= 0.0) {
        double u = 2.0 * inv_n * d / (kLn10 * (nh + kLogOffset));
        d_npred[i] += w_fid * u / m_pred;
        coupling += u * npred[i];
      }
    }
    bd.fidelity = w_fid * acc * inv_n;
    if (need_grad && w_fid != 0.0 && options_.grad_through_max)
      d_npred[k_pred] -= w_fid * coupling / (m_pred * m_pred);
  }

  // mean-normalized noise-map MSE
  {
    double mu = npred.sum() * inv_n;
    if (!(mu > 0.0)) throw DegenerateInputError("Objective::eval: predicted noise map mean is not positive");
    double acc = 0.0, dot = 0.0;
    for (long i = 0; i < n; ++i) {
      double p = npred[i] / mu;
      double d = p - obs_mean_norm_[i];
      acc += d * d;
      if (need_grad && w_nm != 0.0) dot += d * p;
    }
    bd.nm = w_nm * acc * inv_n;
    if (need_grad && w_nm != 0.0) {
      for (long i = 0; i < n; ++i) {
        double d = npred[i] / mu - obs_mean_norm_[i];
        d_npred[i] += w_nm * 2.0 * inv_n * (d / mu - dot / (mu * n));
      }
    }
  }

  // direct-density proxy: mean-normalized rho^2 against the observed map
  ScalarField d_rho_local(g.height, g.width, 0.0);
  {
    double mu2 = 0.0;
    for (long i = 0; i < n; ++i) mu2 += rho[i] * rho[i];
    mu2 *= inv_n;
    if (mu2 > 0.0) {
      double acc = 0.0, dot = 0.0;
      for (long i = 0; i < n; ++i) {
        double p = rho[i] * rho[i] / mu2;
        double d = p - obs_mean_norm_[i];
        acc += d * d;
        if (need_grad && w_ds != 0.0) dot += d * p;
      }
      bd.ds = w_ds * acc * inv_n;
      if (need_grad && w_ds != 0.0) {
        for (long i = 0; i < n; ++i) {
          double d = rho[i] * rho[i] / mu2 - obs_mean_norm_[i];
          double d_sq = 2.0 * inv_n * (d / mu2 - dot / (mu2 * n));
          d_rho_local[i] += w_ds * d_sq * 2.0 * rho[i];
        }
      }
    } else if (w_ds != 0.0) {
      throw DegenerateInputError("Objective::eval: rho^2 mean is not positive in the direct-density term");
    }
  }

  // L1 with sign(0) = 0
  {
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
      acc += std::abs(rho[i]);
      if (need_grad && w_l1 != 0.0) d_rho_local[i] += w_l1 * (rho[i] > 0.0 ? 1.0 : rho[i] < 0.0 ? -1.0 : 0.0);
    }
    bd.l1 = w_l1 * acc;
  }

  // anisotropic TV, forward differences
  {
    double acc = 0.0;
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) {
        if (c + 1 < g.width) {
          double d = rho.at(r, c + 1) - rho.at(r, c);
          acc += std::abs(d);
          if (need_grad && w_tv != 0.0 && d != 0.0) {
            double s = d > 0.0 ? 1.0 : -1.0;
            d_rho_local.at(r, c + 1) += w_tv * s;
            d_rho_local.at(r, c) -= w_tv * s;
          }
        }
        if (r + 1 < g.height) {
          double d = rho.at(r + 1, c) - rho.at(r, c);
          acc += std::abs(d);
          if (need_grad && w_tv != 0.0 && d != 0.0) {
            double s = d > 0.0 ? 1.0 : -1.0;
            d_rho_local.at(r + 1, c) += w_tv * s;
            d_rho_local.at(r, c) -= w_tv * s;
          }
        }
      }
    bd.tv = w_tv * acc;
  }

  bd.total = bd.fidelity + bd.nm + bd.ds + bd.l1 + bd.tv;

  if (need_grad) {
    // back through N = A .* Lambda, then through the operator's convolution;
    // kernels are even so the adjoint is convolution with the same kernel
    ScalarField d_a(g.height, g.width);
    for (long i = 0; i < n; ++i) d_a[i] = d_npred[i] * lam[i];
    if (d_omega) {
      *d_omega = ScalarField(g.height, g.width);
      for (long i = 0; i < n; ++i) (*d_omega)[i] = d_npred[i] * a[i] * dlam[i];
    }
    if (d_rho) {
      if (op_ == OperatorKind::F2) {
        *d_rho = kernels_.convolve(d_a, KernelStack::Kernel::summed_power);
      } else {
        ScalarField d_b(g.height, g.width);
        for (long i = 0; i < n; ++i) d_b[i] = 2.0 * b[i] * d_a[i];
        *d_rho = kernels_.convolve(d_b, KernelStack::Kernel::nv_projected);
      }
      *d_rho += d_rho_local;
    }
  }
  return bd;
}

LossBreakdown total_loss(const ScalarField& rho, const ScalarField& omega_L, const Spectrum& obs,
                         OperatorKind op, const KernelStack& kernels, double gamma, const LossWeights& weights,
                         Stage stage) {
  Objective obj(obs, op, kernels, gamma, weights, stage);
  return obj.eval(rho, omega_L);
}

LossBreakdown grad_total_loss(const ScalarField& rho, const ScalarField& omega_L, const Spectrum& obs,
                              OperatorKind op, const KernelStack& kernels, double gamma,
                              const LossWeights& weights, Stage stage, ScalarField& d_rho, ScalarField& d_omega,
                              ObjectiveOptions options) {
  Objective obj(obs, op, kernels, gamma, weights, stage, options);
  return obj.eval(rho, omega_L, &d_rho, &d_omega);
}

std::pair<ScalarField, double> scale_correction(const ScalarField& rho_hat, const ScalarField& omega_hat,
                                                const Spectrum& obs, OperatorKind op, const KernelStack& kernels,
                                                double gamma) {
  if (op == OperatorKind::F3) throw InvalidInputError("scale_correction: operator must be F1 or F2");
  Spectrum pred = op == OperatorKind::F2 ? forward_f2(rho_hat, omega_hat, kernels, obs.freqs, gamma)
                                         : forward_f1(rho_hat, omega_hat, kernels, obs.freqs, gamma);
  double e_pred = pred.total_energy();
  double e_obs = obs.total_energy();
  if (!(e_pred > 0.0)) throw SolverError("scale_correction: predicted energy is not positive");
  double ratio = e_obs / e_pred;
  double alpha = op == OperatorKind::F2 ? ratio : std::sqrt(ratio);
  ScalarField scaled = rho_hat;
  scaled *= alpha;
  return {std::move(scaled), alpha};
}

}  // namespace netmy
