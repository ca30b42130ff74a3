#include "netmy/diagnostics.hpp"

#include <cmath>

#include "netmy/fft.hpp"

namespace netmy {

CenterBiasReport iter0_center_bias(const Spectrum& obs, OperatorKind op, const KernelStack& kernels,
                                   double gamma, double init_value) {
  if (!(init_value > 0.0)) throw InvalidInputError("iter0_center_bias: init must be positive");
  const GridGeometry& g = kernels.geometry();

  LossWeights w{};  // fidelity only, so the probe measures D's gradient exactly
  w.fidelity = 1.0;
  w.nm = w.ds = w.l1_sparsity = w.l1_extra = w.tv = 0.0;
  Objective obj(obs, op, kernels, gamma, w, Stage::coarse);

  ScalarField rho(g.height, g.width, init_value);
  ScalarField omega(g.height, g.width, 2.0);
  ScalarField d_rho, d_omega;
  obj.eval(rho, omega, &d_rho, &d_omega);

  CenterBiasReport rep;
  rep.grad_map = ScalarField(g.height, g.width);
  for (long i = 0; i < d_rho.size(); ++i) rep.grad_map[i] = std::abs(d_rho[i]);

  double cr = 0.5 * (g.height - 1), cc = 0.5 * (g.width - 1);
  int ir = static_cast<int>(cr), ic = static_cast<int>(cc);
  double center_acc = 0.0;
  int center_n = 0;
  for (int r = ir - 1; r <= ir + 1; ++r)
    for (int c = ic - 1; c <= ic + 1; ++c) {
      center_acc += rep.grad_map.at(r, c);
      ++center_n;
    }
  double ring_acc = 0.0;
  long ring_n = 0;
  double ring_r = g.height / 4.0;
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c) {
      if (std::hypot(r - cr, c - cc) > ring_r) {
        ring_acc += rep.grad_map.at(r, c);
        ++ring_n;
      }
    }
  rep.center_outer_ratio = (ring_n && ring_acc > 0.0) ? (center_acc / center_n) / (ring_acc / ring_n)
                                                      : std::numeric_limits<double>::infinity();
  auto [pr, pc] = rep.grad_map.argmax_rc();
  rep.peak = {pr, pc};
  rep.peak_center_dist_px = std::hypot(pr - cr, pc - cc);
  return rep;
}

double center_mass_ratio(const ScalarField& rho, double radius_px) {
  double cr = 0.5 * (rho.rows() - 1), cc = 0.5 * (rho.cols() - 1);
  double total = 0.0, inner = 0.0;
  for (int r = 0; r < rho.rows(); ++r)
    for (int c = 0; c < rho.cols(); ++c) {
      double v = rho.at(r, c);
      total += v;
      if (std::hypot(r - cr, c - cc) <= radius_px) inner += v;
    }
  return total > 0.0 ? inner / total : 0.0;
}

BarrierProfile energy_barrier_scan(const ScalarField& rho_collapse, const ScalarField& rho_star,
                                   const ScalarField& omega_L, const Spectrum& obs, OperatorKind op,
                                   const KernelStack& kernels, double gamma, const LossWeights& weights,
                                   int n_points) {
  if (n_points < 2) throw InvalidInputError("energy_barrier_scan: need at least the two endpoints");
  Objective obj(obs, op, kernels, gamma, weights, Stage::coarse);

  BarrierProfile prof;
  ScalarField rho(rho_star.rows(), rho_star.cols());
  for (int i = 0; i < n_points; ++i) {
    double t = static_cast<double>(i) / (n_points - 1);
    for (long j = 0; j < rho.size(); ++j) rho[j] = (1.0 - t) * rho_collapse[j] + t * rho_star[j];
    prof.t.push_back(t);
    prof.loss.push_back(obj.eval(rho, omega_L).total);
  }
  double endpoint_max = std::max(prof.loss.front(), prof.loss.back());
  double interior_max = -std::numeric_limits<double>::infinity();
  prof.argmax_t = 0.0;
  for (int i = 1; i + 1 < n_points; ++i) {
    if (prof.loss[i] > interior_max) {
      interior_max = prof.loss[i];
      prof.argmax_t = prof.t[i];
    }
  }
  prof.barrier_height = interior_max - endpoint_max;
  return prof;
}

ScalarField filter_kernel_probe(NetmyModel& model, const MlpParams& params, double beta,
                                const ScalarField& probe) {
  model.forward(params, beta);
  ScalarField zero(probe.rows(), probe.cols(), 0.0);
  Eigen::VectorXd vjp = Eigen::VectorXd::Zero(params.flat().size());
  model.backward(params, probe, zero, vjp);  // J_rho^T probe
  ScalarField out, out_omega;
  model.jvp(params, vjp, out, out_omega);    // J_rho (J_rho^T probe)
  return out;
}

Eigen::MatrixXd assemble_density_jacobian(NetmyModel& model, const MlpParams& params, double beta) {
  model.forward(params, beta);
  const long n = model.grid().n();
  const long p = params.flat().size();
  Eigen::MatrixXd J(n, p);
  ScalarField seed(model.grid().rows(), model.grid().cols(), 0.0);
  ScalarField zero(model.grid().rows(), model.grid().cols(), 0.0);
  Eigen::VectorXd row = Eigen::VectorXd::Zero(p);
  for (long i = 0; i < n; ++i) {
    seed[i] = 1.0;
    row.setZero();
    model.backward(params, seed, zero, row);
    J.row(i) = row.transpose();
    seed[i] = 0.0;
  }
  return J;
}

namespace {

DecayReport decay_from_samples(double z0) {
  // dedicated sampling: 64 x 64 points, 8 z0 extent -> z0/8 pitch
  const int n = 64;
  const double spacing = 8.0 * z0 / n;
  ScalarField P(n, n);
  for (int r = 0; r < n; ++r) {
    double dy = (r - 0.5 * (n - 1)) * spacing;
    for (int c = 0; c < n; ++c) {
      double dx = (c - 0.5 * (n - 1)) * spacing;
      P.at(r, c) = summed_power_at(dx, dy, z0);
    }
  }

  const int L = fft_next_pow2(2 * n);
  std::vector<cplx> buf(static_cast<size_t>(L) * L, cplx(0.0, 0.0));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) buf[static_cast<size_t>(r) * L + c] = P.at(r, c);
  fft_2d(buf, L, L, false);

  const double kmax = 3.1415926535897932384626433832795 / spacing;
  const double dk = 2.0 * 3.1415926535897932384626433832795 / (L * spacing);
  const int nbins = 64;
  double kr_max = 0.0;
  std::vector<double> sums(nbins, 0.0);
  std::vector<long> counts(nbins, 0);

  auto freq_of = [&](int idx) {
    int f = idx <= L / 2 ? idx : idx - L;
    return f * dk;
  };
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < L; ++c) kr_max = std::max(kr_max, std::hypot(freq_of(r), freq_of(c)));
  for (int r = 0; r < L; ++r) {
    double ky = freq_of(r);
    for (int c = 0; c < L; ++c) {
      double kr = std::hypot(ky, freq_of(c));
      int bin = std::min(nbins - 1, static_cast<int>(kr / kr_max * nbins));
      sums[bin] += std::abs(buf[static_cast<size_t>(r) * L + c]);
      ++counts[bin];
    }
  }

  DecayReport rep;
  rep.dc_value = std::abs(buf[0]);
  rep.spatial_sum = P.sum();
  rep.k_lo = kmax / 8.0;
  rep.k_hi = kmax / 2.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long m = 0;
  for (int b = 0; b < nbins; ++b) {
    if (!counts[b]) continue;
    double kc = (b + 0.5) * kr_max / nbins;
    double env = (sums[b] / counts[b]) / std::pow(1.0 + kc * z0, 2.0);
    rep.k.push_back(kc);
    rep.envelope.push_back(env);
    if (kc >= rep.k_lo && kc <= rep.k_hi && env > 0.0) {
      double y = std::log(env);
      sx += kc;
      sy += y;
      sxx += kc * kc;
      sxy += kc * y;
      ++m;
    }
  }
  if (m < 2) throw SolverError("kernel_frequency_decay: not enough bins in the fit band");
  double denom = m * sxx - sx * sx;
  rep.fitted_slope = (m * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.fitted_slope * sx) / m;
  return rep;
}

}  // namespace

DecayReport kernel_frequency_decay(const KernelStack& kernels) {
  return decay_from_samples(kernels.geometry().standoff);
}

DecayReport kernel_frequency_decay_z0(double z0) { return decay_from_samples(z0); }

double kernel_footprint_radius(double z0, double frac) {
  double p0 = summed_power_at(0.0, 0.0, z0);
  double r = 0.0;
  const double dr = z0 / 1000.0;
  while (summed_power_at(r, 0.0, z0) > frac * p0) r += dr;
  return r;
}

std::vector<ChiPoint> chi_sweep(const std::vector<double>& chi_values) {
  GridGeometry g;
  g.height = g.width = 64;
  g.spacing = 20.0;
  g.standoff = 30.0;  // stress standoff: both sources well inside one footprint
  const double gamma = 0.5;
  FrequencyGrid freqs = FrequencyGrid::uniform(1.0, 3.0, 50);
  KernelStack stack(g);

  const int r0 = 32, c0 = 31, c1 = 33;  // two pixels apart
  if (kernel_footprint_radius(g.standoff) < 2.0 * g.spacing)
    throw SolverError("chi_sweep: stress sources fall outside the kernel footprint");

  std::vector<ChiPoint> out;
  for (double chi : chi_values) {
    double spread = chi * gamma;
    double w_lo = 2.0 - 0.5 * spread, w_hi = 2.0 + 0.5 * spread;

    ScalarField rho(g.height, g.width, 0.0);
    rho.at(r0, c0) = 1.0;
    rho.at(r0, c1) = 1.0;

    ScalarField omega_src(g.height, g.width, 0.0);
    omega_src.at(r0, c0) = w_lo;
    omega_src.at(r0, c1) = w_hi;
    Spectrum s3 = forward_f3(rho, omega_src, g, freqs, gamma);

    // locally-constant Larmor realization: nearest-source fill
    ScalarField omega_fill(g.height, g.width);
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) {
        long d0 = static_cast<long>(r - r0) * (r - r0) + static_cast<long>(c - c0) * (c - c0);
        long d1 = static_cast<long>(r - r0) * (r - r0) + static_cast<long>(c - c1) * (c - c1);
        omega_fill.at(r, c) = d0 <= d1 ? w_lo : w_hi;
      }
    Spectrum s2 = forward_f2(rho, omega_fill, stack, freqs, gamma);

    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < s3.data.size(); ++i) {
      double d = s2.data[i] - s3.data[i];
      num += d * d;
      den += s3.data[i] * s3.data[i];
    }
    out.push_back({chi, std::sqrt(num / den)});
  }
  return out;
}

double sheet_noise_power(double z0) {
  const double h = 2.5;       // nm
  const double half = 1000.0; // nm
  const int n = static_cast<int>(half / h);
  double acc = 0.0;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) acc += summed_power_at(i * h, j * h, z0);
  return acc * h * h;
}

AdmmSweepResult admm_center_sweep(int n_scenes, int n_configs, int outer_cycles, uint64_t seed) {
  GridGeometry g;
  FrequencyGrid freqs = FrequencyGrid::uniform(1.0, 3.0, 50);
  const double gamma = 0.5;

  // config grid: vary the L1 prox weight, TV weight and penalty around the
  // defaults (eight combinations at most)
  std::vector<AdmmConfig> configs;
  for (double l1 : {1e-2, 1e-3})
    for (double tv : {1e-3, 0.0})
      for (double mu : {1e-3, 1e-2}) {
        AdmmConfig c;
        c.l1_weight = l1;
        c.tv_weight = tv;
        c.mu = mu;
        c.outer_cycles = outer_cycles;
        configs.push_back(c);
      }
  if (n_configs < static_cast<int>(configs.size())) configs.resize(n_configs);

  AdmmSweepResult res;
  SceneClass cls{CountBand::many, SepBand::far};
  for (int i = 0; i < n_scenes; ++i) {
    Scene scene = sample_scene(cls, g, seed + static_cast<uint64_t>(i));
    synthesize_observation(scene, OperatorKind::F3, freqs, gamma, 0.01, seed + 1000 + i);
    for (size_t ci = 0; ci < configs.size(); ++ci) {
      for (OperatorKind op : {OperatorKind::F1, OperatorKind::F2}) {
        SolverResult r = run_admm(scene.observed, op, configs[ci], seed);
        double ratio = center_mass_ratio(r.rho_hat);
        (op == OperatorKind::F1 ? res.ratios_f1 : res.ratios_f2).push_back(ratio);
      }
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
  };
  res.mean_ratio_f1 = mean(res.ratios_f1);
  res.mean_ratio_f2 = mean(res.ratios_f2);
  return res;
}

}  // namespace netmy
