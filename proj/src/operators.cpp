#include "netmy/operators.hpp"

#include <cmath>

#include "netmy/errors.hpp"
#include "netmy/rng.hpp"

namespace netmy {

std::string operator_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::F1: return "f1";
    case OperatorKind::F2: return "f2";
    case OperatorKind::F3: return "f3";
  }
  return "?";
}

OperatorKind parse_operator(const std::string& name) {
  if (name == "f1" || name == "F1") return OperatorKind::F1;
  if (name == "f2" || name == "F2") return OperatorKind::F2;
  if (name == "f3" || name == "F3") return OperatorKind::F3;
  throw InvalidInputError("unknown operator: " + name);
}

namespace {

void check_inputs(const ScalarField& rho, const ScalarField& omega_L, const GridGeometry& g) {
  if (rho.rows() != g.height || rho.cols() != g.width || !rho.same_shape(omega_L))
    throw InvalidInputError("forward operator: field resolutions do not match the geometry");
  for (long i = 0; i < rho.size(); ++i) {
    if (rho[i] < 0.0) throw InvalidInputError("forward operator: rho has negative entries");
    if (!std::isfinite(omega_L[i])) throw InvalidInputError("forward operator: omega_L not finite");
  }
}

/// S(w, r) = A(r) * L(w; omega_L(r)) with A the pixelwise source contribution.
Spectrum modulate(const ScalarField& amplitude, const ScalarField& omega_L, const GridGeometry& g,
                  const FrequencyGrid& freqs, double gamma) {
  Spectrum s(freqs, g);
  const long n = g.pixels();
  for (int f = 0; f < freqs.count(); ++f) {
    double w = freqs.values[f];
    double* plane = s.plane(f);
    for (long i = 0; i < n; ++i) plane[i] = amplitude[i] * lorentzian(w, omega_L[i], gamma);
  }
  return s;
}

}  // namespace

Spectrum forward_f2(const ScalarField& rho, const ScalarField& omega_L, const KernelStack& kernels,
                    const FrequencyGrid& freqs, double gamma) {
  check_inputs(rho, omega_L, kernels.geometry());
  if (!(gamma > 0.0)) throw InvalidInputError("forward_f2: gamma must be > 0");
  ScalarField a = kernels.convolve(rho, KernelStack::Kernel::summed_power);
  return modulate(a, omega_L, kernels.geometry(), freqs, gamma);
}

Spectrum forward_f1(const ScalarField& rho, const ScalarField& omega_L, const KernelStack& kernels,
                    const FrequencyGrid& freqs, double gamma) {
  check_inputs(rho, omega_L, kernels.geometry());
  if (!(gamma > 0.0)) throw InvalidInputError("forward_f1: gamma must be > 0");
  ScalarField b = kernels.convolve(rho, KernelStack::Kernel::nv_projected);
  for (long i = 0; i < b.size(); ++i) b[i] = b[i] * b[i];
  return modulate(b, omega_L, kernels.geometry(), freqs, gamma);
}

Spectrum forward_f3(const ScalarField& rho, const ScalarField& omega_L, const GridGeometry& geometry,
                    const FrequencyGrid& freqs, double gamma, const std::vector<SourcePixel>* sources) {
  check_inputs(rho, omega_L, geometry);
  if (!(gamma > 0.0)) throw InvalidInputError("forward_f3: gamma must be > 0");
  const int H = geometry.height, W = geometry.width;

  std::vector<SourcePixel> srcs;
  if (sources) {
    srcs = *sources;
  } else {
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c)
        if (rho.at(r, c) != 0.0) srcs.push_back({r, c, rho.at(r, c)});
  }

  Spectrum s(freqs, geometry);
  const double z = geometry.standoff, pf = geometry.mu0_over_4pi;
  ScalarField pk(H, W);
  std::vector<double> lor(freqs.count());
  for (const SourcePixel& src : srcs) {
    for (int r = 0; r < H; ++r) {
      double dy = (r - src.row) * geometry.spacing;
      for (int c = 0; c < W; ++c) {
        double dx = (c - src.col) * geometry.spacing;
        pk.at(r, c) = summed_power_at(dx, dy, z, pf) * src.weight;
      }
    }
    double wl = omega_L.at(src.row, src.col);
    for (int f = 0; f < freqs.count(); ++f) lor[f] = lorentzian(freqs.values[f], wl, gamma);
    for (int f = 0; f < freqs.count(); ++f) {
      double* plane = s.plane(f);
      double lf = lor[f];
      for (long i = 0; i < pk.size(); ++i) plane[i] += pk[i] * lf;
    }
  }
  return s;
}

Spectrum operator_gap(const ScalarField& rho, const ScalarField& omega_L, const KernelStack& kernels,
                      const FrequencyGrid& freqs, double gamma) {
  check_inputs(rho, omega_L, kernels.geometry());
  const GridGeometry& g = kernels.geometry();
  const long n = g.pixels();

  ScalarField rho2(g.height, g.width);
  ScalarField rho2_minus_rho(g.height, g.width);
  for (long i = 0; i < n; ++i) {
    rho2[i] = rho[i] * rho[i];
    rho2_minus_rho[i] = rho2[i] - rho[i];
  }

  // Cross-term C = (G_nv * rho)^2 - |G_nv|^2 * rho^2, diagonal discrepancy
  // |G_nv|^2 * (rho^2 - rho), transverse power (|G_xz|^2 + |G_yz|^2) * rho.
  ScalarField b = kernels.convolve(rho, KernelStack::Kernel::nv_projected);
  ScalarField nvsq_rho2 = kernels.convolve(rho2, KernelStack::Kernel::channel_z);
  ScalarField diag = kernels.convolve(rho2_minus_rho, KernelStack::Kernel::channel_z);
  ScalarField tx = kernels.convolve(rho, KernelStack::Kernel::channel_x);
  ScalarField ty = kernels.convolve(rho, KernelStack::Kernel::channel_y);

  ScalarField amp(g.height, g.width);
  for (long i = 0; i < n; ++i) {
    double cross = b[i] * b[i] - nvsq_rho2[i];
    amp[i] = cross + diag[i] - (tx[i] + ty[i]);
  }
  Spectrum gap = modulate(amp, omega_L, g, freqs, gamma);

  // Consistency check against the plain subtraction of the two operators.
  Spectrum s1 = forward_f1(rho, omega_L, kernels, freqs, gamma);
  Spectrum s2 = forward_f2(rho, omega_L, kernels, freqs, gamma);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < gap.data.size(); ++i) {
    double direct = s1.data[i] - s2.data[i];
    double d = gap.data[i] - direct;
    num += d * d;
    den += direct * direct;
  }
  if (den > 0.0 && std::sqrt(num / den) > 1e-10)
    throw SolverError("operator_gap: decomposition disagrees with F1 - F2 beyond 1e-10 relative");
  return gap;
}

Spectrum add_sensor_noise(const Spectrum& spectrum, double noise_level, uint64_t rng_seed) {
  if (noise_level < 0.0) throw InvalidInputError("add_sensor_noise: noise_level must be >= 0");
  if (noise_level == 0.0) return spectrum;
  Spectrum out = spectrum;
  double sigma = noise_level * spectrum.max_value();
  Rng rng(rng_seed);
  for (double& x : out.data) x += sigma * rng.gaussian();
  return out;
}

}  // namespace netmy
