#ifndef NETMY_OPERATORS_HPP
#define NETMY_OPERATORS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "netmy/field.hpp"
#include "netmy/kernels.hpp"

namespace netmy {

enum class OperatorKind { F1, F2, F3 };

std::string operator_name(OperatorKind k);
OperatorKind parse_operator(const std::string& name);

/// Measurement cube indexed (frequency, row, col).
struct Spectrum {
  std::vector<double> data;  // nf * H * W, frequency-major
  FrequencyGrid freqs;
  GridGeometry geometry;

  Spectrum() = default;
  Spectrum(const FrequencyGrid& f, const GridGeometry& g)
      : data(static_cast<size_t>(f.count()) * g.pixels(), 0.0), freqs(f), geometry(g) {}

  int nf() const { return freqs.count(); }
  double& at(int f, int r, int c) { return data[(static_cast<size_t>(f) * geometry.height + r) * geometry.width + c]; }
  double at(int f, int r, int c) const {
    return data[(static_cast<size_t>(f) * geometry.height + r) * geometry.width + c];
  }
  double* plane(int f) { return data.data() + static_cast<size_t>(f) * geometry.pixels(); }
  const double* plane(int f) const { return data.data() + static_cast<size_t>(f) * geometry.pixels(); }

  double total_energy() const {
    double s = 0.0;
    for (double x : data) s += x;
    return s;
  }
  double max_value() const {
    double m = data.empty() ? 0.0 : data[0];
    for (double x : data)
      if (x > m) m = x;
    return m;
  }
};

/// Tensor/incoherent operator: S(w,r) = [sum_a (|G_az|^2 * rho)(r)] L(w; omega_L(r)).
/// Linear in rho. Throws InvalidInputError on negative rho entries or shape mismatch.
Spectrum forward_f2(const ScalarField& rho, const ScalarField& omega_L, const KernelStack& kernels,
                    const FrequencyGrid& freqs, double gamma);

/// Scalar/coherent operator: S(w,r) = |(G_nv * rho)(r)|^2 L(w; omega_L(r)).
Spectrum forward_f1(const ScalarField& rho, const ScalarField& omega_L, const KernelStack& kernels,
                    const FrequencyGrid& freqs, double gamma);

/// Source pixel for the direct simulator's sparse path.
struct SourcePixel {
  int row, col;
  double weight;
};

/// Source-side direct simulator: S(w,r) = sum_src rho(src) P(R(r,src)) L(w; omega_L(src)),
/// with the Lorentzian evaluated at the source pixel. O(|sources| * |Omega| * |W|).
/// When `sources` is null, iterates over all pixels with rho != 0.
Spectrum forward_f3(const ScalarField& rho, const ScalarField& omega_L, const GridGeometry& geometry,
                    const FrequencyGrid& freqs, double gamma, const std::vector<SourcePixel>* sources = nullptr);

/// F1 - F2 assembled from its pointwise decomposition (coherent cross-term,
/// diagonal discrepancy, minus transverse power). Asserts agreement with the
/// direct subtraction of the two operators to 1e-10 relative.
Spectrum operator_gap(const ScalarField& rho, const ScalarField& omega_L, const KernelStack& kernels,
                      const FrequencyGrid& freqs, double gamma);

/// Adds i.i.d. Gaussian sensor noise with sigma = noise_level * max(spectrum).
/// Deterministic given the seed; noise_level = 0 returns the input unchanged.
Spectrum add_sensor_noise(const Spectrum& spectrum, double noise_level, uint64_t rng_seed);

}  // namespace netmy

#endif
