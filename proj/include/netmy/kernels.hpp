#ifndef NETMY_KERNELS_HPP
#define NETMY_KERNELS_HPP

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "netmy/fft.hpp"
#include "netmy/field.hpp"

namespace netmy {

/// Dipolar Green tensor G_ia(R) = prefactor * (3 R_i R_a - |R|^2 delta_ia) / |R|^5.
/// Throws SingularPointError on |R| = 0.
std::array<std::array<double, 3>, 3> green_tensor(const std::array<double, 3>& R, double prefactor);

/// Lorentzian spectral response gamma^2 / ((omega - omega_L)^2 + gamma^2).
inline double lorentzian(double omega, double omega_L, double gamma) {
  double d = omega - omega_L;
  return gamma * gamma / (d * d + gamma * gamma);
}

/// Derivative of lorentzian with respect to omega_L.
inline double lorentzian_domega(double omega, double omega_L, double gamma) {
  double d = omega - omega_L;
  double den = d * d + gamma * gamma;
  return 2.0 * gamma * gamma * d / (den * den);
}

/// Channel-summed power at a relative position: sum_a |G_az(R)|^2.
double summed_power_at(double dx, double dy, double z, double prefactor = 1.0);

enum class ConvMode { linear, periodic };

/// Per-channel dipolar power kernels sampled on the full linear-convolution
/// footprint, plus cached frequency-domain transforms. Immutable after
/// construction; safe to share across threads.
class KernelStack {
 public:
  enum class Kernel { summed_power, nv_projected, channel_x, channel_y, channel_z };

  explicit KernelStack(const GridGeometry& geometry, ConvMode mode = ConvMode::linear);

  const GridGeometry& geometry() const { return geom_; }
  ConvMode mode() const { return mode_; }

  /// Kernels on the centered (2H-1) x (2W-1) support; index (H-1, W-1) is
  /// zero displacement.
  const ScalarField& channel_power(int axis) const { return channels_[axis]; }
  const ScalarField& summed_power() const { return summed_; }
  const ScalarField& nv_projected() const { return nv_; }

  /// Linear (or periodic) convolution of the named cached kernel with a field
  /// at the stack's grid resolution. Throws InvalidInputError on mismatch.
  ScalarField convolve(const ScalarField& field, Kernel which) const;

  int pad_rows() const { return pad_rows_; }
  int pad_cols() const { return pad_cols_; }

 private:
  const std::vector<cplx>& cached_fft(Kernel which) const;

  GridGeometry geom_;
  ConvMode mode_;
  std::array<ScalarField, 3> channels_;  // |G_xz|^2, |G_yz|^2, |G_zz|^2
  ScalarField summed_;                   // P = sum_a |G_az|^2
  ScalarField nv_;                       // G_nv for n = (0,0,1), signed
  int pad_rows_ = 0, pad_cols_ = 0;
  std::vector<cplx> fft_summed_, fft_nv_, fft_chan_x_, fft_chan_y_, fft_chan_z_;
};

/// One-shot linear convolution of an arbitrary centered (2H-1)x(2W-1) kernel
/// with an HxW field (no cache). Result restricted to the field's grid.
ScalarField convolve2d(const ScalarField& centered_kernel, const ScalarField& field);

}  // namespace netmy

#endif
