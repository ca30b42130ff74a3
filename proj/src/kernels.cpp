#include "netmy/kernels.hpp"

#include <cmath>

#include "netmy/errors.hpp"

namespace netmy {

std::array<std::array<double, 3>, 3> green_tensor(const std::array<double, 3>& R, double prefactor) {
  double n2 = R[0] * R[0] + R[1] * R[1] + R[2] * R[2];
  if (!(n2 > 0.0)) throw SingularPointError("green_tensor: zero-length separation");
  double n5 = n2 * n2 * std::sqrt(n2);
  std::array<std::array<double, 3>, 3> g{};
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) {
      double num = 3.0 * R[i] * R[a] - (i == a ? n2 : 0.0);
      g[i][a] = prefactor * num / n5;
    }
  return g;
}

double summed_power_at(double dx, double dy, double z, double prefactor) {
  double n2 = dx * dx + dy * dy + z * z;
  double n5 = n2 * n2 * std::sqrt(n2);
  double gxz = prefactor * 3.0 * dx * z / n5;
  double gyz = prefactor * 3.0 * dy * z / n5;
  double gzz = prefactor * (3.0 * z * z - n2) / n5;
  return gxz * gxz + gyz * gyz + gzz * gzz;
}

namespace {

// Frequency-domain transform of a centered kernel, laid out so that circular
// convolution at the padded size reproduces linear convolution on the field
// window. The kernel's zero-displacement sample goes to index 0 with negative
// displacements wrapped to the top end.
std::vector<cplx> kernel_fft(const ScalarField& kernel, int H, int W, int pr, int pc, ConvMode mode) {
  std::vector<cplx> buf(static_cast<size_t>(pr) * pc, cplx(0.0, 0.0));
  for (int r = -(H - 1); r <= H - 1; ++r) {
    for (int c = -(W - 1); c <= W - 1; ++c) {
      double v = kernel.at(r + H - 1, c + W - 1);
      int rr = (r % pr + pr) % pr;
      int cc = (c % pc + pc) % pc;
      // periodic mode folds aliases onto the grid-sized torus; the linear
      // padded size never collides, so += is a plain store there.
      buf[static_cast<size_t>(rr) * pc + cc] += v;
    }
  }
  fft_2d(buf, pr, pc, false);
  return buf;
}

ScalarField convolve_with_fft(const std::vector<cplx>& kfft, const ScalarField& field, int pr, int pc) {
  int H = field.rows(), W = field.cols();
  std::vector<cplx> buf(static_cast<size_t>(pr) * pc, cplx(0.0, 0.0));
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) buf[static_cast<size_t>(r) * pc + c] = field.at(r, c);
  fft_2d(buf, pr, pc, false);
  for (size_t i = 0; i < buf.size(); ++i) buf[i] *= kfft[i];
  fft_2d(buf, pr, pc, true);
  ScalarField out(H, W);
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) out.at(r, c) = buf[static_cast<size_t>(r) * pc + c].real();
  return out;
}

}  // namespace

KernelStack::KernelStack(const GridGeometry& geometry, ConvMode mode) : geom_(geometry), mode_(mode) {
  geom_.validate();
  const int H = geom_.height, W = geom_.width;
  const int n_r = 2 * H - 1, n_c = 2 * W - 1;
  for (auto& ch : channels_) ch = ScalarField(n_r, n_c);
  summed_ = ScalarField(n_r, n_c);
  nv_ = ScalarField(n_r, n_c);

  const double z = geom_.standoff, pf = geom_.mu0_over_4pi;
  for (int r = 0; r < n_r; ++r) {
    double dy = (r - (H - 1)) * geom_.spacing;
    for (int c = 0; c < n_c; ++c) {
      double dx = (c - (W - 1)) * geom_.spacing;
      double n2 = dx * dx + dy * dy + z * z;
      double n5 = n2 * n2 * std::sqrt(n2);
      double gxz = pf * 3.0 * dx * z / n5;
      double gyz = pf * 3.0 * dy * z / n5;
      double gzz = pf * (3.0 * z * z - n2) / n5;
      channels_[0].at(r, c) = gxz * gxz;
      channels_[1].at(r, c) = gyz * gyz;
      channels_[2].at(r, c) = gzz * gzz;
      summed_.at(r, c) = gxz * gxz + gyz * gyz + gzz * gzz;
      nv_.at(r, c) = gzz;
    }
  }

  if (mode_ == ConvMode::linear) {
    pad_rows_ = fft_next_pow2(2 * H - 1);
    pad_cols_ = fft_next_pow2(2 * W - 1);
  } else {
    if ((H & (H - 1)) || (W & (W - 1)))
      throw InvalidInputError("KernelStack: periodic mode requires power-of-two grid dimensions");
    pad_rows_ = H;
    pad_cols_ = W;
  }

  fft_summed_ = kernel_fft(summed_, H, W, pad_rows_, pad_cols_, mode_);
  fft_nv_ = kernel_fft(nv_, H, W, pad_rows_, pad_cols_, mode_);
  fft_chan_x_ = kernel_fft(channels_[0], H, W, pad_rows_, pad_cols_, mode_);
  fft_chan_y_ = kernel_fft(channels_[1], H, W, pad_rows_, pad_cols_, mode_);
  fft_chan_z_ = kernel_fft(channels_[2], H, W, pad_rows_, pad_cols_, mode_);
}

const std::vector<cplx>& KernelStack::cached_fft(Kernel which) const {
  switch (which) {
    case Kernel::summed_power: return fft_summed_;
    case Kernel::nv_projected: return fft_nv_;
    case Kernel::channel_x: return fft_chan_x_;
    case Kernel::channel_y: return fft_chan_y_;
    case Kernel::channel_z: return fft_chan_z_;
  }
  throw InvalidInputError("KernelStack: unknown kernel id");
}

ScalarField KernelStack::convolve(const ScalarField& field, Kernel which) const {
  if (field.rows() != geom_.height || field.cols() != geom_.width)
    throw InvalidInputError("KernelStack::convolve: field resolution does not match the stack geometry");
  return convolve_with_fft(cached_fft(which), field, pad_rows_, pad_cols_);
}

ScalarField convolve2d(const ScalarField& centered_kernel, const ScalarField& field) {
  int H = field.rows(), W = field.cols();
  if (centered_kernel.rows() != 2 * H - 1 || centered_kernel.cols() != 2 * W - 1)
    throw InvalidInputError("convolve2d: kernel support must be (2H-1)x(2W-1) for an HxW field");
  int pr = fft_next_pow2(2 * H - 1);
  int pc = fft_next_pow2(2 * W - 1);
  auto kfft = kernel_fft(centered_kernel, H, W, pr, pc, ConvMode::linear);
  return convolve_with_fft(kfft, field, pr, pc);
}

}  // namespace netmy
