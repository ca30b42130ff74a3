#ifndef NETMY_FFT_HPP
#define NETMY_FFT_HPP

#include <complex>
#include <vector>

namespace netmy {

using cplx = std::complex<double>;

/// Next power of two >= n.
int fft_next_pow2(int n);

/// In-place radix-2 FFT of length n (power of two). inverse=true applies the
/// conjugate transform and the 1/n factor.
void fft_1d(cplx* a, int n, bool inverse);

/// In-place 2D FFT of a row-major rows x cols buffer (both powers of two).
void fft_2d(std::vector<cplx>& a, int rows, int cols, bool inverse);

}  // namespace netmy

#endif
