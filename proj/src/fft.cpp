#include "netmy/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "netmy/errors.hpp"

namespace netmy {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Twiddle factors for a given length, cached once. The cache is tiny (a few
// power-of-two lengths) and read-only after insertion.
const std::vector<cplx>& twiddles(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<cplx>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> w(n / 2);
  for (int i = 0; i < n / 2; ++i) {
    double a = -kTwoPi * i / n;
    w[i] = cplx(std::cos(a), std::sin(a));
  }
  return cache.emplace(n, std::move(w)).first->second;
}

}  // namespace

int fft_next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_1d(cplx* a, int n, bool inverse) {
  if (n <= 1) return;
  if (n & (n - 1)) throw InvalidInputError("fft_1d: length must be a power of two");
  // bit reversal
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const std::vector<cplx>& w = twiddles(n);
  for (int len = 2; len <= n; len <<= 1) {
    int half = len >> 1;
    int stride = n / len;
    for (int i = 0; i < n; i += len) {
      for (int k = 0; k < half; ++k) {
        cplx t = w[k * stride];
        if (inverse) t = std::conj(t);
        cplx u = a[i + k];
        cplx v = a[i + k + half] * t;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) a[i] *= inv;
  }
}

void fft_2d(std::vector<cplx>& a, int rows, int cols, bool inverse) {
  if (static_cast<long>(rows) * cols != static_cast<long>(a.size()))
    throw InvalidInputError("fft_2d: buffer size mismatch");
  for (int r = 0; r < rows; ++r) fft_1d(a.data() + static_cast<size_t>(r) * cols, cols, inverse);
  std::vector<cplx> col(rows);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) col[r] = a[static_cast<size_t>(r) * cols + c];
    fft_1d(col.data(), rows, inverse);
    for (int r = 0; r < rows; ++r) a[static_cast<size_t>(r) * cols + c] = col[r];
  }
}

}  // namespace netmy
