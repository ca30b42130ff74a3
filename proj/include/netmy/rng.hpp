#ifndef NETMY_RNG_HPP
#define NETMY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace netmy {

// Deterministic RNG helpers. mt19937_64 has a fully specified algorithm, but
// the standard distributions are implementation-defined, so the mappings to
// uniform/normal are spelled out here to keep outputs portable across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t bits() { return eng_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] inclusive (rejection-free modulo bias is
  /// negligible for the small ranges used here; keep it simple and stable).
  long uniform_int(long lo, long hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(eng_() % span);
  }

  /// Standard normal via Box-Muller; caches the second deviate.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace netmy

#endif
