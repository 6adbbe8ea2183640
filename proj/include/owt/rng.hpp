// Seeded random source with bit-stable output across platforms. mt19937_64 is
// fully specified by the standard; the distributions are implemented here
// because the standard library ones are not guaranteed to produce identical
// streams on different implementations.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace owt {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform integer in [0, n). Multiply-shift mapping; the modulo bias of
  // 2^-64 per draw is irrelevant at the sizes used here.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return real01() < p; }

  // Box-Muller; caches the second variate.
  double normal(double mean = 0.0, double sigma = 1.0) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sigma * spare_;
    }
    double u1 = 0.0;
    do {
      u1 = real01();
    } while (u1 <= 0.0);
    double u2 = real01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return mean + sigma * (r * std::cos(a));
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace owt
