#pragma once

// Seedable, splittable randomness. Substreams are derived by hashing the
// base seed with integer keys, so parallel and serial evaluation orders
// produce identical draws. All samplers are written out explicitly (no
// std::*_distribution) so that streams are stable across toolchains.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace dpmic {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ k);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng substream(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> keys) {
    return Rng(mix_keys(seed, keys));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1); rejects exact zero.
  double uniform01_open() {
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// One draw from a zero-mean Laplace distribution with scale b, by inverse
// CDF from a single uniform.
inline double laplace_sample(double b, Rng& rng) {
  if (!(b > 0.0)) throw std::invalid_argument("laplace_sample: scale must be > 0");
  const double u = rng.uniform01_open() - 0.5;
  const double s = u < 0.0 ? -1.0 : 1.0;
  return -b * s * std::log1p(-2.0 * std::abs(u));
}

}  // namespace dpmic
