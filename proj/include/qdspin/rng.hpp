// Deterministic, platform-independent random streams.
//
// std::mt19937 with the standard distributions is implementation-defined,
// which would break byte-identical result files across toolchains. We use
// xoshiro256** seeded through splitmix64 and hand-rolled variate
// transforms instead. Per-task streams are derived as
// stream(seed, point_index, shot_index) so parallel execution order never
// changes the numbers a task sees.
#pragma once

#include <cmath>
#include <cstdint>

namespace qdspin {

inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
    have_gauss_ = false;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal, Marsaglia polar method.
  double gaussian() {
    if (have_gauss_) {
      have_gauss_ = false;
      return cached_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    cached_ = v * f;
    have_gauss_ = true;
    return u * f;
  }

  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  // Poisson variate; inversion for small mean, gaussian approx for large.
  uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 60.0) {
      double l = std::exp(-mean), p = 1.0;
      uint64_t k = 0;
      do {
        ++k;
        p *= uniform();
      } while (p > l);
      return k - 1;
    }
    double g = gaussian(mean, std::sqrt(mean));
    return g <= 0.0 ? 0 : static_cast<uint64_t>(g + 0.5);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
  double cached_ = 0.0;
  bool have_gauss_;
};

// Derives an independent child seed for task (a, b) of a run.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  uint64_t s = seed;
  uint64_t h = splitmix64_next(s);
  s = h ^ (a * 0xD6E8FEB86659FD93ull);
  h = splitmix64_next(s);
  s = h ^ (b * 0xCA5A826395121157ull);
  return splitmix64_next(s);
}

}  // namespace qdspin
