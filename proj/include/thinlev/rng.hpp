#pragma once

#include <cmath>
#include <cstdint>

#include "thinlev/core.hpp"

namespace thinlev {

// splitmix64: tiny, fast, and good enough statistically for Monte Carlo work.
// Every (seed, replica, purpose, block) tuple gets its own stream, so replica
// sets extend deterministically when rerun with more replicas or a larger
// head cutoff.
inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t mix_tag(uint64_t state, uint64_t tag) {
  uint64_t s = state ^ (tag * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
  return splitmix64_next(s);
}

class Rng {
 public:
  explicit Rng(uint64_t state) : state_(state) {}

  // Stream derivation: fold tags into the seed one by one.
  static Rng stream(uint64_t seed, uint64_t a) { return Rng(mix_tag(seed, a)); }
  static Rng stream(uint64_t seed, uint64_t a, uint64_t b) {
    return Rng(mix_tag(mix_tag(seed, a), b));
  }
  static Rng stream(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    return Rng(mix_tag(mix_tag(mix_tag(seed, a), b), c));
  }

  uint64_t next_u64() { return splitmix64_next(state_); }

  // uniform on (0,1]; never returns 0 so log() is always safe
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }
  // uniform on [0,1)
  double uniform_co() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform_co();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Poisson sampler: inversion for small means, PTRD (Hormann) otherwise.
  long long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      double l = std::exp(-mean), p = 1.0;
      long long k = 0;
      do {
        ++k;
        p *= uniform();
      } while (p > l);
      return k - 1;
    }
    return poisson_ptrd(mean);
  }

 private:
  long long poisson_ptrd(double mu) {
    const double smu = std::sqrt(mu);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
      double u = uniform() - 0.5;
      double v = uniform();
      double us = 0.5 - std::fabs(u);
      double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<long long>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      double lm = std::log(mu);
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * lm - mu - std::lgamma(k + 1.0)) {
        return static_cast<long long>(k);
      }
    }
  }

  uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Stream purpose tags (documented counter scheme: seed -> replica -> purpose -> block).
namespace stream_tag {
inline constexpr uint64_t head_block = 0x48454144ull;  // per-block head clocks
inline constexpr uint64_t tail_noise = 0x5441494Cull;  // tail grid Gaussians
inline constexpr uint64_t levy = 0x4C455659ull;
inline constexpr uint64_t graph = 0x47524148ull;
inline constexpr uint64_t bm = 0x424D4 + 0x10000ull;
}  // namespace stream_tag

}  // namespace thinlev
