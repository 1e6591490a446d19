#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace sprtree {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic generator. Stream k of a master seed is an independent
// replica stream: Rng(master, k) seeds mt19937_64 with
// splitmix64(master + k * 0x9E3779B97F4A7C15). Uniform and normal variates
// are produced from raw 64-bit words (not std::*_distribution) so that a
// fixed seed yields identical output on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}
  Rng(std::uint64_t master, std::uint64_t stream)
      : gen_(splitmix64(master + stream * 0x9E3779B97F4A7C15ULL)) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // (0, 1): rejects the exact zero word
  double uniform_pos() {
    for (;;) {
      double u = uniform01();
      if (u > 0.0) return u;
    }
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // uniform integer in [0, n), unbiased via rejection
  int uniform_int(int n) {
    std::uint64_t bound = std::uint64_t(n);
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      std::uint64_t x = gen_();
      if (x < limit) return static_cast<int>(x % bound);
    }
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sprtree
