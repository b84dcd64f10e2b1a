#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fracvamp {

// splitmix64 finalizer; bijective on 64-bit integers.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based seed derivation: a trial's seed depends only on
// (master, cell, trial), never on execution order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                 std::uint64_t trial) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ cell);
  h = mix64(h ^ trial);
  return h;
}

// Deterministic uniform/normal source. std::mt19937_64 has a fully specified
// output sequence; the samplers below avoid std::*_distribution, whose
// algorithms are implementation-defined, so a seed pins the whole stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // standard normal, Marsaglia polar method
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // [0, n), rejection sampling, unbiased
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fracvamp
