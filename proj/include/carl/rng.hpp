#pragma once

#include <cmath>
#include <cstdint>

namespace carl {

// splitmix64: tiny, fast, and stable across platforms.  Used both as the
// simulation RNG and as the seed-expansion scheme for sweep replicates, so
// that every output is reproducible from a single master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; hand-rolled so streams are identical across standard
  // libraries.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Deterministic per-point seed for sweep point `index`, replicate seed
// `replicate_seed`.  Mixing through splitmix64 keeps nearby indices
// uncorrelated.
inline std::uint64_t derive_seed(std::uint64_t replicate_seed, std::uint64_t index) {
  std::uint64_t s = replicate_seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(s);
}

}  // namespace carl
