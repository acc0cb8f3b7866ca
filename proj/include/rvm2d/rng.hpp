#pragma once

#include <cstdint>

namespace rvm {

// Counter-based generator: every draw is a pure hash of (seed, stream, counter),
// so results do not depend on call order or thread count.  The mix is the
// splitmix64 finalizer applied twice with distinct keys.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z ^= mix(counter + 0x632be59bd9b4e019ULL);
    return mix(z);
  }

  // uniform in [0, 1)
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  // uniform in [a, b)
  double uniform(std::uint64_t stream, std::uint64_t counter, double a, double b) const {
    return a + (b - a) * uniform(stream, counter);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

// Additive low-discrepancy sequence in up to 4 dimensions (generalized golden
// ratio).  Deterministic for a given seed; the seed only shifts the origin.
class LowDiscrepancy4 {
 public:
  explicit LowDiscrepancy4(std::uint64_t seed) {
    // alpha_k = phi_4^-(k+1) with phi_4 the positive root of x^5 = x + 1
    const double phi = 1.1673039782614187;
    double a = 1.0;
    CounterRng rng(seed);
    for (int k = 0; k < 4; ++k) {
      a /= phi;
      alpha_[k] = a;
      shift_[k] = rng.uniform(0xADD5EEDULL, static_cast<std::uint64_t>(k));
    }
  }

  // component d of point i, in [0, 1)
  double point(std::uint64_t i, int d) const {
    double v = shift_[d] + alpha_[d] * static_cast<double>(i + 1);
    return v - static_cast<std::uint64_t>(v);
  }

 private:
  double alpha_[4];
  double shift_[4];
};

}  // namespace rvm
