#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace phasekd {

/// splitmix64 finalizer; used to derive independent seed streams.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a stream tag. Derived streams
/// are what make parallel per-video / per-arm execution bitwise equal to
/// serial execution.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b);

/// Deterministic RNG: mt19937_64 engine with fixed, engine-only transforms so
/// that the produced doubles do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (one value per call, no cached spare).
  double normal();
  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Seeded Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace phasekd
