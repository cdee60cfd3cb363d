#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace qba::qcore {

/// Seeded 64-bit Mersenne Twister. One instance per trial; never shared
/// between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return unit_(engine_); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  /// +1 or -1 with equal probability.
  int sign() { return bernoulli(0.5) ? +1 : -1; }

  template <typename T>
  void shuffle(std::span<T> items) {
    std::shuffle(items.begin(), items.end(), engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// Counter-based seed derivation (splitmix64 finalizer over master + index).
/// Trial i of a run always gets derive_seed(master, i) regardless of
/// scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace qba::qcore
