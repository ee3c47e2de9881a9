#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace gtpool {

/// xoshiro256** seeded through splitmix64. Every derived quantity (uniforms,
/// bounded integers, shuffles) is computed here rather than through <random>
/// distributions, whose algorithms are implementation-defined, so a seed
/// yields the same stream on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent generator for a sub-task, derived from this generator's seed
  /// and `stream` without advancing this generator.
  Rng derive(std::uint64_t stream) const;

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace gtpool
