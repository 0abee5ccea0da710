#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace marginpca {

// Counter-based generator in the splitmix64 family: output i is a pure
// function of (seed, i), so streams for distinct seeds never share state
// and replay is exact on every platform.

namespace detail {
inline std::uint64_t avalanche64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Combine a seed with a stream index (split index, trial index, ...) into
/// an independent child seed.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  return detail::avalanche64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    ++counter_;
    return detail::avalanche64(seed_ + 0x9e3779b97f4a7c15ULL * counter_);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double next_open_double() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double next_gaussian() {
    double u = next_open_double();
    double v = next_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
  }

  /// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Fisher-Yates shuffle; std::shuffle is implementation-defined, this is not.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace marginpca
