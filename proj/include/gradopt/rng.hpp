#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "gradopt/types.hpp"

namespace gradopt {

namespace detail {
// splitmix64: standard 64-bit mixer, used to turn (seed, labels...) into
// well-separated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = seed;
  std::uint64_t acc = splitmix64(h);
  for (std::uint64_t l : labels) {
    h ^= l + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    acc = splitmix64(h);
  }
  return acc;
}
}  // namespace detail

/// Deterministic random stream. The engine is std::mt19937_64; the
/// distributions below are fixed explicitly (not std::*_distribution, whose
/// output sequences are implementation-defined) so that a seed pins the
/// exact draw sequence across toolchains. Substreams derived from the same
/// seed with different labels are independent for practical purposes.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Child stream keyed by (this stream's seed, labels...). Derivation uses
  /// only the seed, never the current state, so substream layouts are stable
  /// no matter how much of the parent has been consumed.
  RngStream derive(std::initializer_list<std::uint64_t> labels) const {
    return RngStream(detail::mix(seed_, labels));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller (no cached second value, so the draw
  /// count per call is fixed: exactly two engine steps).
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1]; log stays finite
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  Vec uniform_vec(const BoxDomain& box) {
    Vec x(box.dim);
    for (double& xi : x) xi = uniform(box.lower, box.upper);
    return x;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace gradopt
