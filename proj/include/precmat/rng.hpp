#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "precmat/errors.hpp"

namespace precmat {

// Seeded random stream built on std::mt19937_64.  The raw engine is
// portable across platforms, but the standard *distributions* are not, so
// every transform here is spelled out by hand: same seed, same doubles,
// everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller, cosine branch.  Consumes exactly two raw draws per call so
  // the stream position is easy to reason about.
  double normal() {
    // (0, 1] on the log side to avoid log(0)
    double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Uniform integer in [0, bound) by rejection, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw ConfigError("uniform_int: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  // Fisher-Yates.  std::shuffle is implementation-defined in how it consumes
  // the engine, so it is not used here.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

}  // namespace precmat
