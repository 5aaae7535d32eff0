#pragma once

#include <cstdint>
#include <random>

namespace sphere_servo {

/// Portable seeded generator. The raw stream is std::mt19937_64, whose output
/// sequence is fixed by the standard. Uniform variates take the top 53 bits;
/// normal variates use the Box-Muller transform (cosine branch, then the
/// cached sine branch). Nothing here depends on library-specific
/// distribution implementations, so sequences match across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sphere_servo
