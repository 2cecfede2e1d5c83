#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace refl {

// Deterministic RNG wrapper. All conversions from raw bits are spelled out
// here instead of going through std distributions, whose output is
// implementation-defined; every draw is reproducible from the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Lemire multiply-shift; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  // Standard normal via Box-Muller. Two uniforms per draw, no cached spare,
  // so the draw count per call is fixed.
  double normal();

  Eigen::VectorXd uniform_vector(int dim, double lo, double hi);
  Eigen::VectorXd normal_vector(int dim);

  // Fisher-Yates shuffle of 0..n-1.
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 eng_;
};

// Seed-lattice derivation: mixes (base, a, b) so that every cell of a sweep
// owns an independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

}  // namespace refl
