#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pinchlab/linalg.hpp"

namespace pinchlab {

/// Seeded generator for the random matrices used by experiments and tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive

  Matrix gaussian(Eigen::Index rows, Eigen::Index cols);
  /// Gaussian skew-hermitian matrix normalized to unit operator norm.
  SkewHermitian skew(Eigen::Index n);
  /// Haar-distributed unitary (QR of a gaussian matrix with phase fix).
  UnitaryMatrix haar_unitary(Eigen::Index n);
  /// Random unit vector in C^n.
  Vector unit_vector(Eigen::Index n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derives an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace pinchlab
