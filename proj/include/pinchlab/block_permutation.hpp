#pragma once

#include <compare>
#include <string>
#include <vector>

namespace pinchlab {

class ProjectionFamily;

/// A permutation sigma of the block labels {0, 1, ..., w} with sigma(0) = 0.
class BlockPermutation {
 public:
  static BlockPermutation identity(int w);
  /// Validates that `sigma` is a permutation of {0..w} fixing 0.
  static BlockPermutation make(std::vector<int> sigma);
  /// Additionally requires rank(p_i) = rank(p_sigma(i)) for every moved block.
  static BlockPermutation make(std::vector<int> sigma, const ProjectionFamily& fam);

  int operator()(int i) const { return sigma_.at(static_cast<std::size_t>(i)); }
  int block_count() const { return static_cast<int>(sigma_.size()) - 1; }
  const std::vector<int>& values() const { return sigma_; }
  bool is_identity() const;

  BlockPermutation inverse() const;
  /// (this o other)(i) = this(other(i)).
  BlockPermutation compose(const BlockPermutation& other) const;
  bool rank_compatible(const ProjectionFamily& fam) const;

  std::string to_string() const;

  auto operator<=>(const BlockPermutation&) const = default;

 private:
  explicit BlockPermutation(std::vector<int> sigma) : sigma_(std::move(sigma)) {}
  std::vector<int> sigma_;
};

}  // namespace pinchlab
