#include "pinchlab/block_permutation.hpp"

#include <sstream>

#include "pinchlab/errors.hpp"
#include "pinchlab/pinching.hpp"

namespace pinchlab {

BlockPermutation BlockPermutation::identity(int w) {
  if (w < 0) throw InvalidArgument("block count must be nonnegative");
  std::vector<int> sigma(static_cast<std::size_t>(w) + 1);
  for (int i = 0; i <= w; ++i) sigma[static_cast<std::size_t>(i)] = i;
  return BlockPermutation(std::move(sigma));
}

BlockPermutation BlockPermutation::make(std::vector<int> sigma) {
  if (sigma.empty()) throw InvalidArgument("permutation must contain block 0");
  if (sigma[0] != 0) throw InvalidArgument("block permutation must fix 0");
  std::vector<bool> seen(sigma.size(), false);
  for (int v : sigma) {
    if (v < 0 || static_cast<std::size_t>(v) >= sigma.size() || seen[static_cast<std::size_t>(v)]) {
      throw InvalidArgument("not a permutation of {0..w}");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
  return BlockPermutation(std::move(sigma));
}

BlockPermutation BlockPermutation::make(std::vector<int> sigma, const ProjectionFamily& fam) {
  BlockPermutation p = make(std::move(sigma));
  if (p.block_count() != fam.block_count()) {
    throw RankMismatch("permutation has " + std::to_string(p.block_count()) + " blocks, family has " +
                       std::to_string(fam.block_count()));
  }
  if (!p.rank_compatible(fam)) throw RankMismatch("permutation " + p.to_string() + " moves blocks of different rank");
  return p;
}

bool BlockPermutation::is_identity() const {
  for (std::size_t i = 0; i < sigma_.size(); ++i)
    if (sigma_[i] != static_cast<int>(i)) return false;
  return true;
}

BlockPermutation BlockPermutation::inverse() const {
  std::vector<int> inv(sigma_.size());
  for (std::size_t i = 0; i < sigma_.size(); ++i) inv[static_cast<std::size_t>(sigma_[i])] = static_cast<int>(i);
  return BlockPermutation(std::move(inv));
}

BlockPermutation BlockPermutation::compose(const BlockPermutation& other) const {
  if (other.sigma_.size() != sigma_.size()) throw InvalidArgument("composing permutations of different size");
  std::vector<int> out(sigma_.size());
  for (std::size_t i = 0; i < sigma_.size(); ++i)
    out[i] = sigma_[static_cast<std::size_t>(other.sigma_[i])];
  return BlockPermutation(std::move(out));
}

bool BlockPermutation::rank_compatible(const ProjectionFamily& fam) const {
  if (block_count() != fam.block_count()) return false;
  for (int i = 1; i <= block_count(); ++i) {
    if ((*this)(i) != i && fam.rank(i) != fam.rank((*this)(i))) return false;
  }
  return true;
}

std::string BlockPermutation::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < sigma_.size(); ++i) os << (i ? "," : "") << sigma_[i];
  os << ']';
  return os.str();
}

}  // namespace pinchlab
