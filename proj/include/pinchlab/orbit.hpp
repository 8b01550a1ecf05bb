#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "pinchlab/block_permutation.hpp"
#include "pinchlab/pinching.hpp"

namespace pinchlab {

/// Default principal-angle tolerance for matching conjugated projections.
inline constexpr double kTolProjectionMatch = 1e-8;
/// Default cap on the number of enumerated fiber points.
inline constexpr std::size_t kFiberCap = 10000;

/// True iff ||u - sum_{i=0}^w p_i u p_i||_op <= tol, i.e. u commutes with every p_i.
bool in_isotropy_G(const ProjectionFamily& fam, const UnitaryMatrix& u, double tol = 1e-9);

/// sigma with u p_i u* = p_sigma(i) for all i, if the conjugated family is a
/// relabelling of the original one.
std::optional<BlockPermutation> in_isotropy_H(const ProjectionFamily& fam, const UnitaryMatrix& u,
                                              double tol = kTolProjectionMatch);

/// Tangent vector L_z Q - Q L_z at an orbit point.
struct TangentVector {
  SkewHermitian generator;
  OrbitPoint at;
  SuperOperator as_super;
};

TangentVector make_tangent(const SkewHermitian& z, const OrbitPoint& at);

/// Treat p_0 as the distinguished block.
struct DistinguishedP0 {};
/// Treat block i0 >= 1 as distinguished, with a unit vector xi in its range.
struct DistinguishedBlock {
  int i0 = 1;
  Vector xi;
};
using TangentVariant = std::variant<DistinguishedP0, DistinguishedBlock>;

/// DistinguishedP0 when p_0 != 0, otherwise block 1 with its first frame column.
TangentVariant default_variant(const ProjectionFamily& fam);

/// The generator zhat(S); equals z - sum_{i=0}^w p_i z p_i when S = [L_z, P].
SkewHermitian tangent_generator(const ProjectionFamily& fam, const SuperOperator& s,
                                const TangentVariant& variant);

/// E(S) = [L_zhat(S), P] at the base point. Throws BadVariant when xi is not a
/// unit vector of R(p_i0).
TangentVector tangent_project(const ProjectionFamily& fam, const SuperOperator& s,
                              const TangentVariant& variant);

/// q_i = u p_i u* for i in 0..w.
Matrix f_map(const ProjectionFamily& fam, int i, const OrbitPoint& q);

/// s(Q) = sum_{i=0}^w q_i p_i.
Matrix section_factor(const ProjectionFamily& fam, const OrbitPoint& q);

/// Polar factor s |s|^{-1}; conjugating P by it gives Q. Throws SingularFactor.
UnitaryMatrix cross_section(const ProjectionFamily& fam, const OrbitPoint& q,
                            double tol_singular = kTolSingular);

/// Orthonormal bases per block, index 0 for R(p_0) then blocks 1..w.
using BlockBases = std::vector<Matrix>;

/// complement_frame() followed by the stored frames.
BlockBases default_bases(const ProjectionFamily& fam);

/// r_sigma = sum_i B_sigma(i) B_i*, so r_sigma p_i r_sigma* = p_sigma(i).
/// Throws RankMismatch, NotOrthogonal when a basis does not span its block.
UnitaryMatrix permutation_operator(const ProjectionFamily& fam, const BlockPermutation& sigma,
                                   const BlockBases& bases);
UnitaryMatrix permutation_operator(const ProjectionFamily& fam, const BlockPermutation& sigma);

/// Number of rank-preserving permutations fixing 0, saturating at cap + 1.
std::size_t fiber_size(const ProjectionFamily& fam, std::size_t cap = kFiberCap);

/// All rank-preserving permutations in lexicographic order. Throws FiberTooLarge.
std::vector<BlockPermutation> rank_compatible_permutations(const ProjectionFamily& fam,
                                                           std::size_t cap = kFiberCap);

/// sigma . Q: block i of the result is q_sigma(i); the witness becomes u r_sigma.
OrbitPoint act(const BlockPermutation& sigma, const OrbitPoint& q, const BlockBases& bases);

/// {sigma . Q} over rank-compatible sigma, sorted by sigma. Throws FiberTooLarge.
std::vector<OrbitPoint> fiber(const ProjectionFamily& fam, const OrbitPoint& q, const BlockBases& bases,
                              std::size_t cap = kFiberCap);
std::vector<OrbitPoint> fiber(const ProjectionFamily& fam, const OrbitPoint& q, std::size_t cap = kFiberCap);

}  // namespace pinchlab
