#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pinchlab/block_permutation.hpp"
#include "pinchlab/linalg.hpp"
#include "pinchlab/norms.hpp"

namespace pinchlab {

/// Mutually orthogonal hermitian projections p_1..p_w on C^n, each stored as an
/// orthonormal column frame. Block labels are 1-based; label 0 denotes the
/// complement p_0 = 1 - sum p_i, which is derived and never stored.
class ProjectionFamily {
 public:
  /// Validates orthonormality of each frame and mutual orthogonality to `tol`.
  /// Throws NotOrthogonal or OverComplete.
  static ProjectionFamily make(Eigen::Index dim, std::vector<Matrix> frames,
                               double tol = kTolConstruct);
  /// Consecutive coordinate blocks e_1.. of the given sizes.
  static ProjectionFamily coordinate(Eigen::Index dim, std::span<const int> sizes);

  Eigen::Index dim() const { return dim_; }
  int block_count() const { return static_cast<int>(frames_.size()); }
  const std::vector<Matrix>& frames() const { return frames_; }
  /// Frame of block i in 1..w.
  const Matrix& frame(int i) const;
  Eigen::Index rank(int i) const;  // i in 0..w
  Eigen::Index p0_rank() const { return p0_rank_; }

  /// Orthonormal basis of R(p_0), computed on demand.
  Matrix complement_frame() const;
  /// frame(i) for i >= 1, complement_frame() for i = 0.
  Matrix block_frame(int i) const;
  Matrix projector(int i) const;
  /// Unitary [F_1 ... F_w F_0] adapted to the family.
  Matrix adapted_basis() const;
  /// Family with frames u F_i.
  ProjectionFamily conjugated(const UnitaryMatrix& u) const;

 private:
  ProjectionFamily(Eigen::Index dim, std::vector<Matrix> frames);
  Eigen::Index dim_ = 0;
  std::vector<Matrix> frames_;
  Eigen::Index p0_rank_ = 0;
};

/// family_new: validated family from column frames.
ProjectionFamily family_new(Eigen::Index dim, std::vector<Matrix> frames);

/// P(x) = sum_{i=1}^w p_i x p_i. The p_0 block is not included.
Matrix pinch(const ProjectionFamily& fam, const Matrix& x);

/// A linear map on n x n matrices given as an expression tree over left and
/// right multiplications, pinchings and linear combinations.
class SuperOperator {
 public:
  static SuperOperator identity(Eigen::Index n);
  static SuperOperator zero(Eigen::Index n);
  static SuperOperator left(Matrix a);
  static SuperOperator right(Matrix a);
  static SuperOperator pinch(const ProjectionFamily& fam);
  /// y -> sum_i l_i y r_i for two families of equal block ranks.
  static SuperOperator two_sided_pinch(const ProjectionFamily& left, const ProjectionFamily& right);

  Eigen::Index dim() const;

  SuperOperator operator+(const SuperOperator& o) const;
  SuperOperator operator-(const SuperOperator& o) const;
  SuperOperator operator*(Complex alpha) const;
  /// Composition: (this * o)(y) = this(o(y)).
  SuperOperator operator*(const SuperOperator& o) const;

  Matrix apply(const Matrix& y) const;
  /// Adjoint for the Frobenius inner product.
  SuperOperator adjoint() const;
  /// n^2 x n^2 matrix acting on column-major vec(y).
  Matrix matricize() const;
  /// Projection families referenced by pinching nodes (left and right sides).
  std::vector<ProjectionFamily> families() const;

  struct Node;

 private:
  explicit SuperOperator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Matrix super_apply(const SuperOperator& s, const Matrix& y);

/// [L_z, P] = L_z P - P L_z, i.e. y -> sum_i (z p_i - p_i z) y p_i.
SuperOperator commutator_super(const Matrix& z, const ProjectionFamily& fam);

/// max over matrix units E_ab of ||S(E_ab) - T(E_ab)||_max.
double basis_discrepancy(const SuperOperator& s, const SuperOperator& t);

/// Exact induced norm on (M_n, ||.||_S2): largest singular value of the
/// matricization. Throws DimensionTooLarge past `max_dim`.
double super_norm_s2(const SuperOperator& s, Eigen::Index max_dim = 64);

struct NormEstimate {
  double lower = 0.0;
  Matrix witness;  // ||witness||_Phi = 1 and ||S(witness)||_Phi = lower
};

/// Certified lower bound for the induced norm sup ||S(y)||_Phi / ||y||_Phi.
/// Seeds rank-one inputs from the block frames of every pinching in S, the
/// block projections and their sums, then `budget` seeded power-iteration
/// restarts, followed by subgradient ascent on the ratio.
NormEstimate super_norm_estimate(const SuperOperator& s, const SymmetricNorm& norm, int budget,
                                 std::uint64_t seed);

/// A point L_u P L_{u*} of the unitary orbit, stored as the conjugated family
/// q_i = u p_i u*.
class OrbitPoint {
 public:
  static OrbitPoint at_base(const ProjectionFamily& base);
  static OrbitPoint from_unitary(const ProjectionFamily& base, const UnitaryMatrix& u);
  /// Point without a witness; ranks of the two families must agree blockwise.
  static OrbitPoint from_families(const ProjectionFamily& base, const ProjectionFamily& conjugated);

  const ProjectionFamily& base() const { return base_; }
  const ProjectionFamily& conjugated() const { return conjugated_; }
  const std::optional<UnitaryMatrix>& witness() const { return witness_; }
  Eigen::Index dim() const { return base_.dim(); }

  /// y -> sum_i q_i y p_i.
  SuperOperator as_super() const;

 private:
  OrbitPoint(ProjectionFamily base, ProjectionFamily conjugated, std::optional<UnitaryMatrix> witness)
      : base_(std::move(base)), conjugated_(std::move(conjugated)), witness_(std::move(witness)) {}
  ProjectionFamily base_;
  ProjectionFamily conjugated_;
  std::optional<UnitaryMatrix> witness_;

  friend OrbitPoint conjugate(const UnitaryMatrix& u, const OrbitPoint& point);
  friend OrbitPoint transport(const UnitaryMatrix& u, const OrbitPoint& point);
};

/// Left action: frames become u * (previous frames); the witness becomes u w.
OrbitPoint conjugate(const UnitaryMatrix& u, const OrbitPoint& point);

/// Moves base and point together: (u P u*, u Q u*). The orbit geometry is
/// invariant under this change of base point.
OrbitPoint transport(const UnitaryMatrix& u, const OrbitPoint& point);

/// Returns sigma with p_i = q_sigma(i) when the two pinchings agree as linear
/// maps, or nothing. Blocks are matched by principal angles (<= tol) and the
/// match is confirmed on the matrix basis.
std::optional<BlockPermutation> pinching_equal(const ProjectionFamily& a, const ProjectionFamily& b,
                                               double tol = 1e-8);

/// sin of the largest principal angle between two frames of equal rank.
double principal_angle_sin(const Matrix& frame_a, const Matrix& frame_b);

}  // namespace pinchlab
