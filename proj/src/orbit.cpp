#include "pinchlab/orbit.hpp"

#include <string>

#include "pinchlab/errors.hpp"

namespace pinchlab {
namespace {

void require_dim(const ProjectionFamily& fam, Eigen::Index n, const char* what) {
  if (fam.dim() != n) {
    throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(n) + ", family has " +
                            std::to_string(fam.dim()));
  }
}

void require_same_base(const ProjectionFamily& fam, const OrbitPoint& q) {
  require_dim(fam, q.dim(), "orbit point");
  if (fam.block_count() != q.base().block_count()) throw RankMismatch("orbit point has a different block count");
}

// sum over positions a >= first of (p_order[0] + ... + p_order[a-1]) S(p_order[a]).
Matrix strict_upper_part(const ProjectionFamily& fam, const SuperOperator& s, const std::vector<int>& order,
                         std::size_t first) {
  const Eigen::Index n = fam.dim();
  std::vector<Matrix> proj(static_cast<std::size_t>(fam.block_count()) + 1);
  for (int i = 0; i <= fam.block_count(); ++i) proj[static_cast<std::size_t>(i)] = fam.projector(i);
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t a = first; a < order.size(); ++a) {
    const int i = order[a];
    if (i == 0) continue;
    const Matrix image = s.apply(proj[static_cast<std::size_t>(i)]);
    Matrix earlier = Matrix::Zero(n, n);
    for (std::size_t b = 0; b < a; ++b) earlier += proj[static_cast<std::size_t>(order[b])];
    w += earlier * image;
  }
  return w;
}

}  // namespace

bool in_isotropy_G(const ProjectionFamily& fam, const UnitaryMatrix& u, double tol) {
  require_dim(fam, u.dim(), "unitary");
  Matrix diag = Matrix::Zero(u.dim(), u.dim());
  for (int i = 0; i <= fam.block_count(); ++i) {
    const Matrix p = fam.projector(i);
    diag += p * u.matrix() * p;
  }
  return op_norm(u.matrix() - diag) <= tol;
}

std::optional<BlockPermutation> in_isotropy_H(const ProjectionFamily& fam, const UnitaryMatrix& u, double tol) {
  require_dim(fam, u.dim(), "unitary");
  return pinching_equal(fam.conjugated(u), fam, tol);
}

TangentVector make_tangent(const SkewHermitian& z, const OrbitPoint& at) {
  if (z.dim() != at.dim()) throw DimensionMismatch("generator and orbit point dimensions differ");
  const SuperOperator q = at.as_super();
  const SuperOperator lz = SuperOperator::left(z.matrix());
  return TangentVector{z, at, lz * q - q * lz};
}

TangentVariant default_variant(const ProjectionFamily& fam) {
  if (fam.p0_rank() > 0 || fam.block_count() == 0) return DistinguishedP0{};
  return DistinguishedBlock{1, fam.frame(1).col(0)};
}

SkewHermitian tangent_generator(const ProjectionFamily& fam, const SuperOperator& s, const TangentVariant& variant) {
  if (s.dim() != fam.dim()) throw DimensionMismatch("superoperator and family dimensions differ");
  const int w = fam.block_count();
  if (std::holds_alternative<DistinguishedP0>(variant)) {
    std::vector<int> order;
    for (int i = 0; i <= w; ++i) order.push_back(i);
    return SkewHermitian::skew_part(2.0 * strict_upper_part(fam, s, order, 1));
  }
  const auto& v = std::get<DistinguishedBlock>(variant);
  if (v.i0 < 1 || v.i0 > w) throw BadVariant("distinguished block " + std::to_string(v.i0) + " not in 1.." + std::to_string(w));
  if (v.xi.size() != fam.dim()) throw BadVariant("xi has the wrong length");
  if (std::abs(v.xi.norm() - 1.0) > 1e-10) throw BadVariant("xi is not a unit vector");
  const Matrix& f = fam.frame(v.i0);
  if ((v.xi - f * (f.adjoint() * v.xi)).norm() > 1e-10) {
    throw BadVariant("xi is not in the range of block " + std::to_string(v.i0));
  }
  std::vector<int> order{0, v.i0};
  for (int i = 1; i <= w; ++i)
    if (i != v.i0) order.push_back(i);
  Matrix wm = strict_upper_part(fam, s, order, 2);
  const Matrix eta = fam.complement_frame();
  for (Eigen::Index k = 0; k < eta.cols(); ++k) {
    const Vector e = eta.col(k);
    wm -= s.apply(e * v.xi.adjoint()) * v.xi * e.adjoint();
  }
  return SkewHermitian::skew_part(2.0 * wm);
}

TangentVector tangent_project(const ProjectionFamily& fam, const SuperOperator& s, const TangentVariant& variant) {
  const SkewHermitian z = tangent_generator(fam, s, variant);
  return TangentVector{z, OrbitPoint::at_base(fam), commutator_super(z.matrix(), fam)};
}

Matrix f_map(const ProjectionFamily& fam, int i, const OrbitPoint& q) {
  require_same_base(fam, q);
  if (i < 0 || i > fam.block_count()) {
    throw IndexOutOfRange("block " + std::to_string(i) + " not in 0.." + std::to_string(fam.block_count()));
  }
  return q.conjugated().projector(i);
}

Matrix section_factor(const ProjectionFamily& fam, const OrbitPoint& q) {
  require_same_base(fam, q);
  Matrix s = Matrix::Zero(fam.dim(), fam.dim());
  for (int i = 0; i <= fam.block_count(); ++i) s += q.conjugated().projector(i) * fam.projector(i);
  return s;
}

UnitaryMatrix cross_section(const ProjectionFamily& fam, const OrbitPoint& q, double tol_singular) {
  return polar(section_factor(fam, q), tol_singular).unitary;
}

BlockBases default_bases(const ProjectionFamily& fam) {
  BlockBases out;
  out.push_back(fam.complement_frame());
  for (const auto& f : fam.frames()) out.push_back(f);
  return out;
}

UnitaryMatrix permutation_operator(const ProjectionFamily& fam, const BlockPermutation& sigma, const BlockBases& bases) {
  const int w = fam.block_count();
  if (sigma.block_count() != w) throw RankMismatch("permutation block count differs from the family");
  if (!sigma.rank_compatible(fam)) throw RankMismatch("permutation " + sigma.to_string() + " is not rank compatible");
  if (static_cast<int>(bases.size()) != w + 1) throw InvalidArgument("expected one basis per block including block 0");
  for (int i = 0; i <= w; ++i) {
    const Matrix& b = bases[static_cast<std::size_t>(i)];
    if (b.rows() != fam.dim() || b.cols() != fam.rank(i)) {
      throw RankMismatch("basis of block " + std::to_string(i) + " has the wrong shape");
    }
    if (b.cols() == 0) continue;
    if (max_abs(b.adjoint() * b - identity(b.cols())) > 1e-10 || max_abs(fam.projector(i) * b - b) > 1e-10) {
      throw NotOrthogonal("basis of block " + std::to_string(i) + " is not an orthonormal basis of its range");
    }
  }
  Matrix r = Matrix::Zero(fam.dim(), fam.dim());
  for (int i = 0; i <= w; ++i) {
    const Matrix& b = bases[static_cast<std::size_t>(i)];
    if (b.cols() == 0) continue;
    r += bases[static_cast<std::size_t>(sigma(i))] * b.adjoint();
  }
  return UnitaryMatrix(r, 1e-10);
}

UnitaryMatrix permutation_operator(const ProjectionFamily& fam, const BlockPermutation& sigma) {
  return permutation_operator(fam, sigma, default_bases(fam));
}

std::size_t fiber_size(const ProjectionFamily& fam, std::size_t cap) {
  std::vector<std::size_t> multiplicity;
  std::vector<Eigen::Index> ranks;
  for (int i = 1; i <= fam.block_count(); ++i) {
    bool found = false;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      if (ranks[k] == fam.rank(i)) {
        ++multiplicity[k];
        found = true;
      }
    }
    if (!found) {
      ranks.push_back(fam.rank(i));
      multiplicity.push_back(1);
    }
  }
  std::size_t total = 1;
  for (std::size_t m : multiplicity) {
    for (std::size_t f = 2; f <= m; ++f) {
      total *= f;
      if (total > cap) return cap + 1;
    }
  }
  return total;
}

std::vector<BlockPermutation> rank_compatible_permutations(const ProjectionFamily& fam, std::size_t cap) {
  const std::size_t count = fiber_size(fam, cap);
  if (count > cap) throw FiberTooLarge("more than " + std::to_string(cap) + " rank-compatible permutations");
  const int w = fam.block_count();
  std::vector<BlockPermutation> out;
  out.reserve(count);
  std::vector<int> sigma(static_cast<std::size_t>(w) + 1, 0);
  std::vector<bool> used(static_cast<std::size_t>(w) + 1, false);
  auto recurse = [&](auto&& self, int i) -> void {
    if (i > w) {
      out.push_back(BlockPermutation::make(sigma));
      return;
    }
    for (int j = 1; j <= w; ++j) {
      if (used[static_cast<std::size_t>(j)] || fam.rank(j) != fam.rank(i)) continue;
      used[static_cast<std::size_t>(j)] = true;
      sigma[static_cast<std::size_t>(i)] = j;
      self(self, i + 1);
      used[static_cast<std::size_t>(j)] = false;
    }
  };
  recurse(recurse, 1);
  return out;
}

OrbitPoint act(const BlockPermutation& sigma, const OrbitPoint& q, const BlockBases& bases) {
  const ProjectionFamily& base = q.base();
  if (q.witness()) {
    return OrbitPoint::from_unitary(base, *q.witness() * permutation_operator(base, sigma, bases));
  }
  if (!sigma.rank_compatible(base)) throw RankMismatch("permutation " + sigma.to_string() + " is not rank compatible");
  std::vector<Matrix> frames;
  for (int i = 1; i <= base.block_count(); ++i) frames.push_back(q.conjugated().frame(sigma(i)));
  return OrbitPoint::from_families(base, ProjectionFamily::make(base.dim(), std::move(frames), 1e-9));
}

std::vector<OrbitPoint> fiber(const ProjectionFamily& fam, const OrbitPoint& q, const BlockBases& bases,
                              std::size_t cap) {
  require_same_base(fam, q);
  std::vector<OrbitPoint> out;
  for (const auto& sigma : rank_compatible_permutations(fam, cap)) out.push_back(act(sigma, q, bases));
  return out;
}

std::vector<OrbitPoint> fiber(const ProjectionFamily& fam, const OrbitPoint& q, std::size_t cap) {
  return fiber(fam, q, default_bases(fam), cap);
}

}  // namespace pinchlab
