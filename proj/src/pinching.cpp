#include "pinchlab/pinching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinchlab/random.hpp"

namespace pinchlab {

// ---------------------------------------------------------------------------
// ProjectionFamily

ProjectionFamily::ProjectionFamily(Eigen::Index dim, std::vector<Matrix> frames)
    : dim_(dim), frames_(std::move(frames)) {
  Eigen::Index total = 0;
  for (const auto& f : frames_) total += f.cols();
  p0_rank_ = dim_ - total;
}

ProjectionFamily ProjectionFamily::make(Eigen::Index dim, std::vector<Matrix> frames, double tol) {
  if (dim < 1) throw InvalidArgument("ambient dimension must be positive");
  Eigen::Index total = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Matrix& f = frames[i];
    if (f.rows() != dim) {
      throw DimensionMismatch("frame " + std::to_string(i + 1) + " has " + std::to_string(f.rows()) +
                              " rows, ambient dimension is " + std::to_string(dim));
    }
    if (f.cols() < 1) throw InvalidArgument("frame " + std::to_string(i + 1) + " is empty");
    if (!f.allFinite()) throw InvalidArgument("frame " + std::to_string(i + 1) + " has non-finite entries");
    total += f.cols();
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double self = max_abs(frames[i].adjoint() * frames[i] - identity(frames[i].cols()));
    if (self > tol) {
      throw NotOrthogonal("frame " + std::to_string(i + 1) + " is not orthonormal (defect " +
                          std::to_string(self) + ")");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double cross = max_abs(frames[i].adjoint() * frames[j]);
      if (cross > tol) {
        throw NotOrthogonal("frames " + std::to_string(j + 1) + " and " + std::to_string(i + 1) +
                            " overlap (defect " + std::to_string(cross) + ")");
      }
    }
  }
  if (total > dim) {
    throw OverComplete("ranks sum to " + std::to_string(total) + " > " + std::to_string(dim));
  }
  return ProjectionFamily(dim, std::move(frames));
}

ProjectionFamily ProjectionFamily::coordinate(Eigen::Index dim, std::span<const int> sizes) {
  std::vector<Matrix> frames;
  Eigen::Index offset = 0;
  for (int size : sizes) {
    if (size < 1) throw InvalidArgument("block sizes must be positive");
    if (offset + size > dim) throw OverComplete("block sizes exceed the ambient dimension");
    frames.push_back(identity(dim).middleCols(offset, size));
    offset += size;
  }
  return make(dim, std::move(frames));
}

ProjectionFamily family_new(Eigen::Index dim, std::vector<Matrix> frames) {
  return ProjectionFamily::make(dim, std::move(frames));
}

const Matrix& ProjectionFamily::frame(int i) const {
  if (i < 1 || i > block_count()) {
    throw IndexOutOfRange("block " + std::to_string(i) + " not in 1.." + std::to_string(block_count()));
  }
  return frames_[static_cast<std::size_t>(i - 1)];
}

Eigen::Index ProjectionFamily::rank(int i) const { return i == 0 ? p0_rank_ : frame(i).cols(); }

Matrix ProjectionFamily::complement_frame() const {
  const Eigen::Index used = dim_ - p0_rank_;
  if (used == 0) return identity(dim_);
  if (p0_rank_ == 0) return Matrix(dim_, 0);
  Matrix stacked(dim_, used);
  Eigen::Index col = 0;
  for (const auto& f : frames_) {
    stacked.middleCols(col, f.cols()) = f;
    col += f.cols();
  }
  Eigen::HouseholderQR<Matrix> qr(stacked);
  const Matrix q = qr.householderQ();
  return q.rightCols(p0_rank_);
}

Matrix ProjectionFamily::block_frame(int i) const { return i == 0 ? complement_frame() : frame(i); }

Matrix ProjectionFamily::projector(int i) const {
  if (i == 0) {
    Matrix p = identity(dim_);
    for (const auto& f : frames_) p -= f * f.adjoint();
    return p;
  }
  const Matrix& f = frame(i);
  return f * f.adjoint();
}

Matrix ProjectionFamily::adapted_basis() const {
  Matrix basis(dim_, dim_);
  Eigen::Index col = 0;
  for (const auto& f : frames_) {
    basis.middleCols(col, f.cols()) = f;
    col += f.cols();
  }
  if (p0_rank_ > 0) basis.rightCols(p0_rank_) = complement_frame();
  return basis;
}

ProjectionFamily ProjectionFamily::conjugated(const UnitaryMatrix& u) const {
  if (u.dim() != dim_) throw DimensionMismatch("unitary and family dimensions differ");
  std::vector<Matrix> frames;
  frames.reserve(frames_.size());
  for (const auto& f : frames_) frames.push_back(u.matrix() * f);
  return ProjectionFamily(dim_, std::move(frames));
}

Matrix pinch(const ProjectionFamily& fam, const Matrix& x) {
  require_square(x, "pinch input", fam.dim());
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& f : fam.frames()) out += f * (f.adjoint() * x * f) * f.adjoint();
  return out;
}

// ---------------------------------------------------------------------------
// SuperOperator

struct SuperOperator::Node {
  enum class Kind { Identity, Left, Right, TwoSidedPinch, Sum, Difference, Scale, Compose };
  Kind kind;
  Eigen::Index n = 0;
  Matrix a;
  std::optional<ProjectionFamily> left_family;
  std::optional<ProjectionFamily> right_family;
  Complex alpha{1.0, 0.0};
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const SuperOperator::Node>;
using Kind = SuperOperator::Node::Kind;

NodePtr make_node(SuperOperator::Node node) { return std::make_shared<const SuperOperator::Node>(std::move(node)); }

Matrix apply_node(const SuperOperator::Node& node, const Matrix& y) {
  switch (node.kind) {
    case Kind::Identity:
      return y;
    case Kind::Left:
      return node.a * y;
    case Kind::Right:
      return y * node.a;
    case Kind::TwoSidedPinch: {
      Matrix out = Matrix::Zero(y.rows(), y.cols());
      const auto& lf = node.left_family->frames();
      const auto& rf = node.right_family->frames();
      for (std::size_t i = 0; i < lf.size(); ++i) out += lf[i] * (lf[i].adjoint() * y * rf[i]) * rf[i].adjoint();
      return out;
    }
    case Kind::Sum:
      return apply_node(*node.lhs, y) + apply_node(*node.rhs, y);
    case Kind::Difference:
      return apply_node(*node.lhs, y) - apply_node(*node.rhs, y);
    case Kind::Scale:
      return node.alpha * apply_node(*node.lhs, y);
    case Kind::Compose:
      return apply_node(*node.lhs, apply_node(*node.rhs, y));
  }
  return y;
}

NodePtr adjoint_node(const NodePtr& node) {
  SuperOperator::Node out = *node;
  switch (node->kind) {
    case Kind::Identity:
    case Kind::TwoSidedPinch:
      return node;
    case Kind::Left:
    case Kind::Right:
      out.a = node->a.adjoint();
      return make_node(std::move(out));
    case Kind::Sum:
    case Kind::Difference:
      out.lhs = adjoint_node(node->lhs);
      out.rhs = adjoint_node(node->rhs);
      return make_node(std::move(out));
    case Kind::Scale:
      out.alpha = std::conj(node->alpha);
      out.lhs = adjoint_node(node->lhs);
      return make_node(std::move(out));
    case Kind::Compose:
      out.lhs = adjoint_node(node->rhs);
      out.rhs = adjoint_node(node->lhs);
      return make_node(std::move(out));
  }
  return node;
}

void collect_families(const NodePtr& node, std::vector<ProjectionFamily>& out) {
  if (!node) return;
  if (node->kind == Kind::TwoSidedPinch) {
    out.push_back(*node->left_family);
    out.push_back(*node->right_family);
  }
  collect_families(node->lhs, out);
  collect_families(node->rhs, out);
}

void require_same_dim(const SuperOperator& a, const SuperOperator& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("superoperators act on " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()) + " dimensional matrices");
  }
}

}  // namespace

SuperOperator SuperOperator::identity(Eigen::Index n) {
  return SuperOperator(make_node({Kind::Identity, n, {}, {}, {}, {}, {}, {}}));
}

SuperOperator SuperOperator::zero(Eigen::Index n) { return identity(n) * Complex(0.0); }

SuperOperator SuperOperator::left(Matrix a) {
  require_square(a, "left multiplier");
  const Eigen::Index n = a.rows();
  return SuperOperator(make_node({Kind::Left, n, std::move(a), {}, {}, {}, {}, {}}));
}

SuperOperator SuperOperator::right(Matrix a) {
  require_square(a, "right multiplier");
  const Eigen::Index n = a.rows();
  return SuperOperator(make_node({Kind::Right, n, std::move(a), {}, {}, {}, {}, {}}));
}

SuperOperator SuperOperator::pinch(const ProjectionFamily& fam) { return two_sided_pinch(fam, fam); }

SuperOperator SuperOperator::two_sided_pinch(const ProjectionFamily& left, const ProjectionFamily& right) {
  if (left.dim() != right.dim()) throw DimensionMismatch("families of different ambient dimension");
  if (left.block_count() != right.block_count()) throw DimensionMismatch("families with different block counts");
  for (int i = 1; i <= left.block_count(); ++i) {
    if (left.rank(i) != right.rank(i)) throw RankMismatch("block " + std::to_string(i) + " ranks differ");
  }
  Node node{Kind::TwoSidedPinch, left.dim(), {}, left, right, {}, {}, {}};
  return SuperOperator(make_node(std::move(node)));
}

Eigen::Index SuperOperator::dim() const { return node_->n; }

SuperOperator SuperOperator::operator+(const SuperOperator& o) const {
  require_same_dim(*this, o);
  return SuperOperator(make_node({Kind::Sum, dim(), {}, {}, {}, {}, node_, o.node_}));
}

SuperOperator SuperOperator::operator-(const SuperOperator& o) const {
  require_same_dim(*this, o);
  return SuperOperator(make_node({Kind::Difference, dim(), {}, {}, {}, {}, node_, o.node_}));
}

SuperOperator SuperOperator::operator*(Complex alpha) const {
  return SuperOperator(make_node({Kind::Scale, dim(), {}, {}, {}, alpha, node_, {}}));
}

SuperOperator SuperOperator::operator*(const SuperOperator& o) const {
  require_same_dim(*this, o);
  return SuperOperator(make_node({Kind::Compose, dim(), {}, {}, {}, {}, node_, o.node_}));
}

Matrix SuperOperator::apply(const Matrix& y) const {
  require_square(y, "superoperator input", dim());
  return apply_node(*node_, y);
}

SuperOperator SuperOperator::adjoint() const { return SuperOperator(adjoint_node(node_)); }

Matrix SuperOperator::matricize() const {
  const Eigen::Index n = dim();
  Matrix m(n * n, n * n);
  Matrix unit = Matrix::Zero(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      unit(a, b) = 1.0;
      const Matrix image = apply_node(*node_, unit);
      m.col(a + b * n) = image.reshaped();
      unit(a, b) = 0.0;
    }
  }
  return m;
}

std::vector<ProjectionFamily> SuperOperator::families() const {
  std::vector<ProjectionFamily> out;
  collect_families(node_, out);
  return out;
}

Matrix super_apply(const SuperOperator& s, const Matrix& y) { return s.apply(y); }

SuperOperator commutator_super(const Matrix& z, const ProjectionFamily& fam) {
  require_square(z, "commutator generator", fam.dim());
  const SuperOperator p = SuperOperator::pinch(fam);
  const SuperOperator lz = SuperOperator::left(z);
  return lz * p - p * lz;
}

double basis_discrepancy(const SuperOperator& s, const SuperOperator& t) {
  require_same_dim(s, t);
  const Eigen::Index n = s.dim();
  double worst = 0.0;
  Matrix unit = Matrix::Zero(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      unit(a, b) = 1.0;
      worst = std::max(worst, max_abs(s.apply(unit) - t.apply(unit)));
      unit(a, b) = 0.0;
    }
  }
  return worst;
}

double super_norm_s2(const SuperOperator& s, Eigen::Index max_dim) {
  if (s.dim() > max_dim) {
    throw DimensionTooLarge("matricization needs n <= " + std::to_string(max_dim) + ", got " +
                            std::to_string(s.dim()));
  }
  const Matrix m = s.matricize();
  const Matrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gram + gram.adjoint()), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

// ---------------------------------------------------------------------------
// Norm estimation

namespace {

class RatioSearch {
 public:
  RatioSearch(const SuperOperator& s, const SymmetricNorm& norm) : s_(s), norm_(norm) {}

  double consider(const Matrix& y) {
    const double denom = ideal_norm(norm_, y);
    if (!(denom > 0.0) || !std::isfinite(denom)) return 0.0;
    const double ratio = ideal_norm(norm_, s_.apply(y)) / denom;
    if (ratio > best_) {
      best_ = ratio;
      best_y_ = y / denom;
    }
    return ratio;
  }

  double best() const { return best_; }
  const Matrix& best_input() const { return best_y_; }

 private:
  const SuperOperator& s_;
  const SymmetricNorm& norm_;
  double best_ = -1.0;
  Matrix best_y_;
};

Matrix outer(const Vector& xi, const Vector& eta) { return xi * eta.adjoint(); }

// Best xi for fixed eta under the Frobenius objective ||S(xi eta*)||_F.
Vector best_left_factor(const SuperOperator& s, const Vector& eta) {
  const Eigen::Index n = s.dim();
  Matrix m(n * n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Vector e = Vector::Zero(n);
    e(k) = 1.0;
    m.col(k) = s.apply(outer(e, eta)).reshaped();
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
  return svd.matrixV().col(0);
}

// Best eta for fixed xi; S(xi eta*) is linear in conj(eta).
Vector best_right_factor(const SuperOperator& s, const Vector& xi) {
  const Eigen::Index n = s.dim();
  Matrix m(n * n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Vector e = Vector::Zero(n);
    e(k) = 1.0;
    m.col(k) = s.apply(outer(xi, e)).reshaped();
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
  return svd.matrixV().col(0).conjugate();
}

struct RankOne {
  double frobenius_ratio;
  Vector xi;
  Vector eta;
};

double frobenius_ratio(const SuperOperator& s, const Matrix& y) {
  const double d = y.norm();
  return d > 0.0 ? s.apply(y).norm() / d : 0.0;
}

}  // namespace

NormEstimate super_norm_estimate(const SuperOperator& s, const SymmetricNorm& norm, int budget,
                                 std::uint64_t seed) {
  if (budget < 1) throw InvalidArgument("budget must be >= 1");
  const Eigen::Index n = s.dim();
  RatioSearch search(s, norm);
  const SuperOperator s_adj = s.adjoint();

  std::vector<ProjectionFamily> fams = s.families();
  std::vector<Matrix> bases;
  for (const auto& f : fams) bases.push_back(f.adapted_basis());
  bases.push_back(identity(n));

  // Block projections, their partial sums and the identity. The sum over the
  // non-complement blocks is the witness for the compact-case estimate.
  search.consider(identity(n));
  for (const auto& f : fams) {
    Matrix partial = Matrix::Zero(n, n);
    for (int i = 1; i <= f.block_count(); ++i) {
      const Matrix p = f.projector(i);
      partial += p;
      search.consider(p);
      search.consider(partial);
    }
    if (f.p0_rank() > 0) search.consider(f.projector(0));
  }

  // Rank-one inputs xi eta* with one factor drawn from a block frame and the
  // other chosen optimally; for commutators with a pinching these realize
  // ||p_i x p_j|| exactly.
  std::vector<RankOne> rank_ones;
  for (const auto& basis : bases) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const Vector b = basis.col(c);
      const Vector xi = best_left_factor(s, b);
      const Matrix y1 = outer(xi, b);
      search.consider(y1);
      rank_ones.push_back({frobenius_ratio(s, y1), xi, b});
      const Vector eta = best_right_factor(s, b);
      const Matrix y2 = outer(b, eta);
      search.consider(y2);
      rank_ones.push_back({frobenius_ratio(s, y2), b, eta});
    }
  }
  std::sort(rank_ones.begin(), rank_ones.end(),
            [](const RankOne& a, const RankOne& b) { return a.frobenius_ratio > b.frobenius_ratio; });
  const std::size_t refine = std::min<std::size_t>(rank_ones.size(), 4);
  for (std::size_t r = 0; r < refine; ++r) {
    Vector xi = rank_ones[r].xi;
    Vector eta = rank_ones[r].eta;
    for (int round = 0; round < 6; ++round) {
      xi = best_left_factor(s, eta);
      eta = best_right_factor(s, xi);
      search.consider(outer(xi, eta));
    }
  }

  // Power iteration on S*S from seeded random starts.
  Rng rng(seed);
  for (int restart = 0; restart < budget; ++restart) {
    Matrix y = rng.gaussian(n, n);
    y /= y.norm();
    const int max_iter = restart == 0 ? 400 : 40;
    double previous = -1.0;
    for (int it = 0; it < max_iter; ++it) {
      Matrix next = s_adj.apply(s.apply(y));
      const double nn = next.norm();
      if (!(nn > 0.0)) break;
      y = next / nn;
      search.consider(y);
      const double current = frobenius_ratio(s, y);
      if (it % 10 == 0) {
        Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
        search.consider(outer(svd.matrixU().col(0), svd.matrixV().col(0)));
      }
      if (std::abs(current - previous) <= 1e-15 * current) break;
      previous = current;
    }
  }

  // Subgradient ascent on the ratio from the best point found so far.
  if (!norm.is_schatten2() && search.best() > 0.0) {
    Matrix y = search.best_input();
    for (int it = 0; it < 40; ++it) {
      const double dy = ideal_norm(norm, y);
      const Matrix sy = s.apply(y);
      const double ratio = ideal_norm(norm, sy) / dy;
      const Matrix grad = (s_adj.apply(ideal_norm_subgradient(norm, sy)) - ratio * ideal_norm_subgradient(norm, y)) / dy;
      const double gn = grad.norm();
      if (!(gn > 1e-14)) break;
      bool improved = false;
      double step = y.norm() / gn;
      for (int halving = 0; halving < 14 && !improved; ++halving, step *= 0.5) {
        const Matrix candidate = y + step * grad;
        if (search.consider(candidate) > ratio * (1.0 + 1e-13)) {
          y = candidate;
          improved = true;
        }
      }
      if (!improved) break;
    }
  }

  NormEstimate out;
  out.witness = search.best_input();
  const double wn = ideal_norm(norm, out.witness);
  out.witness /= wn;
  out.lower = ideal_norm(norm, s.apply(out.witness));
  return out;
}

// ---------------------------------------------------------------------------
// OrbitPoint

OrbitPoint OrbitPoint::at_base(const ProjectionFamily& base) { return OrbitPoint(base, base, UnitaryMatrix::identity(base.dim())); }

OrbitPoint OrbitPoint::from_unitary(const ProjectionFamily& base, const UnitaryMatrix& u) {
  return OrbitPoint(base, base.conjugated(u), u);
}

OrbitPoint OrbitPoint::from_families(const ProjectionFamily& base, const ProjectionFamily& conjugated) {
  if (base.dim() != conjugated.dim()) throw DimensionMismatch("families of different ambient dimension");
  if (base.block_count() != conjugated.block_count()) throw RankMismatch("families with different block counts");
  for (int i = 1; i <= base.block_count(); ++i) {
    if (base.rank(i) != conjugated.rank(i)) throw RankMismatch("block " + std::to_string(i) + " ranks differ");
  }
  return OrbitPoint(base, conjugated, std::nullopt);
}

SuperOperator OrbitPoint::as_super() const { return SuperOperator::two_sided_pinch(conjugated_, base_); }

OrbitPoint conjugate(const UnitaryMatrix& u, const OrbitPoint& point) {
  if (u.dim() != point.dim()) throw DimensionMismatch("unitary and orbit point dimensions differ");
  std::optional<UnitaryMatrix> witness;
  if (point.witness_) witness = u * *point.witness_;
  return OrbitPoint(point.base_, point.conjugated_.conjugated(u), std::move(witness));
}

OrbitPoint transport(const UnitaryMatrix& u, const OrbitPoint& point) {
  if (u.dim() != point.dim()) throw DimensionMismatch("unitary and orbit point dimensions differ");
  std::optional<UnitaryMatrix> witness;
  if (point.witness_) witness = u * *point.witness_ * u.adjoint();
  return OrbitPoint(point.base_.conjugated(u), point.conjugated_.conjugated(u), std::move(witness));
}

// ---------------------------------------------------------------------------
// Pinching equality

double principal_angle_sin(const Matrix& frame_a, const Matrix& frame_b) {
  if (frame_a.rows() != frame_b.rows() || frame_a.cols() != frame_b.cols()) {
    throw DimensionMismatch("principal angles need frames of equal shape");
  }
  return op_norm(frame_a - frame_b * (frame_b.adjoint() * frame_a));
}

std::optional<BlockPermutation> pinching_equal(const ProjectionFamily& a, const ProjectionFamily& b, double tol) {
  if (a.dim() != b.dim()) throw DimensionMismatch("families of different ambient dimension");
  const int w = a.block_count();
  if (w != b.block_count()) return std::nullopt;
  std::vector<int> sigma(static_cast<std::size_t>(w) + 1, 0);
  std::vector<bool> used(static_cast<std::size_t>(w) + 1, false);
  for (int i = 1; i <= w; ++i) {
    int match = -1;
    for (int j = 1; j <= w && match < 0; ++j) {
      if (used[static_cast<std::size_t>(j)] || a.rank(i) != b.rank(j)) continue;
      if (principal_angle_sin(a.frame(i), b.frame(j)) <= tol) match = j;
    }
    if (match < 0) return std::nullopt;
    used[static_cast<std::size_t>(match)] = true;
    sigma[static_cast<std::size_t>(i)] = match;
  }
  if (basis_discrepancy(SuperOperator::pinch(a), SuperOperator::pinch(b)) > 10.0 * tol) return std::nullopt;
  return BlockPermutation::make(std::move(sigma));
}

}  // namespace pinchlab
