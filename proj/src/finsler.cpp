#include "pinchlab/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>

#include "pinchlab/errors.hpp"
#include "pinchlab/random.hpp"

namespace pinchlab {

// ---------------------------------------------------------------------------
// PiecewiseExpCurve

PiecewiseExpCurve::PiecewiseExpCurve(UnitaryMatrix base, std::vector<Segment> segments)
    : base_(std::move(base)), segments_(std::move(segments)) {
  if (segments_.empty()) throw InvalidArgument("curve needs at least one segment");
  double total = 0.0;
  for (const auto& s : segments_) {
    if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw InvalidArgument("segment durations must be positive");
    if (s.generator.dim() != base_.dim()) throw DimensionMismatch("segment generator has the wrong dimension");
    total += s.dt;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("durations sum to " + std::to_string(total) + ", not 1");
  knots_.reserve(segments_.size() + 1);
  knots_.push_back(base_);
  for (const auto& s : segments_) knots_.push_back(expm_skew(s.generator * s.dt) * knots_.back());
}

PiecewiseExpCurve PiecewiseExpCurve::single(const SkewHermitian& z) {
  return PiecewiseExpCurve(UnitaryMatrix::identity(z.dim()), {{1.0, z}});
}

UnitaryMatrix PiecewiseExpCurve::at(double t) const {
  if (t <= 0.0) return base_;
  double start = 0.0;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const double end = start + segments_[k].dt;
    if (t < end || k + 1 == segments_.size()) {
      const double s = std::min(t, end) - start;
      return expm_skew(segments_[k].generator * s) * knots_[k];
    }
    start = end;
  }
  return knots_.back();
}

// ---------------------------------------------------------------------------
// Quotient norm

namespace {

// Offsets of the blocks of the adapted basis [F_1 .. F_w F_0].
std::vector<std::pair<Eigen::Index, Eigen::Index>> block_ranges(const ProjectionFamily& fam) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index offset = 0;
  for (int i = 1; i <= fam.block_count(); ++i) {
    out.emplace_back(offset, fam.rank(i));
    offset += fam.rank(i);
  }
  if (fam.p0_rank() > 0) out.emplace_back(offset, fam.p0_rank());
  return out;
}

Matrix block_diagonal_part(const Matrix& m, const std::vector<std::pair<Eigen::Index, Eigen::Index>>& ranges) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (const auto& [o, r] : ranges) out.block(o, o, r, r) = m.block(o, o, r, r);
  return out;
}

// Projection of a nonnegative nonincreasing v onto the unit ball of the dual
// gauge of a polyhedral norm; empty when the norm has no closed form.
std::optional<std::vector<double>> dual_ball_projection(const SymmetricNorm& norm, const RealVector& v) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<double> x(n);
  if (norm.is_operator()) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += v[static_cast<Eigen::Index>(i)];
    if (total <= 1.0) {
      for (std::size_t i = 0; i < n; ++i) x[i] = v[static_cast<Eigen::Index>(i)];
      return x;
    }
    double prefix = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      prefix += v[static_cast<Eigen::Index>(j)];
      const double t = (prefix - 1.0) / static_cast<double>(j + 1);
      if (v[static_cast<Eigen::Index>(j)] - t > 0.0) theta = t;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = std::max(v[static_cast<Eigen::Index>(i)] - theta, 0.0);
    return x;
  }
  if (const auto* sp = std::get_if<SymmetricNorm::SchattenP>(&norm.kind()); sp && sp->p == 1.0) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::min(v[static_cast<Eigen::Index>(i)], 1.0);
    return x;
  }
  if (const auto* kf = std::get_if<SymmetricNorm::KyFan>(&norm.kind())) {
    auto clipped_sum = [&](double theta) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::clamp(v[static_cast<Eigen::Index>(i)] - theta, 0.0, 1.0);
        total += x[i];
      }
      return total;
    };
    const double k = static_cast<double>(kf->k);
    if (clipped_sum(0.0) <= k) return x;
    double lo = 0.0;
    double hi = v.size() > 0 ? v[0] : 0.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (clipped_sum(mid) > k) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    clipped_sum(hi);
    return x;
  }
  return std::nullopt;
}

}  // namespace

QuotientNormResult quotient_norm(const ProjectionFamily& fam, const SkewHermitian& z, const SymmetricNorm& norm,
                                 const SolverConfig& cfg) {
  if (z.dim() != fam.dim()) throw DimensionMismatch("generator and family dimensions differ");
  const Matrix basis = fam.adapted_basis();
  const auto ranges = block_ranges(fam);
  const Matrix zt = basis.adjoint() * z.matrix() * basis;
  const Matrix diag = block_diagonal_part(zt, ranges);
  const Matrix off = zt - diag;

  auto result_from = [&](const Matrix& m, double value, int iterations, bool converged) {
    const Matrix yt = block_diagonal_part(m - zt, ranges);
    QuotientNormResult r;
    r.value = value;
    r.minimizer = SkewHermitian::skew_part(basis * yt * basis.adjoint());
    r.iterations = iterations;
    r.converged = converged;
    return r;
  };

  if (norm.is_schatten2()) return result_from(off, off.norm(), 0, true);

  const auto descend = [&](Matrix m) {
    double best = ideal_norm(norm, m);
    Matrix best_m = m;
    if (best == 0.0) return std::make_tuple(best_m, best, 0, true);
    const double alpha0 = 0.5 * m.norm();
    double window_start = best;
    int iterations = 0;
    bool converged = false;
    for (int k = 1; k <= cfg.max_iter; ++k) {
      iterations = k;
      const Matrix g = ideal_norm_subgradient(norm, m);
      const Matrix bd = block_diagonal_part(g, ranges);
      const Matrix d = 0.5 * (bd - bd.adjoint());
      const double dn = d.norm();
      if (dn < 1e-14) {
        converged = true;
        break;
      }
      m -= (alpha0 / k) * (d / dn);
      const double value = ideal_norm(norm, m);
      if (value < best) {
        best = value;
        best_m = m;
      }
      if (k % cfg.stall_window == 0) {
        if (window_start - best < cfg.stall_tol) {
          converged = true;
          break;
        }
        window_start = best;
      }
    }
    return std::make_tuple(best_m, best, iterations, converged);
  };

  // Gradient descent on the Moreau envelope with step mu and a decreasing mu
  // schedule; each step is nonexpansive so the result depends continuously on z.
  const bool polyhedral = dual_ball_projection(norm, RealVector::Zero(1)).has_value();
  const auto smoothed_descend = [&](Matrix m) {
    constexpr int kStages = 8;
    double best = ideal_norm(norm, m);
    Matrix best_m = m;
    if (best == 0.0) return std::make_tuple(best_m, best, 0, true);
    const int per_stage = std::max(1, cfg.max_iter / kStages);
    double mu = 0.1 * best;
    int iterations = 0;
    bool converged = false;
    for (int stage = 0; stage < kStages; ++stage, mu *= 0.1) {
      double window_start = best;
      for (int k = 1; k <= per_stage; ++k) {
        ++iterations;
        const Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0.0, -1.0) * m);
        const RealVector& lambda = es.eigenvalues();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(lambda.size()));
        for (Eigen::Index i = 0; i < lambda.size(); ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return std::abs(lambda(a)) > std::abs(lambda(b)); });
        RealVector s_sorted(lambda.size());
        for (std::size_t i = 0; i < order.size(); ++i) s_sorted(static_cast<Eigen::Index>(i)) = std::abs(lambda(order[i])) / mu;
        const double current = norm.eval_sorted(std::span<const double>(s_sorted.data(), order.size())) * mu;
        if (current < best) {
          best = current;
          best_m = m;
        }
        const std::vector<double> x = *dual_ball_projection(norm, s_sorted);
        Vector phase = Vector::Zero(lambda.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
          const Eigen::Index j = order[i];
          phase(j) = Complex(0.0, lambda(j) >= 0.0 ? x[i] : -x[i]);
        }
        const Matrix g = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
        const Matrix bd = block_diagonal_part(g, ranges);
        m -= mu * (0.5 * (bd - bd.adjoint()));
        if (stage == kStages - 1 && k % cfg.stall_window == 0) {
          converged = window_start - best < cfg.stall_tol;
          window_start = best;
        }
      }
    }
    const double last = ideal_norm(norm, m);
    if (last < best) {
      best = last;
      best_m = m;
    }
    return std::make_tuple(best_m, best, iterations, converged);
  };

  // Iterating on the residual m = z + y from the off-diagonal part keeps the
  // result independent of the block-diagonal part of z.
  auto [best_m, best, iterations, converged] = polyhedral ? smoothed_descend(off) : descend(off);
  if (best > ideal_norm(norm, zt)) {
    auto [m2, v2, it2, c2] = polyhedral ? smoothed_descend(zt) : descend(zt);
    iterations += it2;
    if (v2 < best) {
      best_m = m2;
      best = v2;
      converged = c2;
    }
  }
  return result_from(best_m, best, iterations, converged);
}

double curve_length_group(const PiecewiseExpCurve& curve, const SymmetricNorm& norm) {
  double total = 0.0;
  for (const auto& s : curve.segments()) total += s.dt * ideal_norm(norm, s.generator.matrix());
  return total;
}

OrbitLength curve_length_orbit(const ProjectionFamily& fam, const PiecewiseExpCurve& curve, const SymmetricNorm& norm,
                               const SolverConfig& cfg) {
  if (curve.dim() != fam.dim()) throw DimensionMismatch("curve and family dimensions differ");
  if (cfg.nodes < 1) throw InvalidArgument("quadrature needs at least one node");
  OrbitLength out;
  for (std::size_t k = 0; k < curve.segments().size(); ++k) {
    const auto& seg = curve.segments()[k];
    const double h = seg.dt / cfg.nodes;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int j = 0; j < cfg.nodes; ++j) {
      const double s = (j + 0.5) * h;
      const UnitaryMatrix g = expm_skew(seg.generator * s) * curve.knot(k);
      const SkewHermitian pulled = SkewHermitian::skew_part(g.matrix().adjoint() * seg.generator.matrix() * g.matrix());
      const QuotientNormResult q = quotient_norm(fam, pulled, norm, cfg);
      out.value += q.value * h;
      out.converged = out.converged && q.converged;
      lo = std::min(lo, q.value);
      hi = std::max(hi, q.value);
    }
    out.tol += (hi - lo) * seg.dt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lifting

PiecewiseExpCurve lift_curve(const ProjectionFamily& fam, const std::vector<LiftSample>& samples) {
  if (samples.empty()) throw InvalidArgument("lift needs at least one sample");
  const std::size_t n = samples.size();
  const double dt = 1.0 / static_cast<double>(n);
  std::vector<PiecewiseExpCurve::Segment> segments;
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].x.dim() != fam.dim()) throw DimensionMismatch("sample generator has the wrong dimension");
    if (std::abs(samples[i].t - static_cast<double>(i) * dt) > 1e-12) {
      throw InvalidArgument("sample times must form the uniform partition i/n");
    }
    if (!segments.empty() && segments.back().generator.matrix() == samples[i].x.matrix()) {
      segments.back().dt += dt;
    } else {
      segments.push_back({dt, samples[i].x});
    }
  }
  double total = 0.0;
  for (const auto& s : segments) total += s.dt;
  segments.back().dt += 1.0 - total;
  return PiecewiseExpCurve(UnitaryMatrix::identity(fam.dim()), std::move(segments));
}

SmoothTarget::SmoothTarget(SkewHermitian a, SkewHermitian b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.dim() != b_.dim()) throw DimensionMismatch("target generators differ in dimension");
}

SmoothTarget SmoothTarget::random(Eigen::Index n, double scale, std::uint64_t seed) {
  Rng rng(seed);
  const SkewHermitian a = rng.skew(n) * scale;
  const SkewHermitian b = rng.skew(n) * scale;
  return SmoothTarget(a, b);
}

UnitaryMatrix SmoothTarget::unitary(double t) const { return expm_skew(a_ * t) * expm_skew(b_ * (t * t)); }

SkewHermitian SmoothTarget::velocity(double t) const {
  const UnitaryMatrix e = expm_skew(a_ * t);
  return SkewHermitian::skew_part(a_.matrix() + 2.0 * t * e.matrix() * b_.matrix() * e.matrix().adjoint());
}

OrbitPoint SmoothTarget::orbit_point(const ProjectionFamily& fam, double t) const {
  return OrbitPoint::from_unitary(fam, unitary(t));
}

SuperOperator SmoothTarget::orbit_velocity(const ProjectionFamily& fam, double t) const {
  return make_tangent(velocity(t), orbit_point(fam, t)).as_super;
}

std::vector<LiftSample> lift_samples(const ProjectionFamily& fam, const SmoothTarget& target, int n,
                                     const SymmetricNorm& norm, const SolverConfig& cfg) {
  if (n < 1) throw InvalidArgument("partition size must be positive");
  std::vector<LiftSample> out;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Matrix u = target.unitary(t).matrix();
    const SkewHermitian v = target.velocity(t);
    const SkewHermitian pulled = SkewHermitian::skew_part(u.adjoint() * v.matrix() * u);
    const QuotientNormResult q = quotient_norm(fam, pulled, norm, cfg);
    out.push_back({t, SkewHermitian::skew_part(v.matrix() + u * q.minimizer.matrix() * u.adjoint())});
  }
  return out;
}

double orbit_gap_s2(const OrbitPoint& a, const OrbitPoint& b) {
  if (a.dim() != b.dim() || a.conjugated().block_count() != b.conjugated().block_count()) {
    throw DimensionMismatch("orbit points over different families");
  }
  double gap = 0.0;
  for (int i = 1; i <= a.conjugated().block_count(); ++i) {
    gap = std::max(gap, op_norm(a.conjugated().projector(i) - b.conjugated().projector(i)));
  }
  return gap;
}

namespace {

double target_speed(const ProjectionFamily& fam, const SmoothTarget& target, double t, const SymmetricNorm& norm,
                    const SolverConfig& cfg) {
  const Matrix u = target.unitary(t).matrix();
  return quotient_norm(fam, SkewHermitian::skew_part(u.adjoint() * target.velocity(t).matrix() * u), norm, cfg).value;
}

}  // namespace

std::vector<LiftRow> lift_experiment(const ProjectionFamily& fam, const SmoothTarget& target, const std::vector<int>& ns,
                                     const SymmetricNorm& norm, const SolverConfig& cfg, int fine_nodes) {
  double target_length = 0.0;
  for (int j = 0; j < fine_nodes; ++j) target_length += target_speed(fam, target, (j + 0.5) / fine_nodes, norm, cfg);
  target_length /= fine_nodes;

  const OrbitPoint end = target.orbit_point(fam, 1.0);
  std::vector<LiftRow> rows;
  for (int n : ns) {
    LiftRow row;
    row.n = n;
    row.target_length = target_length;
    const std::vector<LiftSample> samples = lift_samples(fam, target, n, norm, cfg);
    const PiecewiseExpCurve curve = lift_curve(fam, samples);
    row.group_length = curve_length_group(curve, norm);
    row.endpoint_gap = orbit_gap_s2(OrbitPoint::from_unitary(fam, curve.endpoint()), end);

    // Oscillation of the orbit velocity inside each interval, sampled at five points.
    constexpr int kProbe = 5;
    double osc = 0.0;
    double speed = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<SuperOperator> vel;
      for (int j = 0; j < kProbe; ++j) {
        const double t = (i + static_cast<double>(j) / (kProbe - 1)) / n;
        vel.push_back(target.orbit_velocity(fam, t));
        speed = std::max(speed, super_norm_s2(vel.back()));
      }
      for (int j = 0; j < kProbe; ++j)
        for (int k = 0; k < j; ++k) osc = std::max(osc, super_norm_s2(vel[static_cast<std::size_t>(j)] - vel[static_cast<std::size_t>(k)]));
    }
    double riemann = 0.0;
    for (const auto& s : samples) riemann += target_speed(fam, target, s.t, norm, cfg) / n;
    for (const auto& s : samples) speed = std::max(speed, op_norm(s.x.matrix()));
    row.epsilon = std::max(4.0 * 1.25 * osc, 2.0 * std::abs(target_length - riemann)) + 1e-12;
    row.speed_bound = speed;
    row.gap_bound = 2.0 * (2.0 * speed / n + row.epsilon / 4.0);
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope fit needs two or more points of equal count");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Distance bounds

namespace {

std::vector<Matrix> block_diagonal_skew_basis(const ProjectionFamily& fam) {
  std::vector<Matrix> out;
  const Complex I(0.0, 1.0);
  for (int i = 0; i <= fam.block_count(); ++i) {
    const Matrix f = fam.block_frame(i);
    const Eigen::Index r = f.cols();
    for (Eigen::Index a = 0; a < r; ++a) {
      out.push_back(I * f.col(a) * f.col(a).adjoint());
      for (Eigen::Index b = a + 1; b < r; ++b) {
        const Matrix ab = f.col(a) * f.col(b).adjoint();
        out.push_back(ab - ab.adjoint());
        out.push_back(I * (ab + ab.adjoint()));
      }
    }
  }
  return out;
}

class LogLengthSearch {
 public:
  LogLengthSearch(const UnitaryMatrix& u, std::vector<Matrix> basis, const SymmetricNorm& norm)
      : u_(u), basis_(std::move(basis)), norm_(norm) {}

  std::size_t size() const { return basis_.size(); }

  double eval(const RealVector& c, bool propagate) const {
    Matrix y = Matrix::Zero(u_.dim(), u_.dim());
    for (std::size_t k = 0; k < basis_.size(); ++k) y += c(static_cast<Eigen::Index>(k)) * basis_[k];
    try {
      const UnitaryMatrix g = u_ * expm_skew(SkewHermitian::skew_part(y));
      return ideal_norm(norm_, logm_unitary(g).matrix());
    } catch (const LogBranchFailure&) {
      if (propagate) throw;
      return std::numeric_limits<double>::infinity();
    }
  }

  // Compass search with halving steps; returns the best value and convergence.
  std::pair<double, bool> descend(RealVector c, double value, int max_sweeps) const {
    double step = 0.25;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      bool improved = false;
      for (Eigen::Index k = 0; k < c.size(); ++k) {
        for (double dir : {1.0, -1.0}) {
          RealVector trial = c;
          trial(k) += dir * step;
          const double v = eval(trial, false);
          if (v < value - 1e-15) {
            c = trial;
            value = v;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
        if (step < 1e-6) return {value, true};
      }
    }
    return {value, false};
  }

 private:
  const UnitaryMatrix& u_;
  std::vector<Matrix> basis_;
  const SymmetricNorm& norm_;
};

}  // namespace

DistanceBounds distance_bounds(const ProjectionFamily& fam, const OrbitPoint& q, const SymmetricNorm& norm,
                               const SolverConfig& cfg) {
  if (q.dim() != fam.dim()) throw DimensionMismatch("orbit point and family dimensions differ");
  const UnitaryMatrix u = q.witness() ? *q.witness() : cross_section(fam, q);
  DistanceBounds out;
  out.lower = 0.5 * orbit_gap_s2(q, OrbitPoint::at_base(fam)) * phi_counting(norm, 1);

  LogLengthSearch search(u, block_diagonal_skew_basis(fam), norm);
  const Eigen::Index dim = static_cast<Eigen::Index>(search.size());
  const RealVector origin = RealVector::Zero(dim);
  const double at_origin = search.eval(origin, true);
  const int sweeps = std::max(1, cfg.max_iter / 4);
  auto [best, converged] = search.descend(origin, at_origin, sweeps);
  for (int j = 1; j <= cfg.restarts; ++j) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(j)));
    RealVector c(dim);
    for (Eigen::Index k = 0; k < dim; ++k) c(k) = 0.5 * rng.normal();
    const double start = search.eval(c, false);
    if (!std::isfinite(start)) continue;
    const auto [v, ok] = search.descend(c, start, sweeps);
    if (v < best) {
      best = v;
      converged = ok;
    }
  }
  out.upper = best;
  out.converged = converged;
  return out;
}

DistanceBounds distance_bounds_between(const ProjectionFamily& fam, const OrbitPoint& a, const OrbitPoint& b,
                                       const SymmetricNorm& norm, const SolverConfig& cfg) {
  const UnitaryMatrix ua = a.witness() ? *a.witness() : cross_section(fam, a);
  const UnitaryMatrix ub = b.witness() ? *b.witness() : cross_section(fam, b);
  return distance_bounds(fam, OrbitPoint::from_unitary(fam, ua.adjoint() * ub), norm, cfg);
}

}  // namespace pinchlab
