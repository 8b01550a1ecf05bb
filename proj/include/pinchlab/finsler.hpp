#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pinchlab/norms.hpp"
#include "pinchlab/orbit.hpp"

namespace pinchlab {

struct SolverConfig {
  int max_iter = 2000;
  int stall_window = 50;
  double stall_tol = 1e-10;
  int nodes = 16;  // quadrature nodes per segment
  int restarts = 4;
  std::uint64_t seed = 0;
};

/// Time-ordered product of exponential segments applied to `base`.
class PiecewiseExpCurve {
 public:
  struct Segment {
    double dt;
    SkewHermitian generator;
  };

  /// Throws InvalidArgument unless durations are positive and sum to 1 within 1e-12.
  PiecewiseExpCurve(UnitaryMatrix base, std::vector<Segment> segments);
  static PiecewiseExpCurve single(const SkewHermitian& z);

  const UnitaryMatrix& base() const { return base_; }
  const std::vector<Segment>& segments() const { return segments_; }
  Eigen::Index dim() const { return base_.dim(); }

  /// Value at the start of segment k (k = segments().size() gives the endpoint).
  const UnitaryMatrix& knot(std::size_t k) const { return knots_[k]; }
  UnitaryMatrix at(double t) const;
  const UnitaryMatrix& endpoint() const { return knots_.back(); }

 private:
  UnitaryMatrix base_;
  std::vector<Segment> segments_;
  std::vector<UnitaryMatrix> knots_;
};

struct QuotientNormResult {
  double value = 0.0;
  SkewHermitian minimizer = SkewHermitian::zero(0);
  int iterations = 0;
  bool converged = true;
};

/// inf ||z + y||_Phi over block-diagonal skew-hermitian y (blocks 0..w).
QuotientNormResult quotient_norm(const ProjectionFamily& fam, const SkewHermitian& z, const SymmetricNorm& norm,
                                 const SolverConfig& cfg = {});

/// Sum of dt_k ||x_k||_Phi.
double curve_length_group(const PiecewiseExpCurve& curve, const SymmetricNorm& norm);

struct OrbitLength {
  double value = 0.0;
  double tol = 0.0;  // quadrature spread plus solver slack
  bool converged = true;
};

/// Composite midpoint integral of the quotient-norm speed of u -> u P u*.
OrbitLength curve_length_orbit(const ProjectionFamily& fam, const PiecewiseExpCurve& curve, const SymmetricNorm& norm,
                               const SolverConfig& cfg = {});

/// Generator x_i used on [t_i, t_{i+1}); times must form a uniform partition of [0, 1) starting at 0.
struct LiftSample {
  double t;
  SkewHermitian x;
};

/// Time-ordered curve starting at the identity; equal consecutive generators are merged.
PiecewiseExpCurve lift_curve(const ProjectionFamily& fam, const std::vector<LiftSample>& samples);

/// U(t) = e^{t a} e^{t^2 b} with skew a, b; used as a smooth target for lifting.
class SmoothTarget {
 public:
  SmoothTarget(SkewHermitian a, SkewHermitian b);
  static SmoothTarget random(Eigen::Index n, double scale, std::uint64_t seed);

  UnitaryMatrix unitary(double t) const;
  /// Right-trivialized velocity U'(t) U(t)^*.
  SkewHermitian velocity(double t) const;
  OrbitPoint orbit_point(const ProjectionFamily& fam, double t) const;
  /// The orbit tangent [L_v, gamma(t)].
  SuperOperator orbit_velocity(const ProjectionFamily& fam, double t) const;

  const SkewHermitian& a() const { return a_; }
  const SkewHermitian& b() const { return b_; }

 private:
  SkewHermitian a_;
  SkewHermitian b_;
};

/// Quotient-norm-minimal generators x_i = v(t_i) + U(t_i) y_i U(t_i)^* on a uniform n-partition.
std::vector<LiftSample> lift_samples(const ProjectionFamily& fam, const SmoothTarget& target, int n,
                                     const SymmetricNorm& norm, const SolverConfig& cfg = {});

/// super_norm_s2 distance between two points over the same base, max_i ||q_i - q'_i||_op.
double orbit_gap_s2(const OrbitPoint& a, const OrbitPoint& b);

struct LiftRow {
  int n = 0;
  double endpoint_gap = 0.0;    // orbit distance between pi(Gamma(1)) and gamma(1)
  double group_length = 0.0;    // L(Gamma)
  double target_length = 0.0;   // quotient length of gamma
  double epsilon = 0.0;         // from oscillation and Riemann-sum error
  double speed_bound = 0.0;     // max(M, max ||x_i||_op)
  double gap_bound = 0.0;       // 2 (2 M / n + eps / 4)
};

/// Lifts `target` for each partition size. The target length is integrated with `fine_nodes` midpoints.
std::vector<LiftRow> lift_experiment(const ProjectionFamily& fam, const SmoothTarget& target, const std::vector<int>& ns,
                                     const SymmetricNorm& norm, const SolverConfig& cfg = {}, int fine_nodes = 512);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool converged = true;
};

/// lower = super_norm_s2(Q - P) / 2, certified because Phi dominates the operator norm;
/// upper = min over block-diagonal skew y of ||log(u e^y)||_Phi, searched by coordinate
/// descent from y = 0 plus cfg.restarts seeded starts. Uses the cross section when Q has no witness.
DistanceBounds distance_bounds(const ProjectionFamily& fam, const OrbitPoint& q, const SymmetricNorm& norm,
                               const SolverConfig& cfg = {});

/// Bounds for the distance between two points over the same base, reduced to the base point.
DistanceBounds distance_bounds_between(const ProjectionFamily& fam, const OrbitPoint& a, const OrbitPoint& b,
                                       const SymmetricNorm& norm, const SolverConfig& cfg = {});

}  // namespace pinchlab
