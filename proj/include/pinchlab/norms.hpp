#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pinchlab/linalg.hpp"

namespace pinchlab {

/// A symmetric norming function Phi on finitely supported real sequences and
/// the unitarily invariant matrix norm ||x||_Phi = Phi(singular values of x).
///
/// Built-in kinds are the operator norm, Schatten-p (p >= 1) and Ky Fan k.
/// Custom functions receive a nonnegative nonincreasing sequence; they are
/// probed at construction for normalization, monotonicity, homogeneity and
/// the triangle inequality.
class SymmetricNorm {
 public:
  struct Operator {};
  struct SchattenP {
    double p;
  };
  struct KyFan {
    int k;
  };
  struct Custom {
    std::string name;
    std::function<double(std::span<const double>)> phi;
  };
  using Kind = std::variant<Operator, SchattenP, KyFan, Custom>;

  static SymmetricNorm op() { return SymmetricNorm(Operator{}); }
  static SymmetricNorm schatten(double p);
  static SymmetricNorm ky_fan(int k);
  static SymmetricNorm custom(std::string name, std::function<double(std::span<const double>)> phi);

  /// Parses "op", "s1", "s2", "sp:<p>" or "kyfan:<k>".
  static SymmetricNorm parse(const std::string& spec);

  const Kind& kind() const { return kind_; }
  bool is_operator() const { return std::holds_alternative<Operator>(kind_); }
  bool is_schatten2() const;
  std::string name() const;

  /// Phi on a sequence already sorted nonincreasing and nonnegative.
  double eval_sorted(std::span<const double> s) const;
  /// A subgradient g of Phi at the sorted sequence s: sum g_i s_i = Phi(s) and
  /// the dual norm of g is at most one.
  std::vector<double> subgradient_sorted(std::span<const double> s) const;

 private:
  explicit SymmetricNorm(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// The built-in norms exercised by the property suites.
std::vector<SymmetricNorm> builtin_norms();

/// Phi(|seq| sorted nonincreasing).
double phi_eval(const SymmetricNorm& norm, std::span<const double> seq);

/// ||m||_Phi.
double ideal_norm(const SymmetricNorm& norm, const Matrix& m);

/// a_k = Phi(1, ..., 1, 0, ...) with k ones.
double phi_counting(const SymmetricNorm& norm, int k);

/// Subgradient of m -> ||m||_Phi in the real inner product Re tr(a* b):
/// U diag(g) V* for m = U diag(s) V*.
Matrix ideal_norm_subgradient(const SymmetricNorm& norm, const Matrix& m);

}  // namespace pinchlab
