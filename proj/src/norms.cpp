#include "pinchlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pinchlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double schatten_eval(std::span<const double> s, double p) {
  if (s.empty() || s[0] == 0.0) return 0.0;
  const double scale = s[0];
  double acc = 0.0;
  for (double v : s) acc += std::pow(v / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

std::vector<double> sorted_abs(std::span<const double> seq) {
  std::vector<double> out(seq.size());
  std::transform(seq.begin(), seq.end(), out.begin(), [](double v) { return std::abs(v); });
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

void validate_custom(const SymmetricNorm::Custom& c) {
  if (!c.phi) throw InvalidNorm("custom norm '" + c.name + "' has no function");
  auto eval = [&](std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return c.phi(v);
  };
  const double unit = eval({1.0});
  if (std::abs(unit - 1.0) > 1e-12) {
    throw InvalidNorm("custom norm '" + c.name + "' violates Phi(1,0,...) = 1 (got " +
                      std::to_string(unit) + ")");
  }
  if (std::abs(eval({1.0, 0.0, 0.0}) - 1.0) > 1e-12) {
    throw InvalidNorm("custom norm '" + c.name + "' depends on trailing zeros");
  }
  const std::vector<std::vector<double>> probes = {
      {1.0, 1.0}, {3.0, 2.0, 1.0}, {0.5, 0.25}, {2.0, 2.0, 2.0, 1.0}, {1.0, 0.1, 0.01}};
  for (const auto& a : probes) {
    const double fa = eval(a);
    if (fa < a[0] - 1e-12) throw InvalidNorm("custom norm '" + c.name + "' is below the sup norm");
    std::vector<double> scaled(a);
    for (double& v : scaled) v *= 2.5;
    if (std::abs(eval(scaled) - 2.5 * fa) > 1e-10 * std::max(1.0, fa)) {
      throw InvalidNorm("custom norm '" + c.name + "' is not homogeneous");
    }
    std::vector<double> bigger(a);
    bigger.back() += 0.5;
    if (eval(bigger) < fa - 1e-12) throw InvalidNorm("custom norm '" + c.name + "' is not monotone");
    for (const auto& b : probes) {
      std::vector<double> sum(std::max(a.size(), b.size()), 0.0);
      for (std::size_t i = 0; i < a.size(); ++i) sum[i] += a[i];
      for (std::size_t i = 0; i < b.size(); ++i) sum[i] += b[i];
      if (eval(sum) > fa + eval(b) + 1e-10) {
        throw InvalidNorm("custom norm '" + c.name + "' violates the triangle inequality");
      }
    }
  }
}

}  // namespace

SymmetricNorm SymmetricNorm::schatten(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidNorm("Schatten exponent must be finite and >= 1");
  return SymmetricNorm(SchattenP{p});
}

SymmetricNorm SymmetricNorm::ky_fan(int k) {
  if (k < 1) throw InvalidNorm("Ky Fan index must be >= 1");
  return SymmetricNorm(KyFan{k});
}

SymmetricNorm SymmetricNorm::custom(std::string name,
                                    std::function<double(std::span<const double>)> phi) {
  Custom c{std::move(name), std::move(phi)};
  validate_custom(c);
  return SymmetricNorm(std::move(c));
}

SymmetricNorm SymmetricNorm::parse(const std::string& spec) {
  if (spec == "op") return op();
  if (spec == "s1") return schatten(1.0);
  if (spec == "s2") return schatten(2.0);
  auto number_after = [&](std::size_t prefix) -> std::string { return spec.substr(prefix); };
  try {
    if (spec.rfind("sp:", 0) == 0) return schatten(std::stod(number_after(3)));
    if (spec.rfind("kyfan:", 0) == 0) {
      std::size_t used = 0;
      const std::string digits = number_after(6);
      const int k = std::stoi(digits, &used);
      if (used != digits.size()) throw InvalidNorm("trailing characters");
      return ky_fan(k);
    }
  } catch (const std::logic_error&) {
    // std::stod / std::stoi failures fall through to the error below.
  }
  throw InvalidNorm("unknown norm '" + spec + "' (expected op | s1 | s2 | sp:<p> | kyfan:<k>)");
}

bool SymmetricNorm::is_schatten2() const {
  const auto* s = std::get_if<SchattenP>(&kind_);
  return s != nullptr && s->p == 2.0;
}

std::string SymmetricNorm::name() const {
  return std::visit(Overloaded{[](const Operator&) { return std::string("op"); },
                               [](const SchattenP& s) {
                                 if (s.p == 1.0) return std::string("s1");
                                 if (s.p == 2.0) return std::string("s2");
                                 std::ostringstream os;
                                 os << "sp:" << s.p;
                                 return os.str();
                               },
                               [](const KyFan& k) { return "kyfan:" + std::to_string(k.k); },
                               [](const Custom& c) { return "custom:" + c.name; }},
                    kind_);
}

double SymmetricNorm::eval_sorted(std::span<const double> s) const {
  return std::visit(Overloaded{[&](const Operator&) { return s.empty() ? 0.0 : s[0]; },
                               [&](const SchattenP& sp) { return schatten_eval(s, sp.p); },
                               [&](const KyFan& k) {
                                 double acc = 0.0;
                                 const std::size_t m = std::min<std::size_t>(k.k, s.size());
                                 for (std::size_t i = 0; i < m; ++i) acc += s[i];
                                 return acc;
                               },
                               [&](const Custom& c) { return c.phi(s); }},
                    kind_);
}

std::vector<double> SymmetricNorm::subgradient_sorted(std::span<const double> s) const {
  std::vector<double> g(s.size(), 0.0);
  if (s.empty()) return g;
  std::visit(Overloaded{[&](const Operator&) { g[0] = 1.0; },
                        [&](const SchattenP& sp) {
                          const double phi = schatten_eval(s, sp.p);
                          if (phi == 0.0) {
                            g[0] = 1.0;
                            return;
                          }
                          for (std::size_t i = 0; i < s.size(); ++i)
                            g[i] = std::pow(s[i] / phi, sp.p - 1.0);
                        },
                        [&](const KyFan& k) {
                          const std::size_t m = std::min<std::size_t>(k.k, s.size());
                          for (std::size_t i = 0; i < m; ++i) g[i] = 1.0;
                        },
                        [&](const Custom& c) {
                          // One-sided differences along each coordinate, clipped to be
                          // nonnegative; exact for piecewise-linear Phi away from kinks.
                          std::vector<double> t(s.begin(), s.end());
                          const double base = c.phi(t);
                          const double h = 1e-7 * std::max(1.0, s[0]);
                          for (std::size_t i = 0; i < s.size(); ++i) {
                            t[i] += h;
                            std::vector<double> sorted(t);
                            std::sort(sorted.begin(), sorted.end(), std::greater<>());
                            g[i] = std::max(0.0, (c.phi(sorted) - base) / h);
                            t[i] = s[i];
                          }
                        }},
             kind_);
  return g;
}

std::vector<SymmetricNorm> builtin_norms() {
  return {SymmetricNorm::op(), SymmetricNorm::schatten(1.0), SymmetricNorm::schatten(2.0),
          SymmetricNorm::schatten(3.0), SymmetricNorm::ky_fan(2)};
}

double phi_eval(const SymmetricNorm& norm, std::span<const double> seq) {
  for (double v : seq)
    if (!std::isfinite(v)) throw InvalidArgument("sequence has non-finite entries");
  const std::vector<double> s = sorted_abs(seq);
  return norm.eval_sorted(s);
}

double ideal_norm(const SymmetricNorm& norm, const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const RealVector s = singular_values(m);
  return norm.eval_sorted(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
}

double phi_counting(const SymmetricNorm& norm, int k) {
  if (k < 1) throw InvalidArgument("phi_counting requires k >= 1");
  const std::vector<double> ones(static_cast<std::size_t>(k), 1.0);
  return norm.eval_sorted(ones);
}

Matrix ideal_norm_subgradient(const SymmetricNorm& norm, const Matrix& m) {
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = solver.singularValues();
  const std::vector<double> g =
      norm.subgradient_sorted(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
  RealVector gv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) gv(i) = g[static_cast<std::size_t>(i)];
  return solver.matrixU() * gv.cast<Complex>().asDiagonal() * solver.matrixV().adjoint();
}

}  // namespace pinchlab
