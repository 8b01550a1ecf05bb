#include "pinchlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "pinchlab/errors.hpp"
#include "pinchlab/finsler.hpp"
#include "pinchlab/normal_orbit.hpp"
#include "pinchlab/orbit.hpp"

namespace pinchlab {

// ---------------------------------------------------------------------------
// Configuration

std::vector<int> parse_blocks(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("blocks: empty entry in '" + s + "'");
    item = item.substr(b, e - b + 1);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::logic_error&) {
      throw ConfigError("blocks: '" + item + "' is not an integer");
    }
    if (used != item.size()) throw ConfigError("blocks: '" + item + "' is not an integer");
    if (v < 1) throw ConfigError("blocks: sizes must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("blocks: at least one block is required");
  return out;
}

void ExperimentConfig::validate() const {
  if (std::find(experiment_commands().begin(), experiment_commands().end(), command) == experiment_commands().end()) {
    throw ConfigError("command: unknown command '" + command + "'");
  }
  if (dim < 1) throw ConfigError("dim: must be >= 1");
  if (dim > 32) throw ConfigError("dim: must be <= 32");
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  if (k_max < 1) throw ConfigError("k_max: must be >= 1");
  int total = 0;
  for (int b : blocks) {
    if (b < 1) throw ConfigError("blocks: sizes must be positive");
    total += b;
  }
  if (blocks.empty()) throw ConfigError("blocks: at least one block is required");
  if (total > dim) {
    throw ConfigError("blocks: sizes sum to " + std::to_string(total) + " > dim " + std::to_string(dim));
  }
  try {
    (void)SymmetricNorm::parse(norm);
  } catch (const InvalidNorm& e) {
    throw ConfigError(std::string("norm: ") + e.what());
  }
}

ConfigEcho ExperimentConfig::echo() const {
  std::string b;
  for (std::size_t i = 0; i < blocks.size(); ++i) b += (i ? "," : "") + std::to_string(blocks[i]);
  return {{"command", command},  {"dim", std::to_string(dim)},     {"norm", norm},
          {"blocks", b},         {"seed", std::to_string(seed)},   {"trials", std::to_string(trials)},
          {"k_max", std::to_string(k_max)}, {"format", format_name(format)}};
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto l = s.find_first_not_of(" \t\r");
      const auto r = s.find_last_not_of(" \t\r");
      return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out[key] = {value, lineno};
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig build_config(const std::vector<ConfigMap>& layers) {
  ExperimentConfig cfg;
  for (const auto& layer : layers) {
    for (const auto& [key, entry] : layer) {
      const std::string where = entry.line > 0 ? "line " + std::to_string(entry.line) + ": " : "";
      auto as_int = [&](long long lo, long long hi) {
        try {
          std::size_t used = 0;
          const long long v = std::stoll(entry.value, &used);
          if (used != entry.value.size() || v < lo || v > hi) throw std::invalid_argument("range");
          return v;
        } catch (const std::logic_error&) {
          throw ConfigError(where + key + ": '" + entry.value + "' is not a valid integer");
        }
      };
      try {
        if (key == "command") {
          cfg.command = entry.value;
        } else if (key == "dim") {
          cfg.dim = static_cast<int>(as_int(1, 1 << 20));
        } else if (key == "norm") {
          cfg.norm = entry.value;
        } else if (key == "blocks") {
          cfg.blocks = parse_blocks(entry.value);
        } else if (key == "seed") {
          cfg.seed = static_cast<std::uint64_t>(as_int(0, std::numeric_limits<long long>::max()));
        } else if (key == "trials") {
          cfg.trials = static_cast<int>(as_int(1, 1 << 20));
        } else if (key == "k_max") {
          cfg.k_max = static_cast<int>(as_int(1, 64));
        } else if (key == "out") {
          cfg.out = entry.value;
        } else if (key == "format") {
          cfg.format = parse_format(entry.value);
        } else if (key == "timing") {
          if (entry.value != "true" && entry.value != "false") throw ConfigError("timing: expected true or false");
          cfg.timing = entry.value == "true";
        } else {
          throw ConfigError("unknown key");
        }
      } catch (const ConfigError& e) {
        const std::string msg = e.what();
        const std::string prefix = "ConfigError: ";
        const std::string body = msg.rfind(prefix, 0) == 0 ? msg.substr(prefix.size()) : msg;
        if (body.rfind(where + key, 0) == 0) throw;
        throw ConfigError(where + key + ": " + body);
      }
    }
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Parallel trials

int thread_count() {
  const char* env = std::getenv("PINCHLAB_THREADS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return std::clamp(v, 1, 64);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ProjectionFamily random_family(Rng& rng, Eigen::Index n, const std::vector<int>& sizes) {
  const Matrix u = rng.haar_unitary(n).matrix();
  std::vector<Matrix> frames;
  Eigen::Index offset = 0;
  for (int s : sizes) {
    if (offset + s > n) throw OverComplete("block sizes exceed the ambient dimension");
    frames.push_back(u.middleCols(offset, s));
    offset += s;
  }
  return ProjectionFamily::make(n, std::move(frames), 1e-10);
}

std::vector<int> random_sizes(Rng& rng, Eigen::Index n, bool allow_complement) {
  std::vector<int> sizes;
  int remaining = static_cast<int>(n);
  const int reserve = allow_complement ? rng.uniform_int(0, std::max(0, remaining - 1)) : 0;
  remaining -= reserve;
  while (remaining > 0) {
    const int s = rng.uniform_int(1, std::min(remaining, 3));
    sizes.push_back(s);
    remaining -= s;
  }
  return sizes;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

constexpr std::uint64_t kPinchingStream = 1000;
constexpr std::uint64_t kIsotropyStream = 2000;
constexpr std::uint64_t kCommutatorStream = 3000;
constexpr std::uint64_t kTangentStream = 4000;
constexpr std::uint64_t kSectionStream = 5000;
constexpr std::uint64_t kFiberStream = 6000;
constexpr std::uint64_t kDistanceStream = 7000;
constexpr std::uint64_t kLipschitzStream = 8000;
constexpr std::uint64_t kNormalStream = 9000;

struct SuiteContext {
  const ExperimentConfig& cfg;
  SymmetricNorm norm;
  Report& report;

  std::uint64_t seed(std::uint64_t stream, int trial) const {
    return derive_seed(cfg.seed, stream + static_cast<std::uint64_t>(trial));
  }
  ProjectionFamily family(Rng& rng) const { return random_family(rng, cfg.dim, cfg.blocks); }
};

template <class T>
std::vector<T> trial_map(int trials, const std::function<T(int)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(trials));
  parallel_for(trials, [&](int i) { out[static_cast<std::size_t>(i)] = fn(i); });
  return out;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::isnan(x) ? std::numeric_limits<double>::infinity() : x);
  return m;
}

double min_of(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

void pinching_suite(const SuiteContext& c) {
  struct Out {
    double idem = 0, adjoint = 0, contraction = 0, unit = 0;
  };
  const auto rows = trial_map<Out>(c.cfg.trials, [&](int t) {
    Rng rng(c.seed(kPinchingStream, t));
    const ProjectionFamily fam = c.family(rng);
    const Matrix x = rng.gaussian(c.cfg.dim, c.cfg.dim);
    const Matrix y = rng.gaussian(c.cfg.dim, c.cfg.dim);
    const Matrix px = pinch(fam, x);
    Out o;
    o.idem = max_abs(pinch(fam, px) - px);
    o.adjoint = std::abs((px.adjoint() * y).trace() - (x.adjoint() * pinch(fam, y)).trace());
    o.contraction = ideal_norm(c.norm, px) / ideal_norm(c.norm, x);
    o.unit = std::abs(super_norm_s2(SuperOperator::pinch(fam)) - 1.0);
    return o;
  });
  std::vector<double> idem, adj, con, unit;
  for (const auto& r : rows) {
    idem.push_back(r.idem);
    adj.push_back(r.adjoint);
    con.push_back(r.contraction);
    unit.push_back(r.unit);
  }
  c.report.check_le("pinching.idempotent", "P(P(x)) = P(x)", max_of(idem), 0.0, 1e-12);
  c.report.check_le("pinching.self_adjoint", "<P(x), y> = <x, P(y)>", max_of(adj), 0.0, 1e-10);
  c.report.check_le("pinching.contraction", "||P(x)|| <= ||x|| in every symmetric norm", max_of(con), 1.0, 1e-12);
  c.report.check_le("pinching.unit_norm", "the pinching has induced norm exactly one", max_of(unit), 0.0, 1e-9);
}

void isotropy_suite(const SuiteContext& c) {
  struct Out {
    int disagreements = 0;
    int in_g = 0;
    double h_factor = 0.0;
  };
  const auto rows = trial_map<Out>(c.cfg.trials, [&](int t) {
    Rng rng(c.seed(kIsotropyStream, t));
    const ProjectionFamily fam = c.family(rng);
    const Eigen::Index n = c.cfg.dim;
    Matrix z = rng.skew(n).matrix();
    if (t % 2 == 0) {
      Matrix diag = Matrix::Zero(n, n);
      for (int i = 0; i <= fam.block_count(); ++i) diag += fam.projector(i) * z * fam.projector(i);
      z = diag;
    }
    const UnitaryMatrix u = expm_skew(SkewHermitian::skew_part(z));
    const bool g = in_isotropy_G(fam, u, 1e-9);
    const SuperOperator p = SuperOperator::pinch(fam);
    const SuperOperator lu = SuperOperator::left(u.matrix());
    const bool commutes = basis_discrepancy(lu * p, p * lu) <= 1e-9;
    Out o;
    o.disagreements = g != commutes ? 1 : 0;
    o.in_g = g ? 1 : 0;
    // A relabelling of equal-rank blocks composed with an element of G.
    const auto perms = rank_compatible_permutations(fam);
    const BlockPermutation& sigma = perms[static_cast<std::size_t>(t) % perms.size()];
    const UnitaryMatrix h = permutation_operator(fam, sigma) * (g ? u : UnitaryMatrix::identity(n));
    const auto found = in_isotropy_H(fam, h);
    if (!found || *found != sigma) {
      o.h_factor = std::numeric_limits<double>::infinity();
    } else {
      o.h_factor = in_isotropy_G(fam, permutation_operator(fam, found->inverse()) * h, 1e-9) ? 0.0 : 1.0;
    }
    return o;
  });
  int dis = 0, in_g = 0;
  std::vector<double> h;
  for (const auto& r : rows) {
    dis += r.disagreements;
    in_g += r.in_g;
    h.push_back(r.h_factor);
  }
  c.report.check_le("isotropy.g_matches_commutation", "u lies in G iff L_u P = P L_u", dis, 0.0, 0.0);
  c.report.check_ge("isotropy.g_both_outcomes", "the isotropy trials cover both outcomes",
                    std::min(in_g, c.cfg.trials - in_g), c.cfg.trials > 1 ? 1.0 : 0.0, 0.0);
  c.report.check_le("isotropy.h_factorization", "elements of H factor as r_sigma g with g in G", max_of(h), 0.0, 0.0);
}

void commutator_suite(const SuiteContext& c) {
  struct Out {
    double deficit = 0.0;
    double compact_deficit = 0.0;
  };
  const auto rows = trial_map<Out>(c.cfg.trials, [&](int t) {
    Rng rng(c.seed(kCommutatorStream, t));
    const ProjectionFamily fam = c.family(rng);
    const Eigen::Index n = c.cfg.dim;
    const Matrix x = rng.gaussian(n, n);
    const SuperOperator s = commutator_super(x, fam);
    const NormEstimate est = super_norm_estimate(s, c.norm, 2, c.seed(kCommutatorStream + 500, t));
    Out o;
    o.deficit = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= fam.block_count(); ++i) {
      for (int j = 0; j <= fam.block_count(); ++j) {
        if (i == j || fam.rank(j) == 0) continue;
        o.deficit = std::max(o.deficit, op_norm(fam.projector(i) * x * fam.projector(j)) - est.lower);
      }
    }
    // Operator-norm variant for x with vanishing diagonal blocks.
    Matrix xo = x;
    for (int i = 1; i <= fam.block_count(); ++i) xo -= fam.projector(i) * x * fam.projector(i);
    const NormEstimate op_est =
        super_norm_estimate(commutator_super(xo, fam), SymmetricNorm::op(), 2, c.seed(kCommutatorStream + 700, t));
    o.compact_deficit = op_norm(xo * (identity(n) - fam.projector(0))) - op_est.lower;
    return o;
  });
  std::vector<double> d, cd;
  for (const auto& r : rows) {
    d.push_back(r.deficit);
    cd.push_back(r.compact_deficit);
  }
  c.report.check_le("commutator.block_lower_bound", "||[L_x, P]|| >= ||p_i x p_j|| for i >= 1, i != j",
                    *std::max_element(d.begin(), d.end()), 0.0, 1e-10);
  c.report.check_le("commutator.compact_lower_bound",
                    "operator norm: ||[L_x, P]|| >= ||x (1 - p_0)|| when p_i x p_i = 0",
                    *std::max_element(cd.begin(), cd.end()), 0.0, 1e-10);
}

SuperOperator random_superoperator(Rng& rng, const ProjectionFamily& fam) {
  const Eigen::Index n = fam.dim();
  const SuperOperator p = SuperOperator::pinch(fam);
  SuperOperator s = SuperOperator::left(rng.gaussian(n, n)) * SuperOperator::right(rng.gaussian(n, n));
  s = s + SuperOperator::left(rng.gaussian(n, n)) * p;
  s = s + p * SuperOperator::right(rng.gaussian(n, n));
  return s;
}

void tangent_suite(const SuiteContext& c) {
  struct Out {
    double idem_a = 0, idem_b = 0, formula_a = 0, formula_b = 0;
  };
  const auto rows = trial_map<Out>(c.cfg.trials, [&](int t) {
    Rng rng(c.seed(kTangentStream, t));
    const ProjectionFamily fam = c.family(rng);
    const SuperOperator s = random_superoperator(rng, fam);
    const TangentVariant a = DistinguishedP0{};
    const TangentVariant b = DistinguishedBlock{1, fam.frame(1).col(0)};
    Out o;
    const TangentVector ea = tangent_project(fam, s, a);
    o.idem_a = basis_discrepancy(tangent_project(fam, ea.as_super, a).as_super, ea.as_super);
    const TangentVector eb = tangent_project(fam, s, b);
    o.idem_b = basis_discrepancy(tangent_project(fam, eb.as_super, b).as_super, eb.as_super);
    const Matrix z = rng.skew(c.cfg.dim).matrix();
    Matrix expected = z;
    for (int i = 0; i <= fam.block_count(); ++i) expected -= fam.projector(i) * z * fam.projector(i);
    const SuperOperator cz = commutator_super(z, fam);
    o.formula_a = max_abs(tangent_generator(fam, cz, a).matrix() - expected);
    o.formula_b = max_abs(tangent_generator(fam, cz, b).matrix() - expected);
    return o;
  });
  std::vector<double> ia, ib, fa, fb;
  for (const auto& r : rows) {
    ia.push_back(r.idem_a);
    ib.push_back(r.idem_b);
    fa.push_back(r.formula_a);
    fb.push_back(r.formula_b);
  }
  c.report.check_le("tangent.idempotent_p0", "E(E(S)) = E(S), complement distinguished", max_of(ia), 0.0, 1e-9);
  c.report.check_le("tangent.idempotent_block", "E(E(S)) = E(S), block 1 distinguished", max_of(ib), 0.0, 1e-9);
  c.report.check_le("tangent.generator_p0", "zhat([L_z, P]) = z - sum p_i z p_i, complement distinguished",
                    max_of(fa), 0.0, 1e-10);
  c.report.check_le("tangent.generator_block", "zhat([L_z, P]) = z - sum p_i z p_i, block 1 distinguished",
                    max_of(fb), 0.0, 1e-10);
}

void section_suite(const SuiteContext& c) {
  struct Out {
    double recon = 0, fmap = 0, s_excess = 0;
  };
  const auto rows = trial_map<Out>(c.cfg.trials, [&](int t) {
    Rng rng(c.seed(kSectionStream, t));
    const ProjectionFamily fam = c.family(rng);
    const double scale = rng.uniform(0.0, 0.1);
    const UnitaryMatrix u = expm_skew(rng.skew(c.cfg.dim) * scale);
    const OrbitPoint q = OrbitPoint::from_unitary(fam, u);
    const UnitaryMatrix sigma = cross_section(fam, q);
    Out o;
    o.recon = basis_discrepancy(OrbitPoint::from_unitary(fam, sigma).as_super(), q.as_super());
    for (int i = 0; i <= fam.block_count(); ++i) {
      const Matrix p = fam.projector(i);
      o.fmap = std::max(o.fmap, max_abs(sigma.matrix() * p * sigma.matrix().adjoint() - f_map(fam, i, q)));
    }
    const double dist = orbit_gap_s2(q, OrbitPoint::at_base(fam));
    o.s_excess = op_norm(section_factor(fam, q) - identity(c.cfg.dim)) - 3.0 * dist;
    return o;
  });
  std::vector<double> r, f, s;
  for (const auto& o : rows) {
    r.push_back(o.recon);
    f.push_back(o.fmap);
    s.push_back(o.s_excess);
  }
  c.report.check_le("section.reconjugation", "conjugating P by sigma(Q) recovers Q", max_of(r), 0.0, 1e-9);
  c.report.check_le("section.projections", "sigma p_i sigma* = q_i", max_of(f), 0.0, 1e-9);
  c.report.check_le("section.s_estimate", "||s - 1|| <= 3 ||Q - P||", *std::max_element(s.begin(), s.end()), 0.0,
                    1e-9);
}

std::size_t factorial_product(const ProjectionFamily& fam) {
  std::map<Eigen::Index, int> counts;
  for (int i = 1; i <= fam.block_count(); ++i) ++counts[fam.rank(i)];
  std::size_t total = 1;
  for (const auto& [rank, m] : counts)
    for (int f = 2; f <= m; ++f) total *= static_cast<std::size_t>(f);
  return total;
}

void fiber_suite(const SuiteContext& c) {
  struct Out {
    double size_error = 0;
    double min_sep = std::numeric_limits<double>::infinity();
    double size = 0;
    double expected = 0;
  };
  const int trials = std::min(c.cfg.trials, 5);
  const auto rows = trial_map<Out>(trials, [&](int t) {
    Rng rng(c.seed(kFiberStream, t));
    const ProjectionFamily fam = c.family(rng);
    const OrbitPoint q = OrbitPoint::from_unitary(fam, rng.haar_unitary(c.cfg.dim));
    const auto points = fiber(fam, q);
    Out o;
    o.size = static_cast<double>(points.size());
    o.expected = static_cast<double>(factorial_product(fam));
    o.size_error = std::abs(o.size - o.expected);
    for (std::size_t a = 0; a < points.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        o.min_sep = std::min(o.min_sep, super_norm_s2(points[a].as_super() - points[b].as_super()));
    return o;
  });
  std::vector<double> err, sep;
  for (const auto& o : rows) {
    err.push_back(o.size_error);
    if (std::isfinite(o.min_sep)) sep.push_back(o.min_sep);
  }
  c.report.check_eq("fiber.size", "fiber size = product of factorials of equal-rank classes", rows.front().size,
                    rows.front().expected, 0.0);
  c.report.check_le("fiber.size_all_trials", "fiber size matches the permutation count in every trial", max_of(err),
                    0.0, 0.0);
  if (!sep.empty()) {
    c.report.check_ge("fiber.separation", "distinct fiber points are at distance >= 1", min_of(sep), 1.0, 1e-9);
  }
}

void distance_suite(const SuiteContext& c) {
  struct Out {
    double order = 0, upper_excess = 0, qn_excess = 0, qn_shift = 0, s2_oracle = 0;
  };
  SolverConfig scfg;
  scfg.restarts = 0;
  scfg.seed = c.cfg.seed;
  const auto rows = trial_map<Out>(c.cfg.trials, [&](int t) {
    Rng rng(c.seed(kDistanceStream, t));
    const ProjectionFamily fam = c.family(rng);
    const Eigen::Index n = c.cfg.dim;
    Matrix z = rng.skew(n).matrix() * rng.uniform(0.05, 0.8);
    Matrix diag = Matrix::Zero(n, n);
    for (int i = 0; i <= fam.block_count(); ++i) diag += fam.projector(i) * z * fam.projector(i);
    const SkewHermitian zs = SkewHermitian::skew_part(z);
    const OrbitPoint q = OrbitPoint::from_unitary(fam, expm_skew(zs));
    const DistanceBounds d = distance_bounds(fam, q, c.norm, scfg);
    Out o;
    o.order = d.lower - d.upper;
    o.upper_excess = d.upper - ideal_norm(c.norm, zs.matrix());
    const QuotientNormResult qn = quotient_norm(fam, zs, c.norm);
    o.qn_excess = qn.value - ideal_norm(c.norm, zs.matrix());
    const SkewHermitian w = SkewHermitian::skew_part(rng.gaussian(n, n));
    Matrix wd = Matrix::Zero(n, n);
    for (int i = 0; i <= fam.block_count(); ++i) wd += fam.projector(i) * w.matrix() * fam.projector(i);
    o.qn_shift = std::abs(quotient_norm(fam, SkewHermitian::skew_part(zs.matrix() + wd), c.norm).value - qn.value);
    o.s2_oracle =
        std::abs(quotient_norm(fam, zs, SymmetricNorm::schatten(2.0)).value - (zs.matrix() - diag).norm());
    return o;
  });
  std::vector<double> ord, up, qe, qs, so;
  for (const auto& o : rows) {
    ord.push_back(o.order);
    up.push_back(o.upper_excess);
    qe.push_back(o.qn_excess);
    qs.push_back(o.qn_shift);
    so.push_back(o.s2_oracle);
  }
  auto mx = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
  c.report.check_le("distance.lower_le_upper", "two-sided distance bounds are ordered", mx(ord), 0.0, 1e-9);
  c.report.check_le("distance.upper_le_generator", "d(P, e^z P e^-z) <= ||z||", mx(up), 0.0, 1e-9);
  c.report.check_le("quotient.le_unconstrained", "quotient norm <= ||z||", mx(qe), 0.0, 1e-10);
  c.report.check_le("quotient.shift_invariant", "quotient norm is invariant under block-diagonal shifts", mx(qs), 0.0,
                    1e-9);
  c.report.check_le("quotient.s2_closed_form", "S2 quotient norm = off-block-diagonal S2 norm", mx(so), 0.0, 1e-12);
}

void lipschitz_suite(const SuiteContext& c) {
  struct Out {
    double block_excess = 0, p0_excess = 0;
  };
  const auto rows = trial_map<Out>(c.cfg.trials, [&](int t) {
    Rng rng(c.seed(kLipschitzStream, t));
    const ProjectionFamily fam = c.family(rng);
    const UnitaryMatrix u = t % 4 == 3 ? rng.haar_unitary(c.cfg.dim)
                                       : expm_skew(rng.skew(c.cfg.dim) * rng.uniform(0.01, 1.0));
    const OrbitPoint q = OrbitPoint::from_unitary(fam, u);
    const double dist = super_norm_s2(q.as_super() - SuperOperator::pinch(fam));
    Eigen::Index cmax = 1;
    for (int i = 1; i <= fam.block_count(); ++i) cmax = std::max(cmax, fam.rank(i));
    const double bound = 2.0 * fam.block_count() * static_cast<double>(cmax) * dist;
    Out o;
    o.block_excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= fam.block_count(); ++i) {
      o.block_excess = std::max(o.block_excess, (f_map(fam, i, q) - fam.projector(i)).norm() - bound);
    }
    o.p0_excess = op_norm(f_map(fam, 0, q) - fam.projector(0)) - 2.0 * dist;
    return o;
  });
  std::vector<double> be, pe;
  for (const auto& o : rows) {
    be.push_back(o.block_excess);
    pe.push_back(o.p0_excess);
  }
  c.report.check_le("lipschitz.blocks",
                    "||u p_i u* - p_i||_S2 <= 2 w C ||Q - P|| (complement distinguished, C = max block rank)",
                    *std::max_element(be.begin(), be.end()), 0.0, 1e-8);
  c.report.check_le("lipschitz.complement", "||u p_0 u* - p_0||_op <= 2 ||Q - P||",
                    *std::max_element(pe.begin(), pe.end()), 0.0, 1e-8);
}

void normal_suite(const SuiteContext& c) {
  std::vector<double> residual, ratio;
  for (int t = 0; t < c.cfg.trials; ++t) {
    Rng rng(c.seed(kNormalStream, t));
    const Eigen::Index n = c.cfg.dim;
    const UnitaryMatrix basis = rng.haar_unitary(n);
    Vector lambda(n);
    const int kernel = rng.uniform_int(0, static_cast<int>(n) / 2);
    for (Eigen::Index k = 0; k < n; ++k) {
      lambda(k) = k < n - kernel ? Complex(rng.uniform(0.2, 2.0), rng.uniform(-1.0, 1.0)) : Complex(0.0);
    }
    const Matrix a = basis.matrix() * lambda.asDiagonal() * basis.matrix().adjoint();
    const NormalOperatorSpec spec = spectral_family(a);
    const GapReport g = gap_inequality_check(spec, rng.haar_unitary(n), c.norm);
    residual.push_back(g.max_residual);
    ratio.push_back(g.max_ratio);
  }
  c.report.check_le("normal.gap_identity", "p_i (u a - a u) p_j = (lambda_j - lambda_i) p_i u p_j", max_of(residual),
                    0.0, 1e-12);
  c.report.check_le("normal.gap_inequality", "||p_i u p_j|| <= |lambda_i - lambda_j|^-1 ||u a - a u||",
                    max_of(ratio), 1.0, 1e-10);

  std::vector<Complex> eig;
  std::vector<int> mult;
  for (int i = 1; i <= c.cfg.dim; ++i) {
    eig.emplace_back(1.0 / i);
    mult.push_back(1);
  }
  if (c.cfg.dim >= 2) {
    const auto rows = swap_table(diagonal_spec(eig, mult), c.norm);
    double exact = 0.0, p_low = std::numeric_limits<double>::infinity(), bound = 0.0;
    for (const auto& r : rows) {
      exact = std::max(exact, std::abs(r.a_disp_op - r.gap));
      bound = std::max(bound, r.a_disp_op - 2.0 * r.gap);
      p_low = std::min(p_low, r.p_disp_lower);
    }
    c.report.check_le("normal.swap_a_displacement", "||u_n a u_n* - a||_op = |lambda_{n+1} - lambda_{n+2}|", exact,
                      0.0, 1e-12);
    c.report.check_le("normal.swap_a_bound", "||u_n a u_n* - a|| <= 2 |lambda_{n+1} - lambda_{n+2}|", bound, 0.0,
                      1e-12);
    c.report.check_ge("normal.swap_p_displacement", "the pinching orbit displacement of u_n stays >= 1", p_low, 1.0,
                      1e-9);
  }
}

void topology_suite(const SuiteContext& c) {
  const TopologyTable table = topology_gap_table(c.norm, c.cfg.k_max, ZkScenario::GrowingW);
  double phi_dev = 0.0, bound_excess = -std::numeric_limits<double>::infinity(), monotone = 0.0;
  double closed_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    phi_dev = std::max(phi_dev, std::abs(r.z_phi - 1.0));
    bound_excess = std::max(bound_excess, r.displacement - r.bound);
    closed_excess = std::max(closed_excess, r.bound - r.bound_closed);
    if (i > 0) monotone = std::max(monotone, r.displacement - table.rows[i - 1].displacement);
  }
  c.report.check_le("topology.phi_pinned", "||z_k||_Phi = 1 for every k", phi_dev, 0.0, 1e-12);
  c.report.check_le("topology.displacement_bound", "||e^z P e^-z - P|| <= 2 ||e^z - 1||", bound_excess, 0.0, 1e-12);
  c.report.check_le("topology.closed_bound", "2 ||e^z - 1|| <= 2 (e^||z|| - 1)", closed_excess, 0.0, 1e-12);
  c.report.check_le("topology.monotone", "displacement decreases in k", monotone, 0.0, 1e-9);
  c.report.check_ge("topology.gap_present", "the norm is not equivalent to the operator norm on this range",
                    table.degenerate ? 0.0 : 1.0, 1.0, 0.0);
}

}  // namespace

Report run(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.config = cfg.echo();
  const SuiteContext ctx{cfg, SymmetricNorm::parse(cfg.norm), report};
  const std::string& cmd = cfg.command;
  if (cmd == "verify") {
    pinching_suite(ctx);
    isotropy_suite(ctx);
    commutator_suite(ctx);
    tangent_suite(ctx);
    section_suite(ctx);
    fiber_suite(ctx);
    distance_suite(ctx);
    lipschitz_suite(ctx);
    normal_suite(ctx);
  } else if (cmd == "fiber") {
    fiber_suite(ctx);
  } else if (cmd == "section") {
    section_suite(ctx);
  } else if (cmd == "distance") {
    distance_suite(ctx);
  } else if (cmd == "topology-gap") {
    topology_suite(ctx);
  } else if (cmd == "normal-orbit") {
    normal_suite(ctx);
  } else if (cmd == "lipschitz") {
    lipschitz_suite(ctx);
  }
  if (cfg.timing) {
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

}  // namespace pinchlab
