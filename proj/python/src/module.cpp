// Python bindings for the pinching-orbit library.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pinchlab/experiments.hpp"
#include "pinchlab/finsler.hpp"
#include "pinchlab/normal_orbit.hpp"
#include "pinchlab/orbit.hpp"

namespace py = pybind11;
using namespace pinchlab;

namespace {

std::optional<std::vector<int>> permutation_values(const std::optional<BlockPermutation>& p) {
  if (!p) return std::nullopt;
  return p->values();
}

TangentVariant make_variant(std::optional<int> i0, std::optional<Vector> xi, const ProjectionFamily& fam) {
  if (!i0) return DistinguishedP0{};
  return DistinguishedBlock{*i0, xi ? *xi : Vector(fam.frame(*i0).col(0))};
}

}  // namespace

PYBIND11_MODULE(_pinchlab, m) {
  m.doc() = "Unitary orbits of pinching operators: norms, orbit geometry and quotient Finsler metric.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
#define PINCHLAB_PY_ERROR(Name) py::register_exception<Name>(m, #Name, error.ptr());
  PINCHLAB_PY_ERROR(InvalidArgument)
  PINCHLAB_PY_ERROR(DimensionMismatch)
  PINCHLAB_PY_ERROR(DimensionTooLarge)
  PINCHLAB_PY_ERROR(DimensionTooSmall)
  PINCHLAB_PY_ERROR(SingularFactor)
  PINCHLAB_PY_ERROR(LogBranchFailure)
  PINCHLAB_PY_ERROR(InvalidNorm)
  PINCHLAB_PY_ERROR(NotOrthogonal)
  PINCHLAB_PY_ERROR(OverComplete)
  PINCHLAB_PY_ERROR(BadVariant)
  PINCHLAB_PY_ERROR(RankMismatch)
  PINCHLAB_PY_ERROR(FiberTooLarge)
  PINCHLAB_PY_ERROR(NotNormal)
  PINCHLAB_PY_ERROR(IndexOutOfRange)
  PINCHLAB_PY_ERROR(ConfigError)
  PINCHLAB_PY_ERROR(IoError)
#undef PINCHLAB_PY_ERROR

  // linalg
  m.def("singular_values", &singular_values, py::arg("m"));
  m.def(
      "polar",
      [](const Matrix& a, double tol) {
        const Polar p = polar(a, tol);
        return py::make_tuple(p.unitary.matrix(), p.modulus);
      },
      py::arg("m"), py::arg("tol_singular") = kTolSingular, "Returns (unitary, modulus) with m = unitary @ modulus.");
  m.def(
      "expm_skew", [](const Matrix& z) { return expm_skew(SkewHermitian(z, 1e-10)).matrix(); }, py::arg("z"));
  m.def(
      "logm_unitary", [](const Matrix& u, double tol) { return logm_unitary(UnitaryMatrix(u, 1e-10), tol).matrix(); },
      py::arg("u"), py::arg("tol_log_gap") = kTolLogGap);

  // norms
  py::class_<SymmetricNorm>(m, "SymmetricNorm")
      .def_static("parse", &SymmetricNorm::parse, py::arg("spec"))
      .def_static("op", &SymmetricNorm::op)
      .def_static("schatten", &SymmetricNorm::schatten, py::arg("p"))
      .def_static("ky_fan", &SymmetricNorm::ky_fan, py::arg("k"))
      .def_property_readonly("name", &SymmetricNorm::name)
      .def("__repr__", [](const SymmetricNorm& n) { return "SymmetricNorm('" + n.name() + "')"; });
  m.def("builtin_norms", &builtin_norms);
  m.def(
      "phi_eval", [](const SymmetricNorm& n, const std::vector<double>& s) { return phi_eval(n, s); }, py::arg("norm"),
      py::arg("seq"));
  m.def("ideal_norm", &ideal_norm, py::arg("norm"), py::arg("m"));
  m.def("phi_counting", &phi_counting, py::arg("norm"), py::arg("k"));

  // pinching
  py::class_<ProjectionFamily>(m, "ProjectionFamily")
      .def(py::init([](Eigen::Index dim, std::vector<Matrix> frames, double tol) {
             return ProjectionFamily::make(dim, std::move(frames), tol);
           }),
           py::arg("dim"), py::arg("frames"), py::arg("tol") = kTolConstruct)
      .def_static(
          "coordinate", [](Eigen::Index dim, const std::vector<int>& sizes) { return ProjectionFamily::coordinate(dim, sizes); },
          py::arg("dim"), py::arg("sizes"))
      .def_property_readonly("dim", &ProjectionFamily::dim)
      .def_property_readonly("block_count", &ProjectionFamily::block_count)
      .def_property_readonly("p0_rank", &ProjectionFamily::p0_rank)
      .def("rank", &ProjectionFamily::rank, py::arg("i"))
      .def("projector", &ProjectionFamily::projector, py::arg("i"))
      .def("frame", &ProjectionFamily::block_frame, py::arg("i"))
      .def(
          "conjugated", [](const ProjectionFamily& f, const Matrix& u) { return f.conjugated(UnitaryMatrix(u, 1e-10)); },
          py::arg("u"));
  m.def("pinch", &pinch, py::arg("fam"), py::arg("x"));

  py::class_<SuperOperator>(m, "SuperOperator")
      .def_static("identity", &SuperOperator::identity, py::arg("n"))
      .def_static("zero", &SuperOperator::zero, py::arg("n"))
      .def_static("left", &SuperOperator::left, py::arg("a"))
      .def_static("right", &SuperOperator::right, py::arg("a"))
      .def_static("pinch", &SuperOperator::pinch, py::arg("fam"))
      .def_property_readonly("dim", &SuperOperator::dim)
      .def("apply", &SuperOperator::apply, py::arg("y"))
      .def("adjoint", &SuperOperator::adjoint)
      .def("matricize", &SuperOperator::matricize)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def("__mul__", [](const SuperOperator& a, const SuperOperator& b) { return a * b; })
      .def("__mul__", [](const SuperOperator& a, Complex c) { return a * c; })
      .def("__rmul__", [](const SuperOperator& a, Complex c) { return a * c; });
  m.def("commutator_super", &commutator_super, py::arg("z"), py::arg("fam"));
  m.def("basis_discrepancy", &basis_discrepancy, py::arg("s"), py::arg("t"));
  m.def("super_norm_s2", &super_norm_s2, py::arg("s"), py::arg("max_dim") = 64);
  m.def(
      "super_norm_estimate",
      [](const SuperOperator& s, const SymmetricNorm& norm, int budget, std::uint64_t seed) {
        const NormEstimate e = super_norm_estimate(s, norm, budget, seed);
        return py::make_tuple(e.lower, e.witness);
      },
      py::arg("s"), py::arg("norm"), py::arg("budget") = 2, py::arg("seed") = 0,
      "Returns (lower, witness) with ||S(witness)|| = lower ||witness||.");

  py::class_<OrbitPoint>(m, "OrbitPoint")
      .def_static("at_base", &OrbitPoint::at_base, py::arg("base"))
      .def_static(
          "from_unitary",
          [](const ProjectionFamily& base, const Matrix& u) { return OrbitPoint::from_unitary(base, UnitaryMatrix(u, 1e-10)); },
          py::arg("base"), py::arg("u"))
      .def_property_readonly("base", &OrbitPoint::base)
      .def_property_readonly("conjugated", &OrbitPoint::conjugated)
      .def_property_readonly("witness",
                             [](const OrbitPoint& q) -> std::optional<Matrix> {
                               if (!q.witness()) return std::nullopt;
                               return q.witness()->matrix();
                             })
      .def("as_super", &OrbitPoint::as_super);
  m.def(
      "pinching_equal",
      [](const ProjectionFamily& a, const ProjectionFamily& b, double tol) {
        return permutation_values(pinching_equal(a, b, tol));
      },
      py::arg("a"), py::arg("b"), py::arg("tol") = 1e-8,
      "Permutation [0, sigma(1), ...] with p_i = q_sigma(i), or None.");

  // orbit geometry
  m.def(
      "in_isotropy_G",
      [](const ProjectionFamily& fam, const Matrix& u, double tol) { return in_isotropy_G(fam, UnitaryMatrix(u, 1e-10), tol); },
      py::arg("fam"), py::arg("u"), py::arg("tol") = 1e-9);
  m.def(
      "in_isotropy_H",
      [](const ProjectionFamily& fam, const Matrix& u, double tol) {
        return permutation_values(in_isotropy_H(fam, UnitaryMatrix(u, 1e-10), tol));
      },
      py::arg("fam"), py::arg("u"), py::arg("tol") = kTolProjectionMatch);
  m.def(
      "tangent_generator",
      [](const ProjectionFamily& fam, const SuperOperator& s, std::optional<int> i0, std::optional<Vector> xi) {
        return tangent_generator(fam, s, make_variant(i0, std::move(xi), fam)).matrix();
      },
      py::arg("fam"), py::arg("s"), py::arg("i0") = std::nullopt, py::arg("xi") = std::nullopt,
      "Generator of the tangent projection; i0 = None distinguishes the complement block.");
  m.def(
      "tangent_project",
      [](const ProjectionFamily& fam, const SuperOperator& s, std::optional<int> i0, std::optional<Vector> xi) {
        return tangent_project(fam, s, make_variant(i0, std::move(xi), fam)).as_super;
      },
      py::arg("fam"), py::arg("s"), py::arg("i0") = std::nullopt, py::arg("xi") = std::nullopt);
  m.def("f_map", &f_map, py::arg("fam"), py::arg("i"), py::arg("q"));
  m.def(
      "cross_section",
      [](const ProjectionFamily& fam, const OrbitPoint& q, double tol) { return cross_section(fam, q, tol).matrix(); },
      py::arg("fam"), py::arg("q"), py::arg("tol_singular") = kTolSingular);
  m.def(
      "permutation_operator",
      [](const ProjectionFamily& fam, const std::vector<int>& sigma) {
        return permutation_operator(fam, BlockPermutation::make(sigma, fam)).matrix();
      },
      py::arg("fam"), py::arg("sigma"));
  m.def("fiber_size", &fiber_size, py::arg("fam"), py::arg("cap") = kFiberCap);
  m.def(
      "fiber", [](const ProjectionFamily& fam, const OrbitPoint& q, std::size_t cap) { return fiber(fam, q, cap); },
      py::arg("fam"), py::arg("q"), py::arg("cap") = kFiberCap);

  // quotient metric
  m.def(
      "quotient_norm",
      [](const ProjectionFamily& fam, const Matrix& z, const SymmetricNorm& norm) {
        const QuotientNormResult r = quotient_norm(fam, SkewHermitian(z, 1e-10), norm);
        py::dict d;
        d["value"] = r.value;
        d["minimizer"] = r.minimizer.matrix();
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("fam"), py::arg("z"), py::arg("norm"));
  m.def("orbit_gap_s2", &orbit_gap_s2, py::arg("a"), py::arg("b"));
  m.def(
      "distance_bounds",
      [](const ProjectionFamily& fam, const OrbitPoint& q, const SymmetricNorm& norm, int restarts) {
        SolverConfig cfg;
        cfg.restarts = restarts;
        const DistanceBounds d = distance_bounds(fam, q, norm, cfg);
        return py::make_tuple(d.lower, d.upper);
      },
      py::arg("fam"), py::arg("q"), py::arg("norm"), py::arg("restarts") = 1, "Returns (lower, upper).");

  // normal orbits
  m.def(
      "spectral_family",
      [](const Matrix& a) {
        const NormalOperatorSpec s = spectral_family(a);
        py::dict d;
        d["eigenvalues"] = s.eigenvalues;
        d["multiplicities"] = s.multiplicities;
        d["kernel_rank"] = s.kernel_rank;
        d["family"] = s.fam;
        return d;
      },
      py::arg("a"));
  m.def(
      "swap_table",
      [](const std::vector<Complex>& eigenvalues, const SymmetricNorm& norm) {
        const std::vector<int> ones(eigenvalues.size(), 1);
        py::list rows;
        for (const auto& r : swap_table(diagonal_spec(eigenvalues, ones), norm)) {
          py::dict d;
          d["n"] = r.n;
          d["gap"] = r.gap;
          d["a_disp_op"] = r.a_disp_op;
          d["a_disp_phi"] = r.a_disp_phi;
          d["p_disp_lower"] = r.p_disp_lower;
          d["p_disp_s2"] = r.p_disp_s2;
          rows.append(d);
        }
        return rows;
      },
      py::arg("eigenvalues"), py::arg("norm"), "Swap sequence rows for diag(eigenvalues) with rank-one blocks.");
  m.def(
      "topology_gap_table",
      [](const SymmetricNorm& norm, int k_max) {
        const TopologyTable t = topology_gap_table(norm, k_max, ZkScenario::GrowingW);
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict d;
          d["k"] = r.k;
          d["z_op"] = r.z_op;
          d["z_phi"] = r.z_phi;
          d["displacement"] = r.displacement;
          d["bound"] = r.bound;
          d["bound_closed"] = r.bound_closed;
          rows.append(d);
        }
        return py::make_tuple(rows, t.degenerate);
      },
      py::arg("norm"), py::arg("k_max"), "Returns (rows, degenerate).");

  // experiments
  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& settings) {
        ConfigMap cm;
        for (const auto& [k, v] : settings) cm[k] = {v, 0};
        const ExperimentConfig cfg = build_config({cm});
        return emit(run(cfg), cfg.format);
      },
      py::arg("settings") = std::map<std::string, std::string>{},
      "Runs a CLI command from key=value settings and returns the JSON or CSV report.");
}
