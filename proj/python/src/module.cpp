#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bosetrap/basis.hpp"
#include "bosetrap/errors.hpp"
#include "bosetrap/perturbative.hpp"
#include "bosetrap/riccati.hpp"
#include "bosetrap/run_config.hpp"
#include "bosetrap/thermo.hpp"
#include "bosetrap/trap_config.hpp"

namespace py = pybind11;
using namespace bosetrap;

namespace {

MultiIndex to_index(const std::vector<int>& n) { return MultiIndex(n); }

}  // namespace

PYBIND11_MODULE(_bosetrap, m) {
  m.doc() = "Bogoliubov quasiparticle levels and condensate thermodynamics "
            "of a trapped Bose gas";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<EmptyBasisError>(m, "EmptyBasisError", error);
  py::register_exception<IndexTooLargeError>(m, "IndexTooLargeError", error);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", error);
  py::register_exception<ComplexSpectrumError>(m, "ComplexSpectrumError", error);
  py::register_exception<NoSolutionError>(m, "NoSolutionError", error);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error);
  py::register_exception<DomainError>(m, "DomainError", error);

  py::class_<TrapConfig>(m, "TrapConfig")
      .def(py::init<>())
      .def_readwrite("dimension", &TrapConfig::dimension)
      .def_readwrite("omega", &TrapConfig::omega)
      .def_readwrite("mass", &TrapConfig::mass)
      .def_readwrite("hbar", &TrapConfig::hbar)
      .def_readwrite("g", &TrapConfig::g)
      .def_readwrite("n_particles", &TrapConfig::n_particles)
      .def("mean_omega", &TrapConfig::mean_omega)
      .def("min_omega", &TrapConfig::min_omega)
      .def("validate", [](const TrapConfig& c) { validate(c); });

  py::class_<BasisSet>(m, "BasisSet")
      .def_property_readonly("states",
                             [](const BasisSet& b) {
                               std::vector<std::vector<int>> out;
                               for (const auto& s : b.states) out.push_back(s.values());
                               return out;
                             })
      .def_readonly("energies", &BasisSet::energies)
      .def_readonly("cutoff", &BasisSet::cutoff)
      .def("__len__", &BasisSet::size);

  py::class_<SystemMatrices>(m, "SystemMatrices")
      .def_readonly("energies", &SystemMatrices::energies)
      .def_readonly("coupling", &SystemMatrices::coupling)
      .def_readonly("source", &SystemMatrices::source)
      .def_readwrite("lambda_", &SystemMatrices::lambda)
      .def_readonly("n0", &SystemMatrices::n0)
      .def_readonly("basis", &SystemMatrices::basis)
      .def("energy_matrix", &SystemMatrices::energy_matrix)
      .def("__len__", &SystemMatrices::size);

  m.def("oscillator_energy",
        [](const std::vector<int>& n, const TrapConfig& c) {
          return oscillator_energy(to_index(n), c);
        });
  m.def("enumerate_basis", &enumerate_basis, py::arg("cfg"), py::arg("e_cut"));
  m.def("interaction_prefactor", &interaction_prefactor);
  m.def("coupling_coefficient",
        [](const std::vector<int>& a, const std::vector<int>& b, const TrapConfig& c) {
          return coupling_coefficient(to_index(a), to_index(b), c);
        });
  m.def("source_coefficient", [](const std::vector<int>& n, const TrapConfig& c) {
    return source_coefficient(to_index(n), c);
  });
  m.def("build_matrices", &build_matrices, py::arg("basis"), py::arg("cfg"),
        py::arg("n0"));
  m.def("build_matrices_at_lambda", &build_matrices_at_lambda, py::arg("basis"),
        py::arg("cfg"), py::arg("lambda_"));

  py::class_<PerturbativeXY>(m, "PerturbativeXY")
      .def_readonly("x", &PerturbativeXY::x)
      .def_readonly("y", &PerturbativeXY::y)
      .def_readonly("chi", &PerturbativeXY::chi)
      .def_readonly("upsilon", &PerturbativeXY::upsilon)
      .def_readonly("upsilon1", &PerturbativeXY::upsilon1);

  m.def("shift_vector", &shift_vector, py::arg("sys"), py::arg("n0"));
  m.def("perturbative_xy", &perturbative_xy);
  m.def("spectrum_matrix", &spectrum_matrix, py::arg("sys"), py::arg("order") = 1);
  m.def("first_order_levels", &first_order_levels);
  m.def("quasiparticle_levels", &quasiparticle_levels, py::arg("m"),
        py::arg("tol_imag") = kDefaultImagTol);
  m.def("constraint_residual", &constraint_residual);

  py::enum_<RiccatiAnsatz>(m, "RiccatiAnsatz")
      .value("GENERAL", RiccatiAnsatz::kGeneral)
      .value("SYMMETRIC", RiccatiAnsatz::kSymmetric);

  py::class_<RiccatiOptions>(m, "RiccatiOptions")
      .def(py::init<>())
      .def_readwrite("tol", &RiccatiOptions::tol)
      .def_readwrite("max_iter", &RiccatiOptions::max_iter)
      .def_readwrite("ansatz", &RiccatiOptions::ansatz)
      .def_readwrite("fd_step", &RiccatiOptions::fd_step)
      .def_readwrite("dense_jacobian_limit", &RiccatiOptions::dense_jacobian_limit);

  py::class_<RiccatiProblem>(m, "RiccatiProblem")
      .def(py::init([](Eigen::MatrixXd a, Eigen::MatrixXd b) {
             return RiccatiProblem{std::move(a), std::move(b)};
           }),
           py::arg("a"), py::arg("b"))
      .def_static("from_system", &RiccatiProblem::from_system)
      .def_readonly("a", &RiccatiProblem::a)
      .def_readonly("b", &RiccatiProblem::b);

  py::class_<RiccatiResiduals>(m, "RiccatiResiduals")
      .def_readonly("r1", &RiccatiResiduals::r1)
      .def_readonly("r2", &RiccatiResiduals::r2)
      .def_readonly("r3", &RiccatiResiduals::r3)
      .def("max", &RiccatiResiduals::max);

  py::class_<RiccatiSolution>(m, "RiccatiSolution")
      .def_readonly("x", &RiccatiSolution::x)
      .def_readonly("y", &RiccatiSolution::y)
      .def_readonly("generator", &RiccatiSolution::generator)
      .def_readonly("residuals", &RiccatiSolution::residuals)
      .def_readonly("iterations", &RiccatiSolution::iterations)
      .def_readonly("converged", &RiccatiSolution::converged)
      .def_readonly("transpose_defect", &RiccatiSolution::transpose_defect)
      .def_readonly("constraint_history", &RiccatiSolution::constraint_history)
      .def_readonly("residual_history", &RiccatiSolution::residual_history);

  m.def("solve_1x1", &solve_1x1, py::arg("a"), py::arg("b"));
  m.def("solve_xy",
        py::overload_cast<const SystemMatrices&, const RiccatiOptions&>(&solve_xy),
        py::arg("sys"), py::arg("options") = RiccatiOptions{});
  m.def("solve_xy",
        [](const RiccatiProblem& p, const Eigen::MatrixXd& x0, const Eigen::MatrixXd& y0,
           const RiccatiOptions& o) { return solve_xy(p, x0, y0, o); },
        py::arg("problem"), py::arg("x0"), py::arg("y0"),
        py::arg("options") = RiccatiOptions{});
  m.def("exact_spectrum", &exact_spectrum, py::arg("sol"), py::arg("sys"),
        py::arg("tol_imag") = kDefaultImagTol);

  py::enum_<SolverKind>(m, "SolverKind")
      .value("PERTURBATIVE1", SolverKind::kPerturbative1)
      .value("PERTURBATIVE2", SolverKind::kPerturbative2)
      .value("RICCATI", SolverKind::kRiccati)
      .value("IDEAL", SolverKind::kIdeal);
  m.def("parse_solver_kind", [](const std::string& s) { return parse_solver_kind(s); });

  py::class_<ThermoPoint>(m, "ThermoPoint")
      .def_readonly("temperature", &ThermoPoint::temperature)
      .def_readonly("n0", &ThermoPoint::n0)
      .def_readonly("lambda_", &ThermoPoint::lambda)
      .def_readonly("levels", &ThermoPoint::levels)
      .def_readonly("energy_excess", &ThermoPoint::energy_excess)
      .def_readonly("iterations", &ThermoPoint::iterations)
      .def_readonly("converged", &ThermoPoint::converged)
      .def_readonly("normal_phase", &ThermoPoint::normal_phase)
      .def_readonly("fugacity", &ThermoPoint::fugacity)
      .def_readonly("error", &ThermoPoint::error);

  py::class_<ThermoCurve>(m, "ThermoCurve")
      .def_readonly("points", &ThermoCurve::points)
      .def_readonly("solver", &ThermoCurve::solver)
      .def_readonly("cutoff", &ThermoCurve::cutoff)
      .def("all_converged", &ThermoCurve::all_converged)
      .def("max_fraction_increase", &ThermoCurve::max_fraction_increase)
      .def("to_csv", [](const ThermoCurve& c) {
        std::ostringstream out;
        write_csv(c, out);
        return out.str();
      });

  m.def("occupation", &occupation, py::arg("eps"), py::arg("temperature"));
  m.def("excited_count", &excited_count, py::arg("levels"), py::arg("temperature"));
  m.def("energy_sum", &energy_sum, py::arg("levels"), py::arg("temperature"));
  m.def("solve_n0",
        py::overload_cast<const TrapConfig&, const BasisSet&, double, SolverKind, double>(
            &solve_n0),
        py::arg("cfg"), py::arg("basis"), py::arg("temperature"),
        py::arg("solver") = SolverKind::kPerturbative1, py::arg("tol") = 1e-10);
  m.def("sweep",
        [](const TrapConfig& cfg, const BasisSet& basis, const std::vector<double>& ts,
           SolverKind kind, double tol, bool parallel) {
          SweepOptions o;
          o.tol = tol;
          o.parallel = parallel;
          py::gil_scoped_release release;
          return sweep(cfg, basis, ts, kind, o);
        },
        py::arg("cfg"), py::arg("basis"), py::arg("temperatures"),
        py::arg("solver") = SolverKind::kPerturbative1, py::arg("tol") = 1e-10,
        py::arg("parallel") = false);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("trap", &RunConfig::trap)
      .def_readonly("e_cut", &RunConfig::e_cut)
      .def_readonly("t_min", &RunConfig::t_min)
      .def_readonly("t_max", &RunConfig::t_max)
      .def_readonly("t_step", &RunConfig::t_step)
      .def_readonly("solver", &RunConfig::solver)
      .def_readonly("tol", &RunConfig::tol)
      .def_readonly("output", &RunConfig::output_path)
      .def("temperature_grid", &RunConfig::temperature_grid);
  m.def("parse_config", [](const std::string& text) { return parse_config(text); });
  m.def("validation_checks", [](const RunConfig& c) {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const CheckResult& r : validation_checks(c)) out.emplace_back(r.name, r.passed, r.detail);
    return out;
  });
}
