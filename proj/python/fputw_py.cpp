#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fputw/checkpoint.hpp"
#include "fputw/diatomic.hpp"
#include "fputw/dispersion.hpp"
#include "fputw/errors.hpp"
#include "fputw/lattice.hpp"
#include "fputw/monatomic.hpp"

namespace py = pybind11;
using namespace fputw;

namespace {

// Evaluates one component of a piecewise solution on an array of points.
py::array_t<double> sample(const PiecewiseSolution& s, int component, py::array_t<double> t) {
  auto in = t.unchecked<1>();
  py::array_t<double> out(in.shape(0));
  auto o = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < in.shape(0); ++i) o(i) = s.value(component, in(i));
  return out;
}

}  // namespace

PYBIND11_MODULE(_fputw, m) {
  m.doc() = "Collocation solvers and lattice simulation for traveling waves in FPUT lattices";
  m.attr("__version__") = "1.0.0";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ContractViolation>(m, "ContractViolation", error.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", error.ptr());
  py::register_exception<NoBracket>(m, "NoBracket", error.ptr());
  py::register_exception<NonFinite>(m, "NonFinite", error.ptr());
  py::register_exception<CheckpointError>(m, "CheckpointError", error.ptr());

  py::class_<NewtonReport>(m, "NewtonReport")
      .def_readonly("iterations", &NewtonReport::iterations)
      .def_readonly("residual", &NewtonReport::residual)
      .def_readonly("history", &NewtonReport::history);

  py::class_<PiecewiseSolution>(m, "PiecewiseSolution")
      .def_property_readonly("components", &PiecewiseSolution::components)
      .def_property_readonly("length", [](const PiecewiseSolution& s) { return s.mesh().length(); })
      .def("value", &PiecewiseSolution::value, py::arg("component"), py::arg("t"))
      .def("sample", &sample, py::arg("component"), py::arg("t"))
      .def("sup_norm", &PiecewiseSolution::sup_norm, py::arg("component"));

  // dispersion
  auto disp = m.def_submodule("dispersion", "Linear dispersion relation of the diatomic lattice");
  py::enum_<dispersion::Branch>(disp, "Branch")
      .value("Minus", dispersion::Branch::Minus)
      .value("Plus", dispersion::Branch::Plus);
  py::class_<dispersion::CriticalMode>(disp, "CriticalMode")
      .def_readonly("omega", &dispersion::CriticalMode::omega)
      .def_readonly("nu1", &dispersion::CriticalMode::nu1)
      .def_readonly("nu2", &dispersion::CriticalMode::nu2);
  disp.def("sound_speed", &dispersion::sound_speed, py::arg("mu"));
  disp.def("lambda_pm", &dispersion::lambda_pm, py::arg("omega"), py::arg("mu"), py::arg("branch"));
  disp.def("b_pm", &dispersion::b_pm, py::arg("omega"), py::arg("c"), py::arg("mu"), py::arg("branch"));
  disp.def("b_plus_prime", &dispersion::b_plus_prime, py::arg("omega"), py::arg("c"), py::arg("mu"));
  disp.def("critical_frequency", &dispersion::critical_frequency, py::arg("c"), py::arg("mu"));
  disp.def("jost_frequency", &dispersion::jost_frequency, py::arg("sigma"));

  // monatomic
  auto mono = m.def_submodule("monatomic", "Monatomic solitary waves, Jost solutions and K_sigma");
  py::class_<monatomic::SolverOptions>(mono, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("length", &monatomic::SolverOptions::length)
      .def_readwrite("intervals", &monatomic::SolverOptions::intervals)
      .def_readwrite("gauss", &monatomic::SolverOptions::gauss);
  py::class_<monatomic::MonatomicWave>(mono, "MonatomicWave")
      .def_readonly("kappa", &monatomic::MonatomicWave::kappa)
      .def_readonly("sigma", &monatomic::MonatomicWave::sigma)
      .def_readonly("phi", &monatomic::MonatomicWave::phi)
      .def_readonly("report", &monatomic::MonatomicWave::report);
  py::class_<monatomic::JostSolution>(mono, "JostSolution")
      .def_readonly("kappa", &monatomic::JostSolution::kappa)
      .def_readonly("omega", &monatomic::JostSolution::omega)
      .def_readonly("theta", &monatomic::JostSolution::theta)
      .def_readonly("beta", &monatomic::JostSolution::beta)
      .def_readonly("system", &monatomic::JostSolution::system)
      .def("gamma", &monatomic::JostSolution::gamma, py::arg("xi"));
  py::class_<monatomic::AmplitudeCoefficient>(mono, "AmplitudeCoefficient")
      .def_readonly("I_eta", &monatomic::AmplitudeCoefficient::I_eta)
      .def_readonly("I_chi", &monatomic::AmplitudeCoefficient::I_chi)
      .def_readonly("K", &monatomic::AmplitudeCoefficient::K)
      .def_readonly("monitor_residual", &monatomic::AmplitudeCoefficient::monitor_residual)
      .def_readonly("reliable", &monatomic::AmplitudeCoefficient::reliable);
  mono.def(
      "solve_profile", [](double kappa, const monatomic::SolverOptions& o) { return monatomic::solve_profile(kappa, o); },
      py::arg("kappa"), py::arg("options") = monatomic::SolverOptions{});
  mono.def(
      "solve_jost",
      [](const monatomic::MonatomicWave& w, const monatomic::SolverOptions& o) { return monatomic::solve_jost(w, o); },
      py::arg("wave"), py::arg("options") = monatomic::SolverOptions{});
  mono.def("amplitude_coefficient", &monatomic::amplitude_coefficient, py::arg("jost"), py::arg("kappa"),
           py::arg("points") = 1000000, py::arg("strict") = false);

  // diatomic
  auto dia = m.def_submodule("diatomic", "Diatomic waves with nonlocal ripples");
  py::enum_<diatomic::FixedParam>(dia, "FixedParam")
      .value("Sigma", diatomic::FixedParam::Sigma)
      .value("Mu", diatomic::FixedParam::Mu)
      .value("BetaP", diatomic::FixedParam::BetaP);
  py::enum_<diatomic::RippleClass>(dia, "RippleClass")
      .value("Positive", diatomic::RippleClass::Positive)
      .value("Negative", diatomic::RippleClass::Negative)
      .value("SmallRipple", diatomic::RippleClass::SmallRipple)
      .value("Solitary", diatomic::RippleClass::Solitary);
  py::class_<diatomic::Options>(dia, "Options")
      .def(py::init<>())
      .def_readwrite("length", &diatomic::Options::length)
      .def_readwrite("intervals", &diatomic::Options::intervals)
      .def_readwrite("gauss", &diatomic::Options::gauss)
      .def_readwrite("size_cap", &diatomic::Options::size_cap);
  py::class_<diatomic::Scalars>(dia, "Scalars")
      .def_readonly("sigma", &diatomic::Scalars::sigma)
      .def_readonly("mu", &diatomic::Scalars::mu)
      .def_readonly("beta", &diatomic::Scalars::beta)
      .def_readonly("omega", &diatomic::Scalars::omega)
      .def_property_readonly("m", &diatomic::Scalars::m);
  py::class_<diatomic::PeriodicRipple>(dia, "PeriodicRipple")
      .def_readonly("scalars", &diatomic::PeriodicRipple::scalars)
      .def_readonly("p", &diatomic::PeriodicRipple::p);
  py::class_<diatomic::DiatomicWave>(dia, "DiatomicWave")
      .def_readonly("kappa", &diatomic::DiatomicWave::kappa)
      .def_readonly("scalars", &diatomic::DiatomicWave::scalars)
      .def_readonly("system", &diatomic::DiatomicWave::system)
      .def_readonly("alpha", &diatomic::DiatomicWave::alpha)
      .def_readonly("cls", &diatomic::DiatomicWave::cls)
      .def_readonly("report", &diatomic::DiatomicWave::report);
  dia.def(
      "solve_periodic",
      [](double sigma, double mu, double beta, const diatomic::Options& o) {
        return diatomic::solve_periodic(sigma, mu, beta, o);
      },
      py::arg("sigma"), py::arg("mu"), py::arg("beta"), py::arg("options") = diatomic::Options{});
  dia.def("ripple_frequency", &diatomic::ripple_frequency, py::arg("ripple"));
  dia.def("seed_from_monatomic", &diatomic::seed_from_monatomic, py::arg("wave"),
          py::arg("options") = diatomic::Options{});
  dia.def(
      "solve_wave",
      [](double kappa, diatomic::FixedParam fixed, double value, const diatomic::DiatomicWave& guess,
         const diatomic::Options& o) { return diatomic::solve_wave(kappa, fixed, value, guess, o); },
      py::arg("kappa"), py::arg("fixed"), py::arg("value"), py::arg("guess"), py::arg("options") = diatomic::Options{});
  dia.def("wave_residual", &diatomic::wave_residual, py::arg("wave"), py::arg("refine") = 1);
  dia.def("symmetry_transform", &diatomic::symmetry_transform, py::arg("wave"));
  dia.def("alpha_threshold", &diatomic::alpha_threshold, py::arg("kappa"));

  // lattice
  auto lat = m.def_submodule("lattice", "RK4 integration of the FPUT lattice with core-loss diagnostics");
  py::class_<lattice::LatticeState>(lat, "LatticeState")
      .def(py::init<int, double>(), py::arg("sites"), py::arg("mass"))
      .def_readwrite("r", &lattice::LatticeState::r)
      .def_readwrite("p", &lattice::LatticeState::p)
      .def_readwrite("mass", &lattice::LatticeState::mass)
      .def_readwrite("t", &lattice::LatticeState::t)
      .def("__len__", &lattice::LatticeState::size);
  py::class_<lattice::SimConfig>(lat, "SimConfig")
      .def(py::init<>())
      .def_readwrite("dt", &lattice::SimConfig::dt)
      .def_readwrite("horizon", &lattice::SimConfig::horizon)
      .def_readwrite("recenter_period", &lattice::SimConfig::recenter_period)
      .def_readwrite("sample_stride", &lattice::SimConfig::sample_stride)
      .def_readwrite("baseline_time", &lattice::SimConfig::baseline_time);
  py::class_<lattice::DiagnosticRow>(lat, "DiagnosticRow")
      .def_readonly("t", &lattice::DiagnosticRow::t)
      .def_readonly("energy_full", &lattice::DiagnosticRow::energy_full)
      .def_readonly("energy_core", &lattice::DiagnosticRow::energy_core)
      .def_readonly("gamma_core", &lattice::DiagnosticRow::gamma_core)
      .def_readonly("outer_amplitude", &lattice::DiagnosticRow::outer_amplitude)
      .def_readonly("alarm", &lattice::DiagnosticRow::alarm);
  py::class_<lattice::DiagnosticSeries>(lat, "DiagnosticSeries")
      .def_readonly("rows", &lattice::DiagnosticSeries::rows)
      .def_readonly("alarms", &lattice::DiagnosticSeries::alarms)
      .def("gamma_at", &lattice::DiagnosticSeries::gamma_at, py::arg("t"));
  lat.def("rk4_step", &lattice::rk4_step, py::arg("state"), py::arg("dt"));
  lat.def("energy", py::overload_cast<const lattice::LatticeState&>(&lattice::energy), py::arg("state"));
  lat.def("energy", py::overload_cast<const lattice::LatticeState&, int, int>(&lattice::energy), py::arg("state"),
          py::arg("first"), py::arg("last"));
  lat.def("window_factor", &lattice::window_factor, py::arg("i"), py::arg("onset") = 300, py::arg("width") = 100);
  lat.def(
      "sample_wave",
      [](const diatomic::DiatomicWave& w, int sites, int peak) { return lattice::sample_initial_condition(w, sites, peak); },
      py::arg("wave"), py::arg("sites") = 400, py::arg("peak") = 200);
  lat.def(
      "sample_monatomic",
      [](const monatomic::MonatomicWave& w, int sites, int peak) {
        const double k = w.kappa;
        const PiecewiseSolution phi = w.phi;
        return lattice::sample_initial_condition([phi, k](double xi) { return k * k * phi.value(0, k * xi); }, w.sigma,
                                                 sites, peak);
      },
      py::arg("wave"), py::arg("sites") = 400, py::arg("peak") = 200);
  lat.def(
      "run_simulation",
      [](const lattice::LatticeState& s, const lattice::SimConfig& cfg) {
        py::gil_scoped_release release;
        return lattice::run_simulation(s, cfg);
      },
      py::arg("state"), py::arg("config") = lattice::SimConfig{});

  // checkpoints
  auto io = m.def_submodule("io", "Text checkpoints");
  io.def("save_monatomic", [](const std::string& path, const monatomic::MonatomicWave& w) { io::save(path, w); });
  io.def("save_diatomic", [](const std::string& path, const diatomic::DiatomicWave& w) { io::save(path, w); });
  io.def("load_monatomic", [](const std::string& path) { return io::monatomic_from_text(io::read_file(path)); });
  io.def("load_diatomic", [](const std::string& path) { return io::diatomic_from_text(io::read_file(path)); });
}
