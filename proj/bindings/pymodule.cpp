#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "epicon/analysis.hpp"
#include "epicon/dynamics.hpp"
#include "epicon/io.hpp"
#include "epicon/model.hpp"
#include "epicon/pmp.hpp"
#include "epicon/solver.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace epicon;

namespace {

SolveMethod parse_method(const std::string& name) {
  if (name == "fbsm") return SolveMethod::fbsm;
  if (name == "pg") return SolveMethod::projected_gradient;
  throw ValidationError("unknown method \"" + name + "\" (expected fbsm or pg)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "optimal control of compartmental epidemic models";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<GridMismatch>(m, "GridMismatch", base);
  py::register_exception<NonFiniteState>(m, "NonFiniteState", base);
  py::register_exception<LinearCostUnsupported>(m, "LinearCostUnsupported", base);
  py::register_exception<IOError>(m, "IOError", base);

  py::enum_<SolveMethod>(m, "SolveMethod")
      .value("fbsm", SolveMethod::fbsm)
      .value("projected_gradient", SolveMethod::projected_gradient);
  py::enum_<ArcLabel>(m, "ArcLabel")
      .value("zero", ArcLabel::zero)
      .value("max", ArcLabel::max)
      .value("singular", ArcLabel::singular)
      .value("interior", ArcLabel::interior);
  py::enum_<SingularFill>(m, "SingularFill")
      .value("zero", SingularFill::zero)
      .value("max", SingularFill::max)
      .value("hold_previous", SingularFill::hold_previous);

  py::class_<EpidemicModel>(m, "EpidemicModel")
      .def(py::init<>())
      .def_readwrite("n", &EpidemicModel::n)
      .def_readwrite("M", &EpidemicModel::M)
      .def_readwrite("sigma", &EpidemicModel::sigma)
      .def_readwrite("mu", &EpidemicModel::mu)
      .def_readwrite("rho", &EpidemicModel::rho)
      .def_readwrite("beta_bar", &EpidemicModel::beta_bar)
      .def_readwrite("u_bar", &EpidemicModel::u_bar);

  py::class_<InitialState>(m, "InitialState")
      .def(py::init<>())
      .def_readwrite("s0", &InitialState::s0)
      .def_readwrite("x0", &InitialState::x0)
      .def_readwrite("r0", &InitialState::r0);

  py::class_<CostSpec>(m, "CostSpec")
      .def(py::init<>())
      .def_readwrite("w", &CostSpec::w)
      .def_readwrite("rexp", &CostSpec::rexp)
      .def_readwrite("C", &CostSpec::C)
      .def_readwrite("q", &CostSpec::q)
      .def("all_superlinear", &CostSpec::all_superlinear)
      .def("any_linear", &CostSpec::any_linear);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("model", &Scenario::model)
      .def_readwrite("init", &Scenario::init)
      .def_readwrite("cost", &Scenario::cost)
      .def_readwrite("t_f", &Scenario::t_f)
      .def_readwrite("grid_points", &Scenario::grid_points);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("ok", &ValidationReport::ok)
      .def_readonly("violations", &ValidationReport::violations);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("grid", &Trajectory::grid)
      .def_readonly("s", &Trajectory::s)
      .def_readonly("x", &Trajectory::x)
      .def_readonly("r", &Trajectory::r)
      .def_readonly("d", &Trajectory::d);

  py::class_<ControlTrajectory>(m, "ControlTrajectory")
      .def(py::init<>())
      .def_readwrite("grid", &ControlTrajectory::grid)
      .def_readwrite("u", &ControlTrajectory::u);

  py::class_<CostateTrajectory>(m, "CostateTrajectory")
      .def_readonly("grid", &CostateTrajectory::grid)
      .def_readonly("p_s", &CostateTrajectory::p_s)
      .def_readonly("p_x", &CostateTrajectory::p_x)
      .def_readonly("p_r", &CostateTrajectory::p_r)
      .def_readonly("eta", &CostateTrajectory::eta)
      .def_readonly("Psi", &CostateTrajectory::Psi)
      .def_readonly("psi_norm", &CostateTrajectory::psi_norm);

  py::class_<EpidemicMetrics>(m, "EpidemicMetrics")
      .def_readonly("peak_infected", &EpidemicMetrics::peak_infected)
      .def_readonly("peak_time", &EpidemicMetrics::peak_time)
      .def_readonly("final_susceptible", &EpidemicMetrics::final_susceptible)
      .def_readonly("total_deceased", &EpidemicMetrics::total_deceased);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("method", &SolverConfig::method)
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("tol_rel", &SolverConfig::tol_rel)
      .def_readwrite("omega", &SolverConfig::omega)
      .def_readwrite("step0", &SolverConfig::step0)
      .def_readwrite("armijo_c", &SolverConfig::armijo_c)
      .def_readwrite("armijo_shrink", &SolverConfig::armijo_shrink)
      .def_readwrite("smoothing_eps_schedule", &SolverConfig::smoothing_eps_schedule);

  py::class_<LabeledInterval>(m, "LabeledInterval")
      .def_readonly("t_a", &LabeledInterval::t_a)
      .def_readonly("t_b", &LabeledInterval::t_b)
      .def_readonly("k_a", &LabeledInterval::k_a)
      .def_readonly("k_b", &LabeledInterval::k_b)
      .def_readonly("label", &LabeledInterval::label);

  py::class_<ControlStructure>(m, "ControlStructure")
      .def_readonly("intervals", &ControlStructure::intervals)
      .def_readonly("switch_times", &ControlStructure::switch_times)
      .def_readonly("sequence_string", &ControlStructure::sequence_string);

  py::class_<ArcInterval>(m, "ArcInterval")
      .def(py::init<>())
      .def_readwrite("component", &ArcInterval::component)
      .def_readwrite("k_a", &ArcInterval::k_a)
      .def_readwrite("k_b", &ArcInterval::k_b)
      .def_readwrite("t_a", &ArcInterval::t_a)
      .def_readwrite("t_b", &ArcInterval::t_b);

  py::class_<ArcDiagnostics>(m, "ArcDiagnostics")
      .def_readonly("applicable", &ArcDiagnostics::applicable)
      .def_readonly("reason", &ArcDiagnostics::reason)
      .def_readonly("feedback_residual_max", &ArcDiagnostics::feedback_residual_max)
      .def_readonly("x_monotone_decreasing", &ArcDiagnostics::x_monotone_decreasing)
      .def_readonly("s_at_entry", &ArcDiagnostics::s_at_entry)
      .def_readonly("discontinuity_jump_at_entry", &ArcDiagnostics::discontinuity_jump_at_entry)
      .def_readonly("discontinuity_jump_at_exit", &ArcDiagnostics::discontinuity_jump_at_exit)
      .def_readonly("core_t_a", &ArcDiagnostics::core_t_a)
      .def_readonly("core_t_b", &ArcDiagnostics::core_t_b);

  py::class_<HamiltonianCheck>(m, "HamiltonianCheck")
      .def_readonly("k_expected", &HamiltonianCheck::k_expected)
      .def_readonly("max_deviation", &HamiltonianCheck::max_deviation);

  py::class_<FeedbackControl>(m, "FeedbackControl")
      .def_readonly("raw", &FeedbackControl::raw)
      .def_readonly("clamped", &FeedbackControl::clamped);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("u_opt", &SolveReport::u_opt)
      .def_readonly("traj", &SolveReport::traj)
      .def_readonly("costates", &SolveReport::costates)
      .def_readonly("cost_value", &SolveReport::cost_value)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("residual_history", &SolveReport::residual_history)
      .def_readonly("hamiltonian_deviation", &SolveReport::hamiltonian_deviation)
      .def_readonly("structure", &SolveReport::structure)
      .def("__repr__", [](const SolveReport& r) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "<SolveReport converged=%d iterations=%d cost=%.9g>",
                      r.converged ? 1 : 0, r.iterations, r.cost_value);
        return std::string(buf);
      });

  py::class_<BruteForceResult>(m, "BruteForceResult")
      .def_readonly("best_u", &BruteForceResult::best_u)
      .def_readonly("best_cost", &BruteForceResult::best_cost);

  py::class_<UniquenessResult>(m, "UniquenessResult")
      .def_readonly("max_pairwise_u_gap", &UniquenessResult::max_pairwise_u_gap);

  m.def("preset_names", [] { return preset_names(); });
  m.def("preset", &preset, "name"_a);
  m.def("validate_scenario", &validate_scenario, "scenario"_a);
  m.def("load_scenario", &load_scenario, "path"_a);
  m.def("save_scenario", &save_scenario, "scenario"_a, "path"_a);
  m.def("scenario_from_json_text", &scenario_from_json_text, "text"_a);
  m.def("scenario_to_json_text", &scenario_to_json_text, "scenario"_a);

  m.def("uniform_grid", &uniform_grid, "t_f"_a, "grid_points"_a);
  m.def("make_zero_control", &make_zero_control, "scenario"_a);
  m.def("make_constant_control", &make_constant_control, "scenario"_a, "value"_a);
  m.def("resample_control", &resample_control, "control"_a, "grid"_a);
  m.def("simulate_forward", &simulate_forward, "scenario"_a, "control"_a,
        py::call_guard<py::gil_scoped_release>());
  m.def("simulate_dense", &simulate_dense, "scenario"_a, "control"_a, "refine"_a,
        py::call_guard<py::gil_scoped_release>());
  m.def("epidemic_metrics", &epidemic_metrics, "trajectory"_a);
  m.def("mass_conservation_error", &mass_conservation_error, "trajectory"_a);

  m.def("integrate_adjoint", &integrate_adjoint, "scenario"_a, "trajectory"_a, "control"_a,
        py::call_guard<py::gil_scoped_release>());
  m.def("control_superlinear", &control_superlinear, "cost"_a, "eta"_a, "s"_a, "x"_a, "u_bar"_a);
  m.def("control_linear", [](const CostSpec& cost, const VectorXd& Psi, const VectorXd& u_bar,
                             SingularFill fill) { return control_linear(cost, Psi, u_bar, fill); },
        "cost"_a, "Psi"_a, "u_bar"_a, "singular_fill"_a = SingularFill::zero);
  m.def("feedback_singular_n1", &feedback_singular_n1, "model"_a, "cost"_a, "s"_a, "x"_a, "eta"_a);
  m.def("hamiltonian_constant_check", &hamiltonian_constant_check, "scenario"_a, "trajectory"_a,
        "control"_a, "costates"_a);

  m.def("cost_evaluate", &cost_evaluate, "scenario"_a, "trajectory"_a, "control"_a);
  m.def("gradient", &gradient, "scenario"_a, "trajectory"_a, "costates"_a, "control"_a);
  m.def("solve", [](const Scenario& sc, const SolverConfig& cfg) { return solve(sc, cfg); },
        "scenario"_a, "config"_a, py::call_guard<py::gil_scoped_release>());
  m.def("solve",
        [](const Scenario& sc, const std::string& method, double tol_rel, int max_iters) {
          SolverConfig cfg;
          cfg.method = parse_method(method);
          cfg.tol_rel = tol_rel;
          cfg.max_iters = max_iters;
          py::gil_scoped_release release;
          return solve(sc, cfg);
        },
        "scenario"_a, "method"_a = "fbsm", "tol_rel"_a = 1e-6, "max_iters"_a = 5000);
  m.def("brute_force_oracle", &brute_force_oracle, "scenario"_a, "pieces"_a, "levels"_a,
        py::call_guard<py::gil_scoped_release>());
  m.def("uniqueness_probe", &uniqueness_probe, "scenario"_a, "n_starts"_a, "t_f_short"_a,
        "seed"_a = 12345u, py::call_guard<py::gil_scoped_release>());

  m.def("classify_structure", &classify_structure, "control"_a, "u_bar"_a, "costates"_a, "cost"_a,
        "tol_label"_a = -1.0, "tol_sing"_a = -1.0);
  m.def("detect_singular_arcs", &detect_singular_arcs, "costates"_a, "cost"_a,
        "tol_sing"_a = -1.0);
  m.def("verify_singular_arc", &verify_singular_arc, "scenario"_a, "report"_a, "arc"_a);
  m.def("terminal_deactivation_check", &terminal_deactivation_check, "control"_a, "costates"_a,
        "cost"_a);

  py::list names;
  for (auto item : m.attr("__dict__").cast<py::dict>()) {
    const std::string name = py::str(item.first);
    if (!name.empty() && name[0] != '_') names.append(item.first);
  }
  m.attr("__all__") = names;
}
