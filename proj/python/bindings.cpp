#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "breakopt/analytic.hpp"
#include "breakopt/bvp.hpp"
#include "breakopt/experiment.hpp"
#include "breakopt/model.hpp"
#include "breakopt/transcription.hpp"

namespace py = pybind11;
using namespace breakopt;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Profit-maximizing production planning for a breakable, "
              "stock-stressed item: closed forms, a boundary-value solver "
              "and a direct-transcription optimizer.";

    py::class_<DemandPoly>(m, "DemandPoly")
        .def(py::init<double, double, double>(), py::arg("d1"), py::arg("d2"), py::arg("d3"))
        .def_readwrite("d1", &DemandPoly::d1)
        .def_readwrite("d2", &DemandPoly::d2)
        .def_readwrite("d3", &DemandPoly::d3);

    py::class_<HoldingCostLaw>(m, "HoldingCostLaw")
        .def(py::init<double, double, double>(), py::arg("a"), py::arg("b"), py::arg("n"))
        .def_readwrite("a", &HoldingCostLaw::a)
        .def_readwrite("b", &HoldingCostLaw::b)
        .def_readwrite("n", &HoldingCostLaw::n);

    py::class_<BreakabilityLaw>(m, "BreakabilityLaw")
        .def(py::init<double, double>(), py::arg("b1"), py::arg("gamma"))
        .def_readwrite("b1", &BreakabilityLaw::b1)
        .def_readwrite("gamma", &BreakabilityLaw::gamma);

    py::class_<EconomicParams>(m, "EconomicParams")
        .def(py::init<>())
        .def_readwrite("c10", &EconomicParams::c10)
        .def_readwrite("L", &EconomicParams::L)
        .def_readwrite("N", &EconomicParams::N)
        .def_readwrite("beta10", &EconomicParams::beta10)
        .def_readwrite("s1", &EconomicParams::s1)
        .def_readwrite("s2", &EconomicParams::s2)
        .def_readwrite("p", &EconomicParams::p)
        .def("development_cost", &EconomicParams::development_cost);

    py::class_<ModelInstance>(m, "ModelInstance")
        .def(py::init<>())
        .def_readwrite("demand", &ModelInstance::demand)
        .def_readwrite("holding", &ModelInstance::holding)
        .def_readwrite("breakage", &ModelInstance::breakage)
        .def_readwrite("econ", &ModelInstance::econ)
        .def_readwrite("T", &ModelInstance::T)
        .def("validate", &ModelInstance::validate)
        .def("control_cost_linear", &ModelInstance::control_cost_linear);

    m.def(
        "make_model",
        [](double L, double N, double c10, double beta10, double p, double s1, double s2,
           double a, double b, double n, double d1, double d2, double d3, double T, double b1,
           double gamma) {
            ModelInstance model;
            model.demand = {d1, d2, d3};
            model.holding = {a, b, n};
            model.breakage = {b1, gamma};
            model.econ.L = L;
            model.econ.N = N;
            model.econ.c10 = c10;
            model.econ.beta10 = beta10;
            model.econ.p = p;
            model.econ.s1 = s1;
            model.econ.s2 = s2;
            model.T = T;
            model.validate();
            return model;
        },
        py::arg("L"), py::arg("N"), py::arg("c10"), py::arg("beta10"), py::arg("p"),
        py::arg("s1"), py::arg("s2"), py::arg("a"), py::arg("b"), py::arg("n"), py::arg("d1"),
        py::arg("d2"), py::arg("d3"), py::arg("T"), py::arg("b1"), py::arg("gamma"),
        "Build and validate a model from the flat parameter set.");

    m.def("table1_model", &table1_model, py::arg("b1"),
          "Canonical published parameter set with the given breakability coefficient.");

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<>())
        .def_readwrite("times", &Trajectory::times)
        .def_readwrite("x", &Trajectory::x)
        .def_readwrite("u", &Trajectory::u)
        .def_readwrite("d", &Trajectory::d)
        .def("is_feasible", &Trajectory::is_feasible,
             py::arg("tol") = Trajectory::feasibility_tol)
        .def("validate_grid", &Trajectory::validate_grid);

    // model-core operations
    m.def("demand_at", &demand_at);
    m.def("holding_cost_at", &holding_cost_at);
    m.def("breakability_at", &breakability_at);
    m.def("production_cost_rate", &production_cost_rate);
    m.def("setup_cost_rate", &setup_cost_rate);
    m.def("state_rhs", &state_rhs);
    m.def("recover_control", &recover_control);
    m.def("profit_integrand", &profit_integrand);
    m.def("profit_of_trajectory", &profit_of_trajectory);
    m.def("dynamics_residual", &dynamics_residual);
    m.def("dynamics_residual_bound", &dynamics_residual_bound);

    // closed forms
    py::class_<Model1aCoefficients>(m, "Model1aCoefficients")
        .def_readonly("a11", &Model1aCoefficients::a11)
        .def_readonly("a22", &Model1aCoefficients::a22)
        .def_readonly("a33", &Model1aCoefficients::a33)
        .def_readonly("C11", &Model1aCoefficients::C11)
        .def_readonly("A1", &Model1aCoefficients::A1)
        .def_readonly("B1", &Model1aCoefficients::B1)
        .def_readonly("M1", &Model1aCoefficients::M1)
        .def_readonly("M2", &Model1aCoefficients::M2)
        .def_readonly("M3", &Model1aCoefficients::M3);
    py::class_<Model1bCoefficients>(m, "Model1bCoefficients")
        .def_readonly("A", &Model1bCoefficients::A)
        .def_readonly("B", &Model1bCoefficients::B);

    m.def("coefficients_1a", &coefficients_1a);
    m.def("x_1a", &x_1a);
    m.def("u_1a", &u_1a);
    m.def("profit_1a", &profit_1a);
    m.def("sample_1a", &sample_1a);
    m.def("coefficients_1b", &coefficients_1b);
    m.def("x_1b", &x_1b);
    m.def("u_1b", &u_1b);
    m.def("profit_1b", &profit_1b);
    m.def("sample_1b", &sample_1b);

    // boundary-value solver
    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<std::size_t, double>(), py::arg("intervals"), py::arg("T"))
        .def_readwrite("intervals", &GridSpec::intervals)
        .def_readwrite("T", &GridSpec::T);
    py::class_<NewtonSettings>(m, "NewtonSettings")
        .def(py::init<>())
        .def_readwrite("max_iters", &NewtonSettings::max_iters)
        .def_readwrite("residual_tol", &NewtonSettings::residual_tol)
        .def_readwrite("damping", &NewtonSettings::damping)
        .def_readwrite("regularization_eps", &NewtonSettings::regularization_eps);
    py::class_<BvpSolution>(m, "BvpSolution")
        .def_readonly("trajectory", &BvpSolution::trajectory)
        .def_readonly("final_residual", &BvpSolution::final_residual)
        .def_readonly("iterations", &BvpSolution::iterations)
        .def_readonly("converged", &BvpSolution::converged)
        .def_readonly("feasible", &BvpSolution::feasible)
        .def_readonly("regularization_active", &BvpSolution::regularization_active);
    py::class_<ConvergenceEntry>(m, "ConvergenceEntry")
        .def_readonly("intervals", &ConvergenceEntry::intervals)
        .def_readonly("max_error", &ConvergenceEntry::max_error);
    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("entries", &ConvergenceReport::entries)
        .def_readonly("observed_orders", &ConvergenceReport::observed_orders)
        .def_readonly("analytic_reference", &ConvergenceReport::analytic_reference);

    m.def("el_residual", &el_residual, py::arg("model"), py::arg("t"), py::arg("x"),
          py::arg("xddot"), py::arg("regularization_eps") = 0.0);
    m.def("solve_bvp", &solve_bvp, py::arg("model"), py::arg("grid"),
          py::arg("settings") = NewtonSettings{});
    m.def(
        "grid_convergence",
        [](const ModelInstance& model, const std::vector<GridSpec>& grids,
           const NewtonSettings& settings) { return grid_convergence(model, grids, settings); },
        py::arg("model"), py::arg("grids"), py::arg("settings") = NewtonSettings{});

    // direct transcription
    py::class_<StepRule>(m, "StepRule")
        .def(py::init<>())
        .def_readwrite("sufficient_decrease", &StepRule::sufficient_decrease)
        .def_readwrite("max_backtracks", &StepRule::max_backtracks);
    py::class_<TranscriptionSettings>(m, "TranscriptionSettings")
        .def(py::init<>())
        .def_readwrite("intervals", &TranscriptionSettings::intervals)
        .def_readwrite("max_iters", &TranscriptionSettings::max_iters)
        .def_readwrite("grad_tol", &TranscriptionSettings::grad_tol)
        .def_readwrite("terminal_penalty_schedule",
                       &TranscriptionSettings::terminal_penalty_schedule)
        .def_readwrite("step_rule", &TranscriptionSettings::step_rule);
    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("x", &SimulationResult::x)
        .def_readonly("floored", &SimulationResult::floored)
        .def_readonly("below_floor", &SimulationResult::below_floor);
    py::class_<OptimizationReport>(m, "OptimizationReport")
        .def_readonly("trajectory", &OptimizationReport::trajectory)
        .def_readonly("profit", &OptimizationReport::profit)
        .def_readonly("terminal_violation", &OptimizationReport::terminal_violation)
        .def_readonly("projected_gradient_norm", &OptimizationReport::projected_gradient_norm)
        .def_readonly("initial_gradient_norm", &OptimizationReport::initial_gradient_norm)
        .def_readonly("iterations", &OptimizationReport::iterations)
        .def_readonly("converged", &OptimizationReport::converged)
        .def_readonly("feasible", &OptimizationReport::feasible)
        .def_readonly("objective_history", &OptimizationReport::objective_history)
        .def_readonly("stage_offsets", &OptimizationReport::stage_offsets)
        .def_readonly("stage_terminal_violations",
                      &OptimizationReport::stage_terminal_violations);

    m.def(
        "simulate_forward",
        [](const ModelInstance& model, const std::vector<double>& u) {
            return simulate_forward(model, u);
        },
        py::arg("model"), py::arg("u_grid"));
    m.def(
        "objective",
        [](const ModelInstance& model, const std::vector<double>& u, double mu) {
            return objective(model, u, mu);
        },
        py::arg("model"), py::arg("u_grid"), py::arg("terminal_penalty") = 0.0);
    m.def(
        "gradient",
        [](const ModelInstance& model, const std::vector<double>& u, double mu) {
            return gradient(model, u, mu);
        },
        py::arg("model"), py::arg("u_grid"), py::arg("terminal_penalty") = 0.0);
    m.def("optimize", &optimize, py::arg("model"),
          py::arg("settings") = TranscriptionSettings{});

    // experiment front end
    py::enum_<SolverKind>(m, "SolverKind")
        .value("analytic_1a", SolverKind::Analytic1a)
        .value("analytic_1b", SolverKind::Analytic1b)
        .value("bvp", SolverKind::Bvp)
        .value("transcription", SolverKind::Transcription);
    py::class_<SweepSpec>(m, "SweepSpec")
        .def(py::init<>())
        .def_readwrite("param", &SweepSpec::param)
        .def_readwrite("from_value", &SweepSpec::from)
        .def_readwrite("to_value", &SweepSpec::to)
        .def_readwrite("step", &SweepSpec::step);
    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("model", &RunConfig::model)
        .def_readonly("sweep", &RunConfig::sweep);
    py::class_<SolveOutcome>(m, "SolveOutcome")
        .def_readonly("trajectory", &SolveOutcome::trajectory)
        .def_readonly("profit", &SolveOutcome::profit)
        .def_readonly("converged", &SolveOutcome::converged)
        .def_readonly("feasible", &SolveOutcome::feasible)
        .def_readonly("max_dynamics_residual", &SolveOutcome::max_dynamics_residual)
        .def("ok", &SolveOutcome::ok);
    py::class_<SweepPoint>(m, "SweepPoint")
        .def_readonly("value", &SweepPoint::value)
        .def_readonly("profit", &SweepPoint::profit)
        .def_readonly("ok", &SweepPoint::ok);

    m.def("parse_config", &parse_config);
    m.def("load_config", &load_config);
    m.def("solver_from_name", &solver_from_name);
    m.def("run_solver", &run_solver, py::arg("model"), py::arg("kind"),
          py::arg("intervals") = 1200);
    m.def("run_sweep", &run_sweep, py::arg("model"), py::arg("sweep"), py::arg("kind"),
          py::arg("intervals") = 1200);
    m.def("write_trajectory_csv", &write_trajectory_csv);
    m.def("read_trajectory_csv", &read_trajectory_csv);

#ifdef BREAKOPT_VERSION
    m.attr("__version__") = BREAKOPT_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
