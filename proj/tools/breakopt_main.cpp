#include <cstddef>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "breakopt/experiment.hpp"

namespace fs = std::filesystem;
using namespace breakopt;

namespace {

void print_outcome(const SolveOutcome& outcome) {
    std::cout << "solver=" << solver_name(outcome.solver) << " profit=" << outcome.profit
              << " converged=" << (outcome.converged ? "true" : "false")
              << " feasible=" << (outcome.feasible ? "true" : "false")
              << " max_dynamics_residual=" << outcome.max_dynamics_residual << '\n';
    for (const auto& [key, value] : outcome.diagnostics) {
        std::cout << "  " << key << "=" << value << '\n';
    }
}

int write_solve_artifacts(const SolveOutcome& outcome, const fs::path& out_dir, bool full_grid) {
    fs::create_directories(out_dir);
    const Trajectory report =
        trajectory_at_times(outcome.trajectory, report_times(outcome.trajectory.times.back()));
    write_trajectory_csv(out_dir / "trajectory.csv", report);
    if (full_grid) write_trajectory_csv(out_dir / "trajectory_grid.csv", outcome.trajectory);
    write_summary_csv(out_dir / "summary.csv", outcome);
    print_outcome(outcome);
    if (!outcome.ok()) {
        std::cerr << "run not converged/feasible; see " << (out_dir / "summary.csv").string()
                  << '\n';
        return 1;
    }
    return 0;
}

int cmd_solve(const std::string& config_path, const std::string& solver, std::size_t grid,
              const std::string& out, bool full_grid) {
    const RunConfig config = load_config(config_path);
    const SolveOutcome outcome = run_solver(config.model, solver_from_name(solver), grid);
    return write_solve_artifacts(outcome, out, full_grid);
}

int cmd_sweep(const std::string& config_path, const std::string& solver, std::size_t grid,
              const std::string& out, const std::string& param, double from, double to,
              double step, bool have_cli_sweep) {
    const RunConfig config = load_config(config_path);
    SweepSpec sweep;
    if (have_cli_sweep) {
        sweep = SweepSpec{param, from, to, step};
    } else if (config.sweep) {
        sweep = *config.sweep;
    } else {
        std::cerr << "sweep: config has no sweep block and no --param given\n";
        return 2;
    }

    const auto points = run_sweep(config.model, sweep, solver_from_name(solver), grid);
    fs::create_directories(out);
    write_sweep_csv(fs::path(out) / "sweep.csv", sweep.param, points);

    bool all_ok = true;
    for (const SweepPoint& point : points) {
        std::cout << sweep.param << "=" << point.value << " profit=" << point.profit
                  << (point.ok ? "" : " [failed]") << '\n';
        all_ok = all_ok && point.ok;
    }
    return all_ok ? 0 : 1;
}

int cmd_compare(const std::string& config_a, const std::string& config_b,
                const std::string& solver, std::size_t grid, const std::string& out) {
    const RunConfig a = load_config(config_a);
    const RunConfig b = load_config(config_b);
    const CompareResult result = run_compare(a.model, b.model, solver_from_name(solver), grid);
    fs::create_directories(out);
    write_compare_csv(fs::path(out) / "compare.csv", result.rows);
    print_outcome(result.outcome_a);
    print_outcome(result.outcome_b);
    return result.outcome_a.ok() && result.outcome_b.ok() ? 0 : 1;
}

int cmd_reproduce(int table, std::size_t grid, const std::string& out) {
    fs::create_directories(out);
    switch (table) {
        case 2:
            return write_solve_artifacts(
                run_solver(table1_model(0.02), SolverKind::Analytic1a, grid), out, false);
        case 3:
            return write_solve_artifacts(
                run_solver(table1_model(0.0), SolverKind::Analytic1b, grid), out, false);
        case 4:
            return write_solve_artifacts(
                run_solver(table1_model(0.11), SolverKind::Analytic1a, grid), out, false);
        case 5: {
            const SweepSpec sweep{"b1", 0.01, 0.08, 0.01};
            const auto points =
                run_sweep(table1_model(0.02), sweep, SolverKind::Analytic1a, grid);
            write_sweep_csv(fs::path(out) / "sweep.csv", sweep.param, points);
            bool all_ok = true;
            for (const SweepPoint& point : points) {
                std::cout << "b1=" << point.value << " profit=" << point.profit
                          << (point.ok ? "" : " [failed]") << '\n';
                all_ok = all_ok && point.ok;
            }
            return all_ok ? 0 : 1;
        }
        default:
            std::cerr << "reproduce: --table must be one of 2, 3, 4, 5\n";
            return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Production planning for a breakable, stock-stressed item"};
    app.require_subcommand(1);

    std::string config_path, config_a, config_b;
    std::string solver = "bvp";
    std::string out = "out";
    std::size_t grid = 1200;
    bool full_grid = false;
    int table = 0;
    std::string param;
    double from = 0.0, to = 0.0, step = 1.0;

    auto* solve = app.add_subcommand("solve", "Run one solver on a config");
    solve->add_option("--config", config_path, "model config file")->required();
    solve->add_option("--solver", solver,
                      "analytic-1a | analytic-1b | bvp | transcription")->required();
    solve->add_option("--grid", grid, "uniform grid intervals");
    solve->add_option("--out", out, "output directory");
    solve->add_flag("--full-grid", full_grid, "also write the full-resolution trajectory");

    auto* sweep = app.add_subcommand("sweep", "Profit scan over one model parameter");
    sweep->add_option("--config", config_path, "model config file")->required();
    sweep->add_option("--solver", solver)->required();
    sweep->add_option("--grid", grid);
    sweep->add_option("--out", out);
    auto* param_opt = sweep->add_option("--param", param, "parameter to sweep");
    sweep->add_option("--from", from)->needs(param_opt);
    sweep->add_option("--to", to)->needs(param_opt);
    sweep->add_option("--step", step)->needs(param_opt);

    auto* compare = app.add_subcommand("compare", "Paired trajectories of two configs");
    compare->add_option("--config-a", config_a)->required();
    compare->add_option("--config-b", config_b)->required();
    compare->add_option("--solver", solver)->required();
    compare->add_option("--grid", grid);
    compare->add_option("--out", out);

    auto* reproduce = app.add_subcommand("reproduce", "Emit the published experiment tables");
    reproduce->add_option("--table", table, "2, 3, 4 or 5")->required();
    reproduce->add_option("--grid", grid);
    reproduce->add_option("--out", out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(config_path, solver, grid, out, full_grid);
        if (sweep->parsed()) {
            return cmd_sweep(config_path, solver, grid, out, param, from, to, step,
                             !param.empty());
        }
        if (compare->parsed()) return cmd_compare(config_a, config_b, solver, grid, out);
        if (reproduce->parsed()) return cmd_reproduce(table, grid, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
