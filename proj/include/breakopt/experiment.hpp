#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "breakopt/model.hpp"

namespace breakopt {

/// Configuration or validation failure; the message names the offending
/// key and, for parse errors, the line.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SolverKind { Analytic1a, Analytic1b, Bvp, Transcription };

std::string solver_name(SolverKind kind);
SolverKind solver_from_name(const std::string& name);  // throws ConfigError

/// One-parameter scan: `param` is one of the scalar model keys.
struct SweepSpec {
    std::string param;
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
};

struct RunConfig {
    ModelInstance model;
    std::optional<SweepSpec> sweep;
};

/// The 16 scalar model keys accepted in config files, in canonical order.
const std::vector<std::string>& model_keys();

/// Parses flat `key = value` text (one pair per line, # comments). All 16
/// model keys are required; the four sweep keys (sweep_param, sweep_from,
/// sweep_to, sweep_step) are optional as a block; anything else is
/// rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Returns a copy of the model with the named scalar key replaced.
ModelInstance with_param(const ModelInstance& model, const std::string& key, double value);

/// Uniform result of one solver run, CSV-ready.
struct SolveOutcome {
    SolverKind solver = SolverKind::Bvp;
    Trajectory trajectory;
    double profit = 0.0;
    bool converged = false;
    bool feasible = false;
    double max_dynamics_residual = 0.0;
    double residual_bound = 0.0;
    std::vector<std::pair<std::string, std::string>> diagnostics;

    bool ok() const {
        return converged && feasible && max_dynamics_residual <= residual_bound;
    }
};

/// Dispatches to the requested solver on a uniform grid of `intervals`
/// subintervals. Rejects solver/model mismatches (analytic-1a needs
/// gamma = 1, n = 1, b1 > 0; analytic-1b needs b1 = 0, n = 1).
SolveOutcome run_solver(const ModelInstance& model, SolverKind kind, std::size_t intervals);

struct SweepPoint {
    double value = 0.0;
    double profit = 0.0;
    bool ok = false;
};

/// Runs the solver once per sweep value (concurrently); rows ordered by
/// parameter value.
std::vector<SweepPoint> run_sweep(const ModelInstance& model, const SweepSpec& sweep,
                                  SolverKind kind, std::size_t intervals);

struct CompareRow {
    double t = 0.0;
    double x_a = 0.0, x_b = 0.0;
    double u_a = 0.0, u_b = 0.0;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    SolveOutcome outcome_a, outcome_b;
};

/// Paired trajectories of two models sharing T, sampled at the report
/// times.
CompareResult run_compare(const ModelInstance& model_a, const ModelInstance& model_b,
                          SolverKind kind, std::size_t intervals);

/// Integer-spaced report times 0, 1, ..., plus T when T is not integral.
std::vector<double> report_times(double T);

/// Trajectory values at arbitrary times within the grid (exact at nodes,
/// linear interpolation between them).
Trajectory trajectory_at_times(const Trajectory& traj, const std::vector<double>& times);

// --- CSV artifacts --------------------------------------------------------

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);
void write_summary_csv(const std::filesystem::path& path, const SolveOutcome& outcome);
void write_sweep_csv(const std::filesystem::path& path, const std::string& param,
                     const std::vector<SweepPoint>& points);
void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows);

/// Canonical Table-1 parameter set of the numerical experiment, with the
/// given breakability coefficient.
ModelInstance table1_model(double b1);

}  // namespace breakopt
