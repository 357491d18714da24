#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "breakopt/model.hpp"

namespace breakopt {

struct StepRule {
    double sufficient_decrease = 1e-4;  // Armijo parameter
    std::size_t max_backtracks = 40;
};

struct TranscriptionSettings {
    std::size_t intervals = 1200;
    std::size_t max_iters = 5000;  // per penalty stage
    // Projected-gradient norm target. Node-wise stationarity slack is
    // roughly |g_k| / (2 beta10 h), so 0.02 pins the control to ~1 unit/time
    // on the default grid.
    double grad_tol = 0.02;
    std::vector<double> terminal_penalty_schedule = {1e1, 1e3, 1e5};
    StepRule step_rule{};

    void validate() const;  // throws std::invalid_argument
};

/// Forward state integration result. The state is not constrained: the
/// x >= 0 path constraint is monitored, not enforced. Below zero the
/// breakage-law base is floored (B contributes nothing to infeasible
/// stock); `floored[i]` marks those nodes and `below_floor` is set when
/// any excursion exceeds the round-off tolerance.
struct SimulationResult {
    std::vector<double> x;
    std::vector<bool> floored;
    bool below_floor = false;
};

struct OptimizationReport {
    Trajectory trajectory;
    double profit = 0.0;               // Simpson profit, no penalty term
    double terminal_violation = 0.0;   // |x(T)|
    double projected_gradient_norm = 0.0;
    double initial_gradient_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool feasible = false;

    /// Accepted objective values, concatenated across penalty stages;
    /// stage_offsets[k] is the index where stage k starts.
    std::vector<double> objective_history;
    std::vector<std::size_t> stage_offsets;
    std::vector<double> stage_terminal_violations;
};

/// Integrates the stock equation forward on the uniform grid implied by
/// u_grid (length M+1 over [0, T]) with the implicit trapezoidal rule;
/// gamma != 1 takes one scalar Newton solve per step.
SimulationResult simulate_forward(const ModelInstance& model, std::span<const double> u_grid);

/// Profit of the simulated trajectory minus the terminal penalty
/// mu * x(T)^2, integrated with the trapezoidal rule so that cost and
/// dynamics share one discretization (a mismatched higher-order cost rule
/// lets the optimum chatter at the grid scale). Well defined for any
/// control, including infeasible plans.
double objective(const ModelInstance& model, std::span<const double> u_grid,
                 double terminal_penalty = 0.0);

/// Exact gradient of `objective` with respect to the control samples:
/// the adjoint of the trapezoidal step recursion, not a discretization of
/// the continuous adjoint.
std::vector<double> gradient(const ModelInstance& model, std::span<const double> u_grid,
                             double terminal_penalty = 0.0);

/// Componentwise projection onto the feasible set u >= 0.
std::vector<double> project_controls(std::span<const double> u_grid);

/// Gradient with ascent components pointing out of u >= 0 zeroed at
/// active bounds.
std::vector<double> project_gradient(std::span<const double> u_grid,
                                     std::span<const double> grad);

double norm2(std::span<const double> v);

/// Projected gradient ascent (spectral step, monotone backtracking line
/// search) over the increasing terminal-penalty schedule, warm-starting
/// each stage, from the steady-state initial guess u = d(t).
OptimizationReport optimize(const ModelInstance& model, const TranscriptionSettings& settings = {});

}  // namespace breakopt
