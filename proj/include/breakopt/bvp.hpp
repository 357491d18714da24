#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "breakopt/model.hpp"

namespace breakopt {

/// Uniform finite-difference grid for the boundary-value problem. The
/// interval count is kept even so the same grid feeds Simpson quadrature.
struct GridSpec {
    std::size_t intervals = 1200;
    double T = 1.0;

    double step() const { return T / static_cast<double>(intervals); }
    void validate() const;  // throws std::invalid_argument
};

struct NewtonSettings {
    std::size_t max_iters = 50;
    double residual_tol = 1e-8;   // max norm of the discrete ODE residual
    double damping = 1.0;         // initial step fraction
    double regularization_eps = 1e-6;  // floor inside x^{gamma-1} when gamma < 1
    std::size_t max_backtracks = 30;

    void validate() const;
};

/// Result of one boundary-value solve. Endpoints x(0) = x(T) = 0 are
/// imposed, not solved. `feasible` reports the post-hoc x >= 0, u >= 0
/// check (the stationarity equation itself does not encode it);
/// `regularization_active` is set when any interior node needed the
/// power-law floor during the final residual evaluation.
struct BvpSolution {
    Trajectory trajectory;
    double final_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool feasible = false;
    bool regularization_active = false;
};

/// Stationarity residual of the profit functional at (t, x, xddot):
///   xddot - b1^2 gamma x^{2 gamma - 1}
///         - b1 gamma x^{gamma - 1} (c10 + s2/T + 2 beta10 d(t)) / (2 beta10)
///         - (h(t) - 2 beta10 (d2 + 2 d3 t)) / (2 beta10)
/// Zero along an extremal trajectory. For gamma < 1 the power terms are
/// singular at x = 0; they are evaluated at max(x, regularization_eps),
/// and eps = 0 there raises std::domain_error.
double el_residual(const ModelInstance& model, double t, double x, double xddot,
                   double regularization_eps = 0.0);

/// Damped Newton on the central-difference discretization of
/// el_residual = 0 with x_0 = x_M = 0. Control is recovered at every node
/// from the state equation with second-order difference derivatives.
/// Non-convergence is reported in the result, never silently.
BvpSolution solve_bvp(const ModelInstance& model, const GridSpec& grid,
                      const NewtonSettings& settings = {});

struct ConvergenceEntry {
    std::size_t intervals = 0;
    double max_error = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    std::vector<double> observed_orders;  // log2(e_i / e_{i+1}) between grids
    bool analytic_reference = false;      // otherwise the finest-grid solve
};

/// Error of solve_bvp against the closed form (when the model admits one)
/// or against a solve on twice the finest grid. Needs at least 3 grids
/// with doubling interval counts.
ConvergenceReport grid_convergence(const ModelInstance& model, std::span<const GridSpec> grids,
                                   const NewtonSettings& settings = {});

}  // namespace breakopt
