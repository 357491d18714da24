#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace breakopt {

/// Quadratic demand d(t) = d1 + d2*t + d3*t^2.
struct DemandPoly {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;

    double at(double t) const { return d1 + t * (d2 + t * d3); }
    double slope(double t) const { return d2 + 2.0 * d3 * t; }
};

/// Per-unit holding cost h(t) = a + b*t^n. With n = 0 the law degenerates
/// to the constant a + b (0^0 == 1).
struct HoldingCostLaw {
    double a = 0.0;
    double b = 0.0;
    double n = 0.0;

    double at(double t) const;
};

/// Stock-dependent breakage rate B(x) = b1*x^gamma.
struct BreakabilityLaw {
    double b1 = 0.0;
    double gamma = 1.0;

    double at(double x) const;
};

/// Cost and price constants of one planning problem.
/// The per-unit production cost c10 + cd/u + beta10*u is never exposed as
/// such; only the total rate c10*u + cd + beta10*u^2, which is finite at
/// u = 0, appears in the model.
struct EconomicParams {
    double c10 = 0.0;     // material cost per unit
    double L = 0.0;       // fixed labour/energy cost per time
    double N = 0.0;       // technology/design cost per time
    double beta10 = 1.0;  // wear-tear coefficient
    double s1 = 0.0;      // fixed part of the set-up cost
    double s2 = 0.0;      // production-rate part of the set-up cost
    double p = 0.0;       // selling price per unit

    double development_cost() const { return N + L; }
};

/// One complete planning problem on the horizon [0, T] with the fixed
/// boundary states x(0) = x(T) = 0.
struct ModelInstance {
    DemandPoly demand;
    HoldingCostLaw holding;
    BreakabilityLaw breakage;
    EconomicParams econ;
    double T = 1.0;

    /// c10 + s2/T, the coefficient of u in the reduced profit integrand.
    double control_cost_linear() const { return econ.c10 + econ.s2 / T; }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Sampled state/control/demand path on a strictly increasing time grid
/// spanning [0, T]. The exchange format between solvers and the CLI.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> d;

    /// Round-off allowance for the x >= 0, u >= 0 feasibility checks; the
    /// closed-form solutions touch 0 exactly at the boundaries.
    static constexpr double feasibility_tol = 1e-9;

    std::size_t size() const { return times.size(); }
    std::size_t intervals() const { return times.empty() ? 0 : times.size() - 1; }

    /// Grid sanity: equal array lengths, strictly increasing times,
    /// times.front() == 0. Throws std::invalid_argument.
    void validate_grid() const;

    bool is_feasible(double tol = feasibility_tol) const;
    double min_state() const;
    double min_control() const;
};

/// Uniform grid of `intervals` subintervals on [0, T].
std::vector<double> make_uniform_grid(double T, std::size_t intervals);

/// Integrates samples f over the grid t. Composite Simpson on uniform
/// grids with an even interval count; pairwise parabolic segments (with a
/// one-interval parabolic tail when the count is odd) otherwise. Exact for
/// cubics on uniform even grids. Requires at least 3 points.
double integrate_samples(std::span<const double> t, std::span<const double> f);

// --- primitive model functions ------------------------------------------

double demand_at(const DemandPoly& demand, double t);
double holding_cost_at(const HoldingCostLaw& law, double t);

/// B(x) = b1*x^gamma. Negative x is rejected as an infeasible state.
double breakability_at(const BreakabilityLaw& law, double x);

/// Total production cost per unit time, c10*u + (N+L) + beta10*u^2.
double production_cost_rate(const EconomicParams& econ, double u);

/// Set-up cost per unit time, (s1 + s2*u)/T.
double setup_cost_rate(const EconomicParams& econ, double u, double T);

/// Stock derivative u - d(t) - B(x).
double state_rhs(const ModelInstance& model, double t, double x, double u);

/// Inverse of state_rhs in u: xdot + d(t) + B(x).
double recover_control(const ModelInstance& model, double t, double x, double xdot);

/// p*d(t) - h(t)*x - production_cost_rate(u) - setup_cost_rate(u, T).
double profit_integrand(const ModelInstance& model, double t, double x, double u);

/// Quadrature of profit_integrand along the trajectory.
double profit_of_trajectory(const ModelInstance& model, const Trajectory& traj);

/// Max over interior nodes of |central-difference xdot - state_rhs|.
double dynamics_residual(const ModelInstance& model, const Trajectory& traj);

/// Estimated discretization budget for dynamics_residual on this grid:
/// the central-difference truncation h^2/6 * max|x'''| (third derivative
/// estimated from divided differences) plus the second-difference
/// roughness of u - d that trapezoid-consistent trajectories carry by
/// identity, each with a safety margin.
double dynamics_residual_bound(const Trajectory& traj);

}  // namespace breakopt
