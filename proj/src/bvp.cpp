#include "breakopt/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "breakopt/analytic.hpp"

namespace breakopt {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

constexpr double kFeasFloor = -1e-6;  // final-solution feasibility threshold

// Right-hand side g(t, x) of xddot = g and its x-derivative, so that the
// discrete system is (x_{i+1} - 2 x_i + x_{i-1})/h^2 - g(t_i, x_i) = 0.
// For gamma != 1 the power bases are floored at `eps` (residual evaluation
// only); the derivative is zero in the floored region so the Jacobian
// matches the clamped residual.
struct ElRhs {
    const ModelInstance& model;
    double eps;

    double b1, gamma, beta2, c11;
    bool linear;  // gamma == 1: g is affine in x

    explicit ElRhs(const ModelInstance& m, double eps_in)
        : model(m),
          eps(eps_in),
          b1(m.breakage.b1),
          gamma(m.breakage.gamma),
          beta2(2.0 * m.econ.beta10),
          c11(m.control_cost_linear()),
          linear(m.breakage.gamma == 1.0) {}

    double forcing(double t) const {
        return (model.holding.at(t) - beta2 * model.demand.slope(t)) / beta2;
    }

    double state_coeff(double t) const { return b1 * gamma * (c11 + beta2 * model.demand.at(t)) / beta2; }

    double value(double t, double x, bool* floored = nullptr) const {
        if (b1 == 0.0) return forcing(t);
        if (linear) return b1 * b1 * x + state_coeff(t) + forcing(t);
        double xe = x;
        if (xe < eps) {
            xe = eps;
            if (floored) *floored = true;
        }
        return b1 * b1 * gamma * std::pow(xe, 2.0 * gamma - 1.0) +
               state_coeff(t) * std::pow(xe, gamma - 1.0) + forcing(t);
    }

    double derivative(double t, double x) const {
        if (b1 == 0.0) return 0.0;
        if (linear) return b1 * b1;
        if (x < eps) return 0.0;
        return b1 * b1 * gamma * (2.0 * gamma - 1.0) * std::pow(x, 2.0 * gamma - 2.0) +
               state_coeff(t) * (gamma - 1.0) * std::pow(x, gamma - 2.0);
    }
};

// Thomas algorithm for the tridiagonal Newton system. Returns false on a
// vanishing pivot.
bool solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) return false;
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) return false;
    for (std::size_t i = n; i-- > 0;) {
        rhs[i] -= (i + 1 < n ? upper[i] * rhs[i + 1] : 0.0);
        rhs[i] /= diag[i];
    }
    return true;
}

double residual_norm(const ElRhs& rhs, std::span<const double> times, std::span<const double> x,
                     double h, bool* floored = nullptr) {
    double worst = 0.0;
    const std::size_t m = x.size() - 1;
    for (std::size_t i = 1; i < m; ++i) {
        const double lap = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / (h * h);
        const double r = lap - rhs.value(times[i], x[i], floored);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

// Discrete b1 = 0 solve: one tridiagonal pass with the pure forcing term.
// For n = 1 this reproduces the no-breakage cubic exactly on the grid and
// it satisfies both boundary conditions for any n.
std::vector<double> initial_guess(const ElRhs& rhs, std::span<const double> times, double h) {
    const std::size_t m = times.size() - 1;
    const std::size_t n = m - 1;
    std::vector<double> lower(n, 1.0 / (h * h)), diag(n, -2.0 / (h * h)), upper(n, 1.0 / (h * h));
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = rhs.forcing(times[i + 1]);
    solve_tridiagonal(lower, diag, upper, b);
    std::vector<double> x(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i + 1] = b[i];
    return x;
}

Trajectory recover_trajectory(const ModelInstance& model, std::span<const double> times,
                              std::span<const double> x, double h) {
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.x.assign(x.begin(), x.end());
    const std::size_t m = x.size() - 1;
    traj.u.resize(m + 1);
    traj.d.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        double xdot;
        if (i == 0) {
            xdot = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
        } else if (i == m) {
            xdot = (3.0 * x[m] - 4.0 * x[m - 1] + x[m - 2]) / (2.0 * h);
        } else {
            xdot = (x[i + 1] - x[i - 1]) / (2.0 * h);
        }
        traj.d[i] = model.demand.at(times[i]);
        traj.u[i] = xdot + traj.d[i] + model.breakage.at(std::max(x[i], 0.0));
    }
    return traj;
}

}  // namespace

void GridSpec::validate() const {
    require(T > 0.0, "GridSpec: T must be positive");
    require(intervals >= 8, "GridSpec: needs at least 8 intervals");
    require(intervals % 2 == 0, "GridSpec: interval count must be even");
}

void NewtonSettings::validate() const {
    require(residual_tol > 0.0, "NewtonSettings: residual_tol must be positive");
    require(damping > 0.0 && damping <= 1.0, "NewtonSettings: damping must be in (0, 1]");
    require(regularization_eps >= 0.0, "NewtonSettings: regularization_eps must be nonnegative");
    require(max_iters >= 1, "NewtonSettings: max_iters must be positive");
}

double el_residual(const ModelInstance& model, double t, double x, double xddot,
                   double regularization_eps) {
    require(x >= -Trajectory::feasibility_tol, "el_residual: negative stock is infeasible");
    const double gamma = model.breakage.gamma;
    if (model.breakage.b1 > 0.0 && gamma < 1.0 && x <= 0.0 && regularization_eps <= 0.0) {
        throw std::domain_error("el_residual: x^(gamma-1) singular at x = 0 for gamma < 1");
    }
    const ElRhs rhs(model, regularization_eps);
    return xddot - rhs.value(t, std::max(x, 0.0));
}

BvpSolution solve_bvp(const ModelInstance& model, const GridSpec& grid,
                      const NewtonSettings& settings) {
    model.validate();
    grid.validate();
    settings.validate();
    require(std::abs(grid.T - model.T) <= 1e-12 * std::max(1.0, model.T),
            "solve_bvp: grid horizon differs from the model horizon");

    const std::size_t m = grid.intervals;
    const double h = grid.step();
    const std::vector<double> times = make_uniform_grid(grid.T, m);
    const ElRhs rhs(model, settings.regularization_eps);

    std::vector<double> x = initial_guess(rhs, times, h);
    double norm = residual_norm(rhs, times, x, h);

    BvpSolution out;
    const std::size_t n = m - 1;
    std::vector<double> lower(n), diag(n), upper(n), step(n), trial(m + 1, 0.0);

    while (out.iterations < settings.max_iters && norm > settings.residual_tol) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = i + 1;
            lower[i] = 1.0 / (h * h);
            upper[i] = 1.0 / (h * h);
            diag[i] = -2.0 / (h * h) - rhs.derivative(times[k], x[k]);
            const double lap = (x[k + 1] - 2.0 * x[k] + x[k - 1]) / (h * h);
            step[i] = -(lap - rhs.value(times[k], x[k]));
        }
        if (!solve_tridiagonal(lower, diag, upper, step)) {
            throw std::runtime_error("solve_bvp: singular Jacobian at iteration " +
                                     std::to_string(out.iterations + 1));
        }

        // Backtracking: halve the step until the residual norm decreases.
        double lambda = settings.damping;
        double trial_norm = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (std::size_t bt = 0; bt <= settings.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i) trial[i + 1] = x[i + 1] + lambda * step[i];
            trial_norm = residual_norm(rhs, times, trial, h);
            if (trial_norm < norm) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        ++out.iterations;
        if (!accepted) break;  // stalled; report the best iterate
        x.swap(trial);
        norm = trial_norm;
    }

    bool floored = false;
    out.final_residual = residual_norm(rhs, times, x, h, &floored);
    out.converged = out.final_residual <= settings.residual_tol;
    out.regularization_active = floored && model.breakage.gamma != 1.0 && model.breakage.b1 > 0.0;
    out.trajectory = recover_trajectory(model, times, x, h);
    out.feasible = out.trajectory.min_state() >= kFeasFloor &&
                   out.trajectory.min_control() >= kFeasFloor;
    return out;
}

ConvergenceReport grid_convergence(const ModelInstance& model, std::span<const GridSpec> grids,
                                   const NewtonSettings& settings) {
    require(grids.size() >= 3, "grid_convergence: needs at least 3 grids");
    for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
        require(grids[i + 1].intervals == 2 * grids[i].intervals,
                "grid_convergence: interval counts must double");
    }

    ConvergenceReport report;
    const bool has_1a = model.breakage.gamma == 1.0 && model.holding.n == 1.0 &&
                        model.breakage.b1 * model.T >= 1e-6;
    const bool has_1b = model.breakage.b1 == 0.0 && model.holding.n == 1.0;
    report.analytic_reference = has_1a || has_1b;

    // Reference state: closed form, or the solve at 2x the finest grid
    // restricted to coarser nodes.
    std::function<double(double, std::size_t, std::size_t)> reference;
    if (has_1a) {
        const Model1aCoefficients c = coefficients_1a(model);
        reference = [c, &model](double t, std::size_t, std::size_t) { return x_1a(c, model, t); };
    } else if (has_1b) {
        const Model1bCoefficients c = coefficients_1b(model);
        reference = [c, &model](double t, std::size_t, std::size_t) { return x_1b(c, model, t); };
    } else {
        GridSpec fine{2 * grids.back().intervals, grids.back().T};
        BvpSolution sol = solve_bvp(model, fine, settings);
        reference = [ref = std::move(sol.trajectory.x), ref_m = fine.intervals](
                        double, std::size_t i, std::size_t m) { return ref[i * (ref_m / m)]; };
    }

    for (const GridSpec& grid : grids) {
        const BvpSolution sol = solve_bvp(model, grid, settings);
        const auto& traj = sol.trajectory;
        double err = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            err = std::max(err, std::abs(traj.x[i] - reference(traj.times[i], i, grid.intervals)));
        }
        report.entries.push_back({grid.intervals, err});
    }

    for (std::size_t i = 0; i + 1 < report.entries.size(); ++i) {
        report.observed_orders.push_back(
            std::log2(report.entries[i].max_error / report.entries[i + 1].max_error));
    }
    return report;
}

}  // namespace breakopt
