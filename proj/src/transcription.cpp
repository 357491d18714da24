#include "breakopt/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace breakopt {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Breakage rate and slope with the base floored at zero: infeasible
// (negative) stock contributes no breakage, and the continuation keeps the
// step map evaluable for any gamma.
double breakage_floored(const BreakabilityLaw& law, double x) {
    if (law.b1 == 0.0 || x <= 0.0) return 0.0;
    return law.b1 * std::pow(x, law.gamma);
}

double breakage_slope(const BreakabilityLaw& law, double x) {
    if (law.b1 == 0.0) return 0.0;
    if (law.gamma == 1.0) return x >= 0.0 ? law.b1 : 0.0;
    if (x <= 0.0) return 0.0;
    return law.b1 * law.gamma * std::pow(x, law.gamma - 1.0);
}

// Cost quadrature weights. The objective integrates with the trapezoidal
// rule so that cost and dynamics share one discretization; a higher-order
// cost rule (e.g. Simpson) paired with trapezoidal dynamics makes the
// discrete optimum chatter at the grid scale to game the weight pattern.
std::vector<double> cost_weights(std::size_t m, double h) {
    std::vector<double> w(m + 1, h);
    w[0] = w[m] = 0.5 * h;
    return w;
}

struct ForwardWorkspace {
    std::vector<double> times;
    std::vector<double> d;
    SimulationResult sim;
};

ForwardWorkspace run_forward(const ModelInstance& model, std::span<const double> u) {
    require(u.size() >= 2, "simulate_forward: control grid needs at least 2 samples");
    const std::size_t m = u.size() - 1;
    const double h = model.T / static_cast<double>(m);

    ForwardWorkspace ws;
    ws.times = make_uniform_grid(model.T, m);
    ws.d.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) ws.d[i] = model.demand.at(ws.times[i]);

    ws.sim.x.assign(m + 1, 0.0);
    ws.sim.floored.assign(m + 1, false);

    const auto& law = model.breakage;
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = ws.sim.x[i];
        const double fi = u[i] - ws.d[i] - breakage_floored(law, xi);
        const double rhs_next = u[i + 1] - ws.d[i + 1];
        double z;
        if (law.b1 == 0.0) {
            z = xi + 0.5 * h * (fi + rhs_next);
        } else if (law.gamma == 1.0) {
            const double zfree = xi + 0.5 * h * (fi + rhs_next);
            z = zfree >= 0.0 ? zfree / (1.0 + 0.5 * h * law.b1) : zfree;
        } else {
            // Scalar Newton on z - xi - h/2 (fi + rhs_next - B(z)) = 0.
            z = xi + h * fi;
            for (int it = 0; it < 60; ++it) {
                const double psi =
                    z - xi - 0.5 * h * (fi + rhs_next - breakage_floored(law, z));
                const double dpsi = 1.0 + 0.5 * h * breakage_slope(law, z);
                const double dz = psi / dpsi;
                z -= dz;
                if (std::abs(dz) <= 1e-14 * (1.0 + std::abs(z))) break;
            }
        }
        ws.sim.x[i + 1] = z;
        if (z < 0.0) {
            ws.sim.floored[i + 1] = true;
            if (z < -Trajectory::feasibility_tol) ws.sim.below_floor = true;
        }
    }
    return ws;
}

double integrand_at(const ModelInstance& model, const ForwardWorkspace& ws, double u_i,
                    std::size_t i) {
    const double ui = std::max(u_i, 0.0);
    return model.econ.p * ws.d[i] - model.holding.at(ws.times[i]) * ws.sim.x[i] -
           production_cost_rate(model.econ, ui) - setup_cost_rate(model.econ, ui, model.T);
}

double objective_of(const ModelInstance& model, std::span<const double> u,
                    const ForwardWorkspace& ws, double mu) {
    const std::size_t m = u.size() - 1;
    const double h = model.T / static_cast<double>(m);
    const std::vector<double> w = cost_weights(m, h);
    double sum = 0.0;
    for (std::size_t i = 0; i <= m; ++i) sum += w[i] * integrand_at(model, ws, u[i], i);
    const double xT = ws.sim.x[m];
    return sum - mu * xT * xT;
}

// Simpson profit of the simulated path, for reporting alongside
// profit_of_trajectory.
double simpson_profit_of(const ModelInstance& model, std::span<const double> u,
                         const ForwardWorkspace& ws) {
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = integrand_at(model, ws, u[i], i);
    return integrate_samples(ws.times, f);
}

std::vector<double> gradient_of(const ModelInstance& model, std::span<const double> u,
                                const ForwardWorkspace& ws, double mu) {
    const std::size_t m = u.size() - 1;
    const double h = model.T / static_cast<double>(m);
    const std::vector<double> w = cost_weights(m, h);
    const auto& law = model.breakage;

    // Trapezoidal step i -> i+1 linearization:
    //   dx_{i+1} = (num_i dx_i + h/2 (du_i + du_{i+1})) / den_{i+1}
    // with num_i = 1 - h/2 B'(x_i) and den_i = 1 + h/2 B'(x_i).
    std::vector<double> num(m + 1), den(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double s = 0.5 * h * breakage_slope(law, ws.sim.x[i]);
        num[i] = 1.0 - s;
        den[i] = 1.0 + s;
    }

    // a[k] = dJ/dx_k with all downstream dependence folded in.
    std::vector<double> a(m + 1);
    a[m] = -w[m] * model.holding.at(ws.times[m]) - 2.0 * mu * ws.sim.x[m];
    for (std::size_t k = m; k-- > 0;) {
        a[k] = -w[k] * model.holding.at(ws.times[k]) + a[k + 1] * num[k] / den[k + 1];
    }

    const double c11 = model.control_cost_linear();
    std::vector<double> g(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        double gk = -w[k] * (c11 + 2.0 * model.econ.beta10 * std::max(u[k], 0.0));
        if (k < m) gk += a[k + 1] * 0.5 * h / den[k + 1];
        if (k > 0) gk += a[k] * 0.5 * h / den[k];
        g[k] = gk;
    }
    return g;
}

}  // namespace

void TranscriptionSettings::validate() const {
    require(intervals >= 8, "TranscriptionSettings: needs at least 8 intervals");
    require(max_iters >= 1, "TranscriptionSettings: max_iters must be positive");
    require(grad_tol > 0.0, "TranscriptionSettings: grad_tol must be positive");
    require(!terminal_penalty_schedule.empty(),
            "TranscriptionSettings: penalty schedule must not be empty");
    for (std::size_t i = 0; i + 1 < terminal_penalty_schedule.size(); ++i) {
        require(terminal_penalty_schedule[i + 1] > terminal_penalty_schedule[i],
                "TranscriptionSettings: penalty weights must be strictly increasing");
    }
}

SimulationResult simulate_forward(const ModelInstance& model, std::span<const double> u_grid) {
    model.validate();
    return run_forward(model, u_grid).sim;
}

double objective(const ModelInstance& model, std::span<const double> u_grid,
                 double terminal_penalty) {
    model.validate();
    const ForwardWorkspace ws = run_forward(model, u_grid);
    return objective_of(model, u_grid, ws, terminal_penalty);
}

std::vector<double> gradient(const ModelInstance& model, std::span<const double> u_grid,
                             double terminal_penalty) {
    model.validate();
    const ForwardWorkspace ws = run_forward(model, u_grid);
    return gradient_of(model, u_grid, ws, terminal_penalty);
}

std::vector<double> project_controls(std::span<const double> u_grid) {
    std::vector<double> u(u_grid.begin(), u_grid.end());
    for (double& ui : u) ui = std::max(ui, 0.0);
    return u;
}

std::vector<double> project_gradient(std::span<const double> u_grid,
                                     std::span<const double> grad) {
    require(u_grid.size() == grad.size(), "project_gradient: mismatched lengths");
    std::vector<double> pg(grad.begin(), grad.end());
    for (std::size_t i = 0; i < pg.size(); ++i) {
        if (u_grid[i] <= 0.0 && pg[i] < 0.0) pg[i] = 0.0;  // ascent out of the bound
    }
    return pg;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double vi : v) s += vi * vi;
    return std::sqrt(s);
}

OptimizationReport optimize(const ModelInstance& model, const TranscriptionSettings& settings) {
    model.validate();
    settings.validate();

    const std::size_t m = settings.intervals;
    const std::vector<double> times = make_uniform_grid(model.T, m);

    // Steady-state start: u = d(t), which keeps the stock at zero.
    std::vector<double> u(m + 1);
    for (std::size_t i = 0; i <= m; ++i) u[i] = std::max(model.demand.at(times[i]), 0.0);

    OptimizationReport report;

    {
        const ForwardWorkspace ws0 = run_forward(model, u);
        const std::vector<double> g0 =
            gradient_of(model, u, ws0, settings.terminal_penalty_schedule.front());
        report.initial_gradient_norm = norm2(project_gradient(u, g0));
    }

    const double sigma = settings.step_rule.sufficient_decrease;
    double pg_norm = report.initial_gradient_norm;

    for (double mu : settings.terminal_penalty_schedule) {
        report.stage_offsets.push_back(report.objective_history.size());

        ForwardWorkspace ws = run_forward(model, u);
        double fval = objective_of(model, u, ws, mu);
        std::vector<double> g = gradient_of(model, u, ws, mu);
        std::vector<double> pg = project_gradient(u, g);
        pg_norm = norm2(pg);
        report.objective_history.push_back(fval);

        double alpha = 1.0 / std::max(pg_norm, 1e-12);
        std::vector<double> u_trial(m + 1), g_new;

        for (std::size_t it = 0; it < settings.max_iters && pg_norm > settings.grad_tol; ++it) {
            // Trial point along the projected spectral step.
            double directional = 0.0;
            for (std::size_t i = 0; i <= m; ++i) {
                u_trial[i] = std::max(u[i] + alpha * g[i], 0.0);
                directional += g[i] * (u_trial[i] - u[i]);
            }
            if (directional <= 0.0) break;  // no ascent direction left

            // Monotone Armijo backtracking on the step fraction.
            double lambda = 1.0;
            double f_trial = -std::numeric_limits<double>::infinity();
            ForwardWorkspace ws_trial;
            bool accepted = false;
            for (std::size_t bt = 0; bt <= settings.step_rule.max_backtracks; ++bt) {
                std::vector<double> u_step(m + 1);
                for (std::size_t i = 0; i <= m; ++i) {
                    u_step[i] = u[i] + lambda * (u_trial[i] - u[i]);
                }
                ws_trial = run_forward(model, u_step);
                f_trial = objective_of(model, u_step, ws_trial, mu);
                if (f_trial >= fval + sigma * lambda * directional) {
                    u_trial.swap(u_step);
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            ++report.iterations;
            if (!accepted) break;  // stalled

            g_new = gradient_of(model, u_trial, ws_trial, mu);

            // Barzilai-Borwein step for the next trial.
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i <= m; ++i) {
                const double si = u_trial[i] - u[i];
                ss += si * si;
                sy += si * (g[i] - g_new[i]);  // curvature of -J
            }
            alpha = (sy > 1e-16 * ss && ss > 0.0) ? std::clamp(ss / sy, 1e-10, 1e8)
                                                  : alpha * 2.0;

            u.swap(u_trial);
            ws = std::move(ws_trial);
            fval = f_trial;
            g.swap(g_new);
            pg = project_gradient(u, g);
            pg_norm = norm2(pg);
            report.objective_history.push_back(fval);
        }
        report.stage_terminal_violations.push_back(std::abs(ws.sim.x[m]));
    }

    const ForwardWorkspace ws = run_forward(model, u);
    report.trajectory.times = times;
    report.trajectory.x = ws.sim.x;
    report.trajectory.u = u;
    report.trajectory.d = ws.d;
    report.profit = simpson_profit_of(model, u, ws);
    report.terminal_violation = std::abs(ws.sim.x[m]);
    report.projected_gradient_norm = pg_norm;
    report.converged = pg_norm <= settings.grad_tol && report.terminal_violation <= 1e-3;
    // Path-constraint monitor: x >= 0 within 1e-3, u already projected.
    report.feasible =
        report.trajectory.min_state() >= -1e-3 && report.trajectory.min_control() >= -1e-9;
    return report;
}

}  // namespace breakopt
