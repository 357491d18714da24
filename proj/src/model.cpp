#include "breakopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace breakopt {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

bool grid_is_uniform(std::span<const double> t, double& h) {
    h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    const double tol = 1e-9 * std::max(1.0, std::abs(t.back()));
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (std::abs((t[i + 1] - t[i]) - h) > tol) return false;
    }
    return true;
}

// Integral over [t0, t2] of the parabola through three (possibly unevenly
// spaced) samples.
double parabola_pair(double h0, double h1, double f0, double f1, double f2) {
    const double s = h0 + h1;
    return s / 6.0 * ((2.0 - h1 / h0) * f0 + s * s / (h0 * h1) * f1 + (2.0 - h0 / h1) * f2);
}

// Integral over the last interval [t1, t2] only, using the parabola through
// the trailing three samples. Uniform spacing reduces to h/12*(-f0+8*f1+5*f2).
double parabola_tail(double h0, double h1, double f0, double f1, double f2) {
    const double s = h0 + h1;
    return -f0 * h1 * h1 * h1 / (6.0 * h0 * s) + f1 * h1 * (h1 + 3.0 * h0) / (6.0 * h0) +
           f2 * h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * s);
}

}  // namespace

double HoldingCostLaw::at(double t) const {
    // std::pow(0, 0) == 1, which is the convention adopted for n = 0.
    return a + b * std::pow(t, n);
}

double BreakabilityLaw::at(double x) const {
    if (x == 0.0) return 0.0;
    return b1 * std::pow(x, gamma);
}

void ModelInstance::validate() const {
    require(T > 0.0, "T must be positive");
    require(std::isfinite(T), "T must be finite");

    require(holding.a > 0.0, "a must be positive");
    require(holding.n >= 0.0, "n must be nonnegative");
    // h is monotone in t for n >= 0, so endpoint checks cover [0, T].
    require(holding.at(0.0) >= 0.0 && holding.at(T) >= 0.0, "b makes h(t) negative on [0, T]");

    require(breakage.b1 >= 0.0, "b1 must be nonnegative");
    require(breakage.gamma > 0.0, "gamma must be positive");

    require(econ.c10 >= 0.0, "c10 must be nonnegative");
    require(econ.L >= 0.0, "L must be nonnegative");
    require(econ.N >= 0.0, "N must be nonnegative");
    require(econ.beta10 > 0.0, "beta10 must be positive");
    require(econ.s1 >= 0.0, "s1 must be nonnegative");
    require(econ.s2 >= 0.0, "s2 must be nonnegative");
    require(econ.p >= 0.0, "p must be nonnegative");

    // Quadratic demand is nonnegative on [0, T] iff it is nonnegative at
    // both endpoints and at an interior vertex, when one exists.
    require(demand.at(0.0) >= 0.0, "d1 makes d(0) negative");
    require(demand.at(T) >= 0.0, "demand is negative at t = T");
    if (demand.d3 != 0.0) {
        const double tv = -demand.d2 / (2.0 * demand.d3);
        if (tv > 0.0 && tv < T) {
            require(demand.at(tv) >= 0.0, "demand is negative at its interior vertex");
        }
    }
}

void Trajectory::validate_grid() const {
    require(times.size() >= 2, "trajectory needs at least 2 samples");
    require(x.size() == times.size() && u.size() == times.size() && d.size() == times.size(),
            "trajectory arrays must have equal length");
    require(std::abs(times.front()) <= 1e-12, "trajectory must start at t = 0");
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        require(times[i + 1] > times[i], "trajectory times must be strictly increasing");
    }
}

bool Trajectory::is_feasible(double tol) const {
    return min_state() >= -tol && min_control() >= -tol;
}

double Trajectory::min_state() const {
    return x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
}

double Trajectory::min_control() const {
    return u.empty() ? 0.0 : *std::min_element(u.begin(), u.end());
}

std::vector<double> make_uniform_grid(double T, std::size_t intervals) {
    require(T > 0.0, "grid horizon must be positive");
    require(intervals >= 1, "grid needs at least one interval");
    std::vector<double> t(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        t[i] = T * static_cast<double>(i) / static_cast<double>(intervals);
    }
    t.back() = T;
    return t;
}

double integrate_samples(std::span<const double> t, std::span<const double> f) {
    require(t.size() == f.size(), "integrate_samples: mismatched lengths");
    require(t.size() >= 3, "integrate_samples: needs at least 3 points");

    const std::size_t m = t.size() - 1;  // interval count
    double h = 0.0;
    if (grid_is_uniform(t, h) && m % 2 == 0) {
        double odd = 0.0, even = 0.0;
        for (std::size_t i = 1; i < m; i += 2) odd += f[i];
        for (std::size_t i = 2; i < m; i += 2) even += f[i];
        return h / 3.0 * (f[0] + f[m] + 4.0 * odd + 2.0 * even);
    }

    double sum = 0.0;
    std::size_t i = 0;
    while (i + 2 <= m) {
        sum += parabola_pair(t[i + 1] - t[i], t[i + 2] - t[i + 1], f[i], f[i + 1], f[i + 2]);
        i += 2;
    }
    if (i < m) {  // one interval left; reuse the trailing parabola
        sum += parabola_tail(t[m - 1] - t[m - 2], t[m] - t[m - 1], f[m - 2], f[m - 1], f[m]);
    }
    return sum;
}

double demand_at(const DemandPoly& demand, double t) {
    require(t >= 0.0, "demand_at: t must be nonnegative");
    return demand.at(t);
}

double holding_cost_at(const HoldingCostLaw& law, double t) {
    require(t >= 0.0, "holding_cost_at: t must be nonnegative");
    return law.at(t);
}

double breakability_at(const BreakabilityLaw& law, double x) {
    require(x >= 0.0, "breakability_at: negative stock is infeasible");
    return law.at(x);
}

double production_cost_rate(const EconomicParams& econ, double u) {
    require(u >= 0.0, "production_cost_rate: u must be nonnegative");
    return econ.c10 * u + econ.development_cost() + econ.beta10 * u * u;
}

double setup_cost_rate(const EconomicParams& econ, double u, double T) {
    require(T > 0.0, "setup_cost_rate: T must be positive");
    require(u >= 0.0, "setup_cost_rate: u must be nonnegative");
    return (econ.s1 + econ.s2 * u) / T;
}

double state_rhs(const ModelInstance& model, double t, double x, double u) {
    require(x >= -Trajectory::feasibility_tol, "state_rhs: negative stock is infeasible");
    return u - model.demand.at(t) - model.breakage.at(std::max(x, 0.0));
}

double recover_control(const ModelInstance& model, double t, double x, double xdot) {
    require(x >= -Trajectory::feasibility_tol, "recover_control: negative stock is infeasible");
    return xdot + model.demand.at(t) + model.breakage.at(std::max(x, 0.0));
}

double profit_integrand(const ModelInstance& model, double t, double x, double u) {
    require(x >= -Trajectory::feasibility_tol, "profit_integrand: negative stock");
    require(u >= -Trajectory::feasibility_tol, "profit_integrand: negative production rate");
    const double revenue = model.econ.p * model.demand.at(t);
    const double holding = model.holding.at(t) * x;
    const double ue = std::max(u, 0.0);
    return revenue - holding - production_cost_rate(model.econ, ue) -
           setup_cost_rate(model.econ, ue, model.T);
}

double profit_of_trajectory(const ModelInstance& model, const Trajectory& traj) {
    traj.validate_grid();
    require(traj.size() >= 3, "profit_of_trajectory: needs at least 3 samples");
    require(std::abs(traj.times.back() - model.T) <= 1e-9 * std::max(1.0, model.T),
            "profit_of_trajectory: trajectory does not span [0, T]");

    std::vector<double> f(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        f[i] = profit_integrand(model, traj.times[i], traj.x[i], traj.u[i]);
    }
    return integrate_samples(traj.times, f);
}

double dynamics_residual(const ModelInstance& model, const Trajectory& traj) {
    traj.validate_grid();
    require(traj.size() >= 3, "dynamics_residual: needs at least 3 samples");

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double hl = traj.times[i] - traj.times[i - 1];
        const double hr = traj.times[i + 1] - traj.times[i];
        // Second-order three-point first derivative, valid on uneven grids.
        const double xdot = -traj.x[i - 1] * hr / (hl * (hl + hr)) +
                            traj.x[i] * (hr - hl) / (hl * hr) +
                            traj.x[i + 1] * hl / (hr * (hl + hr));
        // Diagnostic over possibly infeasible paths: floor the breakage
        // base instead of rejecting negative stock.
        const double rhs = traj.u[i] - model.demand.at(traj.times[i]) -
                           model.breakage.at(std::max(traj.x[i], 0.0));
        worst = std::max(worst, std::abs(xdot - rhs));
    }
    return worst;
}

double dynamics_residual_bound(const Trajectory& traj) {
    traj.validate_grid();
    if (traj.size() < 5) return std::numeric_limits<double>::infinity();

    double hmax = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        hmax = std::max(hmax, traj.times[i + 1] - traj.times[i]);
    }
    // max |x'''| from five-point differences of the sampled state.
    double d3max = 0.0;
    for (std::size_t i = 2; i + 2 < traj.size(); ++i) {
        const double h = 0.5 * (traj.times[i + 1] - traj.times[i - 1]);
        const double d3 = (traj.x[i + 2] - 2.0 * traj.x[i + 1] + 2.0 * traj.x[i - 1] -
                           traj.x[i - 2]) /
                          (2.0 * h * h * h);
        d3max = std::max(d3max, std::abs(d3));
    }
    const double truncation = hmax * hmax / 6.0 * d3max;

    // A trajectory whose state integrates its control by the trapezoidal
    // rule satisfies central(x)_i - rhs_i = (rhs_{i+1} - 2 rhs_i +
    // rhs_{i-1}) / 4 identically, so grid-scale roughness of the control
    // is part of the discretization budget, not a dynamics violation. The
    // smooth breakage and state parts contribute O(h^2) to the second
    // difference; u - d carries all the roughness.
    double roughness = 0.0;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double r0 = traj.u[i - 1] - traj.d[i - 1];
        const double r1 = traj.u[i] - traj.d[i];
        const double r2 = traj.u[i + 1] - traj.d[i + 1];
        roughness = std::max(roughness, std::abs(r2 - 2.0 * r1 + r0) / 4.0);
    }
    return std::max({1e-6, 5.0 * truncation, 1.5 * roughness});
}

}  // namespace breakopt
