#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "breakopt/analytic.hpp"
#include "breakopt/bvp.hpp"
#include "breakopt/experiment.hpp"
#include "test_helpers.hpp"

using namespace breakopt;
using doctest::Approx;

namespace {

ModelInstance gamma2_model() {
    ModelInstance m = table1_model(0.001);
    m.breakage.gamma = 2.0;
    return m;
}

double max_state_error_1a(const BvpSolution& sol, const ModelInstance& m,
                          const Model1aCoefficients& c) {
    double err = 0.0;
    for (std::size_t i = 0; i < sol.trajectory.size(); ++i) {
        err = std::max(err, std::abs(sol.trajectory.x[i] - x_1a(c, m, sol.trajectory.times[i])));
    }
    return err;
}

Trajectory steady_baseline(const ModelInstance& m, std::size_t intervals) {
    Trajectory traj;
    traj.times = make_uniform_grid(m.T, intervals);
    for (double t : traj.times) {
        traj.x.push_back(0.0);
        traj.u.push_back(m.demand.at(t));
        traj.d.push_back(m.demand.at(t));
    }
    return traj;
}

}  // namespace

TEST_CASE("stationarity residual vanishes on the Model-1a closed form") {
    const ModelInstance m = table1_model(0.02);
    const Model1aCoefficients c = coefficients_1a(m);
    for (int i = 0; i <= 800; ++i) {
        const double t = 12.0 * i / 800.0;
        const double x = std::max(x_1a(c, m, t), 0.0);
        CHECK(std::abs(el_residual(m, t, x, xddot_1a(c, m, t))) < 1e-9);
    }
}

TEST_CASE("stationarity residual vanishes on the Model-1b cubic") {
    const ModelInstance m = table1_model(0.0);
    const Model1bCoefficients c = coefficients_1b(m);
    for (int i = 0; i <= 800; ++i) {
        const double t = 12.0 * i / 800.0;
        const double x = std::max(x_1b(c, m, t), 0.0);
        CHECK(std::abs(el_residual(m, t, x, xddot_1b(c, m, t))) < 1e-12);
    }
}

TEST_CASE("state-dependent terms vanish at zero stock for gamma = 2") {
    const ModelInstance m = gamma2_model();
    const double beta2 = 2.0 * m.econ.beta10;
    for (double t : {0.0, 4.0, 9.0}) {
        const double forcing =
            (m.holding.at(t) - beta2 * (m.demand.d2 + 2.0 * m.demand.d3 * t)) / beta2;
        const double xdd = 5.0;
        CHECK(el_residual(m, t, 0.0, xdd) == Approx(xdd - forcing).epsilon(1e-12));
    }
}

TEST_CASE("gamma below one is singular at zero stock without regularization") {
    ModelInstance m = table1_model(0.02);
    m.breakage.gamma = 0.5;
    CHECK_THROWS_AS(el_residual(m, 1.0, 0.0, 0.0), std::domain_error);
    CHECK(std::isfinite(el_residual(m, 1.0, 0.0, 0.0, 1e-6)));
    CHECK_THROWS_AS(el_residual(m, 1.0, -5.0, 0.0), std::invalid_argument);
}

TEST_CASE("grid and settings validation") {
    const GridSpec odd{7, 12.0}, small{6, 12.0}, flat{100, 0.0}, good{100, 12.0};
    CHECK_THROWS_AS(odd.validate(), std::invalid_argument);
    CHECK_THROWS_AS(small.validate(), std::invalid_argument);
    CHECK_THROWS_AS(flat.validate(), std::invalid_argument);
    CHECK_NOTHROW(good.validate());

    NewtonSettings bad;
    bad.damping = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THROWS_AS(solve_bvp(table1_model(0.02), GridSpec{100, 10.0}),
                    std::invalid_argument);
}

TEST_CASE("linear-breakage solve reproduces the closed form in one Newton step") {
    const ModelInstance m = table1_model(0.02);
    const Model1aCoefficients c = coefficients_1a(m);
    const BvpSolution sol = solve_bvp(m, GridSpec{1200, 12.0});

    CHECK(sol.converged);
    CHECK(sol.feasible);
    CHECK_FALSE(sol.regularization_active);
    // the discretized system is linear in x, so the first step lands exactly
    CHECK(sol.iterations == 1);
    CHECK(sol.final_residual <= 1e-8);
    CHECK(sol.trajectory.x.front() == 0.0);
    CHECK(sol.trajectory.x.back() == 0.0);
    CHECK(max_state_error_1a(sol, m, c) < 0.05);

    // recovered control closes the state equation on the grid
    CHECK(dynamics_residual(m, sol.trajectory) <= dynamics_residual_bound(sol.trajectory));
}

TEST_CASE("no-breakage solve reproduces the cubic to round-off") {
    const ModelInstance m = table1_model(0.0);
    const Model1bCoefficients c = coefficients_1b(m);
    const BvpSolution sol = solve_bvp(m, GridSpec{1200, 12.0});

    CHECK(sol.converged);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.trajectory.size(); ++i) {
        err = std::max(err, std::abs(sol.trajectory.x[i] - x_1b(c, m, sol.trajectory.times[i])));
    }
    CHECK(err < 1e-6);  // central differences are exact on cubics

    CHECK(profit_of_trajectory(m, sol.trajectory) ==
          Approx(profit_1b(c, m)).epsilon(1e-3));
}

TEST_CASE("second-order convergence against the closed form") {
    const ModelInstance m = table1_model(0.02);
    const std::vector<GridSpec> grids = {{150, 12.0}, {300, 12.0}, {600, 12.0}};
    const ConvergenceReport report = grid_convergence(m, grids);

    REQUIRE(report.entries.size() == 3);
    CHECK(report.analytic_reference);
    for (double order : report.observed_orders) {
        CHECK(order == Approx(2.0).epsilon(0.1));  // 2.0 +- 0.2
    }
    // halving h cuts the error by about 4
    const double ratio = report.entries[0].max_error / report.entries[1].max_error;
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("no-breakage grids sit at round-off on every grid") {
    const ModelInstance m = table1_model(0.0);
    const std::vector<GridSpec> grids = {{150, 12.0}, {300, 12.0}, {600, 12.0}};
    const ConvergenceReport report = grid_convergence(m, grids);
    for (const auto& entry : report.entries) {
        CHECK(entry.max_error < 1e-6);
    }
}

TEST_CASE("grid_convergence input validation") {
    const ModelInstance m = table1_model(0.02);
    const std::vector<GridSpec> two = {{150, 12.0}, {300, 12.0}};
    CHECK_THROWS_AS(grid_convergence(m, two), std::invalid_argument);
    const std::vector<GridSpec> not_doubling = {{150, 12.0}, {300, 12.0}, {500, 12.0}};
    CHECK_THROWS_AS(grid_convergence(m, not_doubling), std::invalid_argument);
}

TEST_CASE("quadratic breakage converges and beats the steady baseline") {
    const ModelInstance m = gamma2_model();
    const BvpSolution sol = solve_bvp(m, GridSpec{1200, 12.0});

    CHECK(sol.converged);
    CHECK(sol.feasible);
    CHECK(sol.final_residual < 1e-8);
    CHECK(sol.trajectory.min_state() >= -1e-6);

    const double profit = profit_of_trajectory(m, sol.trajectory);
    const double baseline = profit_of_trajectory(m, steady_baseline(m, 1200));
    CHECK(profit > baseline);
}

TEST_CASE("quadratic breakage self-converges monotonically") {
    const ModelInstance m = gamma2_model();
    const std::vector<GridSpec> grids = {{300, 12.0}, {600, 12.0}, {1200, 12.0}};
    const ConvergenceReport report = grid_convergence(m, grids);
    CHECK_FALSE(report.analytic_reference);
    REQUIRE(report.entries.size() == 3);
    CHECK(report.entries[0].max_error > report.entries[1].max_error);
    CHECK(report.entries[1].max_error > report.entries[2].max_error);
}

TEST_CASE("iteration cap yields an explicit non-converged result") {
    const ModelInstance m = gamma2_model();
    NewtonSettings settings;
    settings.max_iters = 1;
    const BvpSolution sol = solve_bvp(m, GridSpec{400, 12.0}, settings);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 1);
    CHECK(sol.final_residual > settings.residual_tol);
    CHECK(sol.trajectory.size() == 401);  // best iterate is still reported
}

TEST_CASE("fractional gamma solves with the regularization floor") {
    ModelInstance m = table1_model(0.02);
    m.breakage.gamma = 0.9;
    const BvpSolution sol = solve_bvp(m, GridSpec{1200, 12.0});
    CHECK(sol.converged);
    CHECK(sol.feasible);
    // interior nodes stay far above the default 1e-6 floor here
    CHECK_FALSE(sol.regularization_active);

    NewtonSettings wide;
    wide.regularization_eps = 1.0;  // force the floor into play near the boundary
    const BvpSolution flagged = solve_bvp(m, GridSpec{1200, 12.0}, wide);
    CHECK(flagged.regularization_active);
}

TEST_CASE("infeasible extremals are reported, not hidden") {
    ModelInstance m = table1_model(0.02);
    m.holding.a = 50.0;  // holding so steep the stationary path dips negative
    const BvpSolution sol = solve_bvp(m, GridSpec{1200, 12.0});
    CHECK(sol.converged);
    CHECK_FALSE(sol.feasible);
    CHECK(sol.trajectory.min_state() < -1e-6);
}
