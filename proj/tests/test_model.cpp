#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "breakopt/experiment.hpp"
#include "breakopt/model.hpp"

using namespace breakopt;
using doctest::Approx;

namespace {

Trajectory constant_trajectory(const ModelInstance& model, std::size_t intervals, double x,
                               double u) {
    Trajectory traj;
    traj.times = make_uniform_grid(model.T, intervals);
    traj.x.assign(traj.times.size(), x);
    traj.u.assign(traj.times.size(), u);
    traj.d.resize(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) traj.d[i] = model.demand.at(traj.times[i]);
    return traj;
}

Trajectory steady_state_trajectory(const ModelInstance& model, std::size_t intervals) {
    Trajectory traj = constant_trajectory(model, intervals, 0.0, 0.0);
    traj.u = traj.d;
    return traj;
}

// Closed-form polynomial profit for x == 0, u == 0:
// int p d(t) - (N + L + s1/T) dt.
double zero_plan_profit(const ModelInstance& m) {
    const double T = m.T;
    const double rev =
        m.econ.p * (m.demand.d1 * T + m.demand.d2 * T * T / 2 + m.demand.d3 * T * T * T / 3);
    return rev - (m.econ.development_cost() + m.econ.s1 / T) * T;
}

}  // namespace

TEST_CASE("demand evaluates the quadratic") {
    const DemandPoly d{7.0, 4.0, 2.0};
    CHECK(demand_at(d, 0.0) == Approx(7.0));
    CHECK(demand_at(d, 1.0) == Approx(13.0));
    CHECK(demand_at(d, 12.0) == Approx(343.0));
    CHECK_THROWS_AS(demand_at(d, -1.0), std::invalid_argument);
}

TEST_CASE("holding cost law") {
    CHECK(holding_cost_at({3.0, 0.2, 1.0}, 0.0) == Approx(3.0));
    CHECK(holding_cost_at({3.0, 0.0, 1.0}, 8.3) == Approx(3.0));
    CHECK(holding_cost_at({3.0, 0.2, 1.0}, 5.0) == Approx(4.0));
    // 0^0 == 1: n = 0 degenerates to the constant a + b.
    CHECK(holding_cost_at({3.0, 0.2, 0.0}, 0.0) == Approx(3.2));
    CHECK(holding_cost_at({3.0, 0.2, 0.0}, 7.0) == Approx(3.2));
}

TEST_CASE("breakability law") {
    CHECK(breakability_at({0.02, 1.0}, 0.0) == Approx(0.0));
    CHECK(breakability_at({0.02, 1.0}, 100.0) == Approx(2.0));
    CHECK(breakability_at({0.0, 1.0}, 350.0) == Approx(0.0));
    CHECK_THROWS_AS(breakability_at({0.02, 1.0}, -1.0), std::invalid_argument);

    // nondecreasing in x for b1 >= 0, gamma > 0
    std::mt19937 rng(40441);
    std::uniform_real_distribution<double> xs(0.0, 500.0), g(0.25, 3.0), b(0.0, 0.5);
    for (int i = 0; i < 200; ++i) {
        const BreakabilityLaw law{b(rng), g(rng)};
        double x1 = xs(rng), x2 = xs(rng);
        if (x1 > x2) std::swap(x1, x2);
        CHECK(breakability_at(law, x1) <= breakability_at(law, x2) + 1e-12);
    }
}

TEST_CASE("production and set-up cost rates") {
    const EconomicParams econ = table1_model(0.02).econ;
    CHECK(production_cost_rate(econ, 0.0) == Approx(100.0));
    CHECK(production_cost_rate(econ, 100.0) == Approx(5170.0));
    CHECK(production_cost_rate(econ, 1.0) == Approx(101.2));

    CHECK(setup_cost_rate(econ, 0.0, 12.0) == Approx(10.0 / 12.0));
    CHECK(setup_cost_rate(econ, 100.0, 12.0) == Approx(310.0 / 12.0));
    EconomicParams zero = econ;
    zero.s1 = zero.s2 = 0.0;
    CHECK(setup_cost_rate(zero, 50.0, 12.0) == Approx(0.0));
    CHECK_THROWS_AS(setup_cost_rate(econ, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("state rhs and control recovery") {
    const ModelInstance m = table1_model(0.02);
    CHECK(state_rhs(m, 0.0, 0.0, 94.98) == Approx(87.98));

    const ModelInstance m0 = table1_model(0.0);
    CHECK(state_rhs(m0, 0.0, 0.0, 104.20) == Approx(97.20));
    CHECK(recover_control(m0, 0.0, 0.0, 97.2) == Approx(104.2));
    CHECK(recover_control(m0, 0.0, 0.0, 0.0) == Approx(7.0));

    // steady state: u = d + B(x) gives zero derivative
    CHECK(state_rhs(m, 3.0, 150.0, m.demand.at(3.0) + 0.02 * 150.0) == Approx(0.0));
    CHECK_THROWS_AS(state_rhs(m, 0.0, -1.0, 10.0), std::invalid_argument);
}

TEST_CASE("recover_control inverts state_rhs on random feasible tuples") {
    std::mt19937 rng(90210);
    std::uniform_real_distribution<double> ts(0.0, 12.0), xs(0.0, 500.0), us(0.0, 300.0);
    const ModelInstance models[] = {table1_model(0.0), table1_model(0.02), [] {
                                        ModelInstance m = table1_model(0.001);
                                        m.breakage.gamma = 2.0;
                                        return m;
                                    }()};
    for (const auto& m : models) {
        for (int i = 0; i < 100; ++i) {
            const double t = ts(rng), x = xs(rng), u = us(rng);
            const double back = recover_control(m, t, x, state_rhs(m, t, x, u));
            CHECK(back == Approx(u).epsilon(1e-12));
        }
    }
}

TEST_CASE("profit integrand values") {
    const ModelInstance m = table1_model(0.02);
    CHECK(profit_integrand(m, 0.0, 0.0, 0.0) == Approx(200.0 * 7.0 - 100.0 - 10.0 / 12.0));

    const double u = 94.98;
    const double expected =
        200.0 * 7.0 - (0.7 * u + 100.0 + 0.5 * u * u) - (10.0 + 3.0 * u) / 12.0;
    CHECK(profit_integrand(m, 0.0, 0.0, u) == Approx(expected).epsilon(1e-12));

    ModelInstance empty = table1_model(0.0);
    empty.econ.p = 0.0;
    empty.econ.c10 = empty.econ.L = empty.econ.N = empty.econ.s1 = empty.econ.s2 = 0.0;
    CHECK(profit_integrand(empty, 1.0, 0.0, 0.0) == Approx(0.0));

    CHECK_THROWS_AS(profit_integrand(m, 0.0, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(profit_integrand(m, 0.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("profit of the zero plan matches the polynomial closed form") {
    const ModelInstance m = table1_model(0.02);
    const Trajectory traj = constant_trajectory(m, 1200, 0.0, 0.0);
    CHECK(zero_plan_profit(m) == Approx(303590.0));  // oracle, exact for Table-1 numbers
    CHECK(profit_of_trajectory(m, traj) == Approx(zero_plan_profit(m)).epsilon(1e-12));
}

TEST_CASE("profit rejects degenerate grids") {
    const ModelInstance m = table1_model(0.02);
    Trajectory tiny = constant_trajectory(m, 1, 0.0, 0.0);
    CHECK_THROWS_AS(profit_of_trajectory(m, tiny), std::invalid_argument);

    Trajectory wrong_span = constant_trajectory(m, 16, 0.0, 0.0);
    for (double& t : wrong_span.times) t *= 0.5;
    CHECK_THROWS_AS(profit_of_trajectory(m, wrong_span), std::invalid_argument);
}

TEST_CASE("profit is exactly linear in the selling price") {
    const ModelInstance m = table1_model(0.02);
    ModelInstance doubled = m;
    doubled.econ.p *= 2.0;

    const Trajectory traj = steady_state_trajectory(m, 600);
    const double demand_integral = m.demand.d1 * m.T + m.demand.d2 * m.T * m.T / 2.0 +
                                   m.demand.d3 * m.T * m.T * m.T / 3.0;
    const double diff = profit_of_trajectory(doubled, traj) - profit_of_trajectory(m, traj);
    CHECK(diff == Approx(m.econ.p * demand_integral).epsilon(1e-12));
}

TEST_CASE("profit decreases when any cost parameter grows") {
    const ModelInstance base = table1_model(0.02);
    Trajectory traj = constant_trajectory(base, 400, 0.0, 0.0);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        traj.x[i] = t * (base.T - t);  // positive interior stock
        traj.u[i] = 50.0 + t;
    }
    const double ref = profit_of_trajectory(base, traj);
    const auto bump = [&](auto setter) {
        ModelInstance m = base;
        setter(m);
        return profit_of_trajectory(m, traj);
    };
    CHECK(bump([](ModelInstance& m) { m.holding.a += 1.0; }) < ref);
    CHECK(bump([](ModelInstance& m) { m.holding.b += 0.5; }) < ref);
    CHECK(bump([](ModelInstance& m) { m.econ.c10 += 1.0; }) < ref);
    CHECK(bump([](ModelInstance& m) { m.econ.beta10 += 0.5; }) < ref);
    CHECK(bump([](ModelInstance& m) { m.econ.s1 += 5.0; }) < ref);
    CHECK(bump([](ModelInstance& m) { m.econ.s2 += 1.0; }) < ref);
    CHECK(bump([](ModelInstance& m) { m.econ.N += 5.0; }) < ref);
    CHECK(bump([](ModelInstance& m) { m.econ.L += 5.0; }) < ref);
}

TEST_CASE("Simpson integrates cubic stock exactly on any even grid") {
    // Constant holding cost keeps h(t) x(t) cubic; composite Simpson is
    // then exact for every even interval count.
    const double a = 3.0, B = 102.0, c2 = -1.0, c3 = 4.0;
    const auto x = [&](double t) { return B * t + c2 * t * t / 2.0 - c3 * t * t * t / 6.0; };
    const double T = 12.0;
    const double exact =
        a * (B * T * T / 2.0 + c2 * T * T * T / 6.0 - c3 * T * T * T * T / 24.0);
    for (std::size_t m : {2u, 4u, 6u, 10u, 48u, 1200u}) {
        std::vector<double> t = make_uniform_grid(T, m), f(m + 1);
        for (std::size_t i = 0; i <= m; ++i) f[i] = a * x(t[i]);
        CHECK(integrate_samples(t, f) == Approx(exact).epsilon(1e-14));
    }
}

TEST_CASE("quadrature handles uneven and odd grids") {
    // quadratics are integrated exactly by the pairwise parabolic rule
    std::vector<double> t = {0.0, 0.7, 1.1, 2.4, 3.9, 5.0, 6.2};
    std::vector<double> f(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) f[i] = 3.0 * t[i] * t[i] - 2.0 * t[i] + 1.0;
    const double T = t.back();
    const double exact = T * T * T - T * T + T;
    CHECK(integrate_samples(t, f) == Approx(exact).epsilon(1e-12));

    std::vector<double> tu = make_uniform_grid(5.0, 7), fu(8);  // odd interval count
    for (std::size_t i = 0; i < tu.size(); ++i) fu[i] = tu[i] * tu[i] + 2.0;
    CHECK(integrate_samples(tu, fu) == Approx(125.0 / 3.0 + 10.0).epsilon(1e-12));

    std::vector<double> too_short = {0.0, 1.0};
    CHECK_THROWS_AS(integrate_samples(too_short, too_short), std::invalid_argument);
}

TEST_CASE("dynamics residual detects perturbations") {
    const ModelInstance m = table1_model(0.05);
    Trajectory traj = steady_state_trajectory(m, 240);
    CHECK(dynamics_residual(m, traj) < 1e-9);

    traj.u[120] += 1.0;
    CHECK(dynamics_residual(m, traj) >= 0.9);
    // a control spike without a matching state change exceeds the budget
    CHECK(dynamics_residual(m, traj) > dynamics_residual_bound(traj));
}

TEST_CASE("trajectory validation and feasibility") {
    const ModelInstance m = table1_model(0.02);
    Trajectory traj = steady_state_trajectory(m, 32);
    CHECK_NOTHROW(traj.validate_grid());
    CHECK(traj.is_feasible());

    traj.x[5] = -1e-10;  // round-off-scale excursion is tolerated
    CHECK(traj.is_feasible());
    traj.x[5] = -1e-6;
    CHECK_FALSE(traj.is_feasible());

    Trajectory bad = steady_state_trajectory(m, 32);
    bad.times[3] = bad.times[4];
    CHECK_THROWS_AS(bad.validate_grid(), std::invalid_argument);

    Trajectory offset = steady_state_trajectory(m, 32);
    for (double& t : offset.times) t += 0.5;
    CHECK_THROWS_AS(offset.validate_grid(), std::invalid_argument);

    Trajectory ragged = steady_state_trajectory(m, 32);
    ragged.u.pop_back();
    CHECK_THROWS_AS(ragged.validate_grid(), std::invalid_argument);
}

TEST_CASE("model validation catches bad parameters") {
    CHECK_NOTHROW(table1_model(0.02).validate());

    ModelInstance m = table1_model(0.02);
    m.econ.beta10 = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = table1_model(0.02);
    m.holding.a = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = table1_model(0.02);
    m.holding.b = -1.0;  // h(12) < 0
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = table1_model(0.02);
    m.T = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = table1_model(-0.1);
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    m = table1_model(0.02);
    m.breakage.gamma = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    // negative at the quadratic's interior vertex, positive at both ends
    m = table1_model(0.02);
    m.demand = {1.0, -4.0, 1.0};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    // negative at t = T
    m = table1_model(0.02);
    m.demand = {1.0, -1.0, 0.0};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("uniform grid spans the horizon") {
    const auto t = make_uniform_grid(12.0, 1200);
    REQUIRE(t.size() == 1201);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 12.0);
    CHECK(t[100] == Approx(1.0));
}
