#include "breakopt/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace breakopt {

namespace {

constexpr double kMinB1T = 1e-6;  // below this the boundary system is ill conditioned

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Dense polynomial in ascending powers; just enough arithmetic for the
// closed-form profit integrals.
using Poly = std::vector<double>;

Poly poly_mul(const Poly& p, const Poly& q) {
    Poly r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    }
    return r;
}

double poly_integral(const Poly& p, double T) {
    double sum = 0.0;
    double tk = T;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += p[i] * tk / static_cast<double>(i + 1);
        tk *= T;
    }
    return sum;
}

double poly_eval(const Poly& p, double t) {
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * t + p[i];
    return v;
}

// x(t) of the b1 = 0 model as polynomial coefficients.
Poly state_poly_1b(const Model1bCoefficients& c, const ModelInstance& m) {
    const double beta2 = 2.0 * m.econ.beta10;
    const double c2 = m.holding.a / beta2 - m.demand.d2;
    const double c3 = 2.0 * m.demand.d3 - m.holding.b / beta2;
    return {c.A, c.B, c2 / 2.0, -c3 / 6.0};
}

// u(t) of the b1 = 0 model as polynomial coefficients.
Poly control_poly_1b(const Model1bCoefficients& c, const ModelInstance& m) {
    const double beta2 = 2.0 * m.econ.beta10;
    return {c.B + m.demand.d1, m.holding.a / beta2, m.holding.b / (2.0 * beta2)};
}

}  // namespace

double Model1aCoefficients::forcing(const ModelInstance& model, double t) const {
    return (a11 + t * (a22 + t * a33)) / (2.0 * model.econ.beta10);
}

Model1aCoefficients coefficients_1a(const ModelInstance& model) {
    model.validate();
    require(model.breakage.gamma == 1.0, "coefficients_1a: requires gamma = 1");
    require(model.holding.n == 1.0, "coefficients_1a: requires n = 1");
    require(model.breakage.b1 > 0.0, "coefficients_1a: b1 = 0 has no exponential solution, use the b1 = 0 path");
    require(model.breakage.b1 * model.T >= kMinB1T,
            "coefficients_1a: b1*T below 1e-6 is ill conditioned, use the b1 = 0 path");

    const double b1 = model.breakage.b1;
    const double beta = model.econ.beta10;
    const double T = model.T;
    const auto& d = model.demand;

    Model1aCoefficients c;
    c.C11 = model.control_cost_linear();
    c.a11 = model.holding.a + b1 * model.econ.c10 + b1 * model.econ.s2 / T +
            2.0 * beta * b1 * d.d1 - 2.0 * beta * d.d2;
    c.a22 = model.holding.b - 4.0 * beta * d.d3 + 2.0 * beta * b1 * d.d2;
    c.a33 = 2.0 * beta * b1 * d.d3;

    // Boundary system for the integration constants:
    //   A1 + B1         = f(0)/b1^2 + a33/(b1^4 beta)
    //   A1 E + B1 / E   = f(T)/b1^2 + a33/(b1^4 beta),  E = e^{b1 T}
    const double b1sq = b1 * b1;
    const double K = c.a33 / (b1sq * b1sq * beta);
    const double r0 = c.forcing(model, 0.0) / b1sq + K;
    const double rT = c.forcing(model, T) / b1sq + K;
    const double E = std::exp(b1 * T);
    c.A1 = (rT - r0 / E) / (E - 1.0 / E);
    c.B1 = r0 - c.A1;

    c.M1 = c.a22 / (2.0 * b1sq * beta) + c.a11 / (2.0 * b1 * beta) + c.a33 / (b1sq * b1 * beta) -
           d.d1;
    c.M2 = c.a33 / (b1sq * beta) + c.a22 / (2.0 * b1 * beta) - d.d2;
    c.M3 = -2.0 * c.A1 * b1 * E;
    return c;
}

double x_1a(const Model1aCoefficients& c, const ModelInstance& model, double t) {
    const double b1 = model.breakage.b1;
    const double b1sq = b1 * b1;
    const double K = c.a33 / (b1sq * b1sq * model.econ.beta10);
    return c.A1 * std::exp(b1 * t) + c.B1 * std::exp(-b1 * t) - c.forcing(model, t) / b1sq - K;
}

double xdot_1a(const Model1aCoefficients& c, const ModelInstance& model, double t) {
    const double b1 = model.breakage.b1;
    const double fdot = (c.a22 + 2.0 * c.a33 * t) / (2.0 * model.econ.beta10);
    return b1 * (c.A1 * std::exp(b1 * t) - c.B1 * std::exp(-b1 * t)) - fdot / (b1 * b1);
}

double xddot_1a(const Model1aCoefficients& c, const ModelInstance& model, double t) {
    const double b1 = model.breakage.b1;
    const double fdd = c.a33 / model.econ.beta10;
    return b1 * b1 * (c.A1 * std::exp(b1 * t) + c.B1 * std::exp(-b1 * t)) - fdd / (b1 * b1);
}

double u_1a(const Model1aCoefficients& c, const ModelInstance& model, double t) {
    // The B1 e^{-b1 t} contributions of xdot and b1*x cancel identically.
    const double b1 = model.breakage.b1;
    return 2.0 * c.A1 * b1 * std::exp(b1 * t) - c.M1 - c.M2 * t;
}

double profit_1a(const Model1aCoefficients& c, const ModelInstance& model) {
    const double b1 = model.breakage.b1;
    const double beta = model.econ.beta10;
    const double T = model.T;
    const double b1sq = b1 * b1;
    const double E = std::exp(b1 * T);
    const double K = c.a33 / (b1sq * b1sq * beta);

    // Exponential moments over [0, T].
    const double e1 = (E - 1.0) / b1;                          // int e^{b1 t}
    const double e2 = (1.0 - 1.0 / E) / b1;                    // int e^{-b1 t}
    const double f1 = T * E / b1 - (E - 1.0) / b1sq;           // int t e^{b1 t}
    const double f2 = -T / (E * b1) + (1.0 - 1.0 / E) / b1sq;  // int t e^{-b1 t}
    const double e1sq = (E * E - 1.0) / (2.0 * b1);            // int e^{2 b1 t}

    // Polynomial moments of f(t) = (a11 + a22 t + a33 t^2)/(2 beta).
    const double sf1 = c.a11 * T + c.a22 * T * T / 2.0 + c.a33 * T * T * T / 3.0;
    const double sf2 = c.a11 * T * T / 2.0 + c.a22 * T * T * T / 3.0 + c.a33 * T * T * T * T / 4.0;

    const auto& d = model.demand;
    const double revenue =
        model.econ.p * (d.d1 * T + d.d2 * T * T / 2.0 + d.d3 * T * T * T / 3.0);
    const double fixed = model.econ.development_cost() * T + model.econ.s1;

    // int x and int t*x.
    const double int_x = c.A1 * e1 + c.B1 * e2 - sf1 / (2.0 * beta * b1sq) - K * T;
    const double int_tx =
        c.A1 * f1 + c.B1 * f2 - sf2 / (2.0 * beta * b1sq) - K * T * T / 2.0;
    const double holding = model.holding.a * int_x + model.holding.b * int_tx;

    // int u and int u^2 with u = G e^{b1 t} - (M1 + M2 t).
    const double G = 2.0 * c.A1 * b1;
    const double int_u = 2.0 * c.A1 * (E - 1.0) - c.M1 * T - c.M2 * T * T / 2.0;
    const double int_u2 = G * G * e1sq - 2.0 * G * (c.M1 * e1 + c.M2 * f1) + c.M1 * c.M1 * T +
                          c.M1 * c.M2 * T * T + c.M2 * c.M2 * T * T * T / 3.0;

    return revenue - fixed - holding - c.C11 * int_u - beta * int_u2;
}

Model1bCoefficients coefficients_1b(const ModelInstance& model) {
    model.validate();
    require(model.breakage.b1 == 0.0, "coefficients_1b: requires b1 = 0");
    require(model.holding.n == 1.0, "coefficients_1b: requires n = 1");

    const double beta2 = 2.0 * model.econ.beta10;
    const double T = model.T;
    const double c2 = model.holding.a / beta2 - model.demand.d2;
    const double c3 = 2.0 * model.demand.d3 - model.holding.b / beta2;

    Model1bCoefficients c;
    c.A = 0.0;  // x(0) = 0
    // x(T) = 0  =>  B = c3 T^2/6 - c2 T/2.
    c.B = c3 * T * T / 6.0 - c2 * T / 2.0;
    return c;
}

double x_1b(const Model1bCoefficients& c, const ModelInstance& model, double t) {
    return poly_eval(state_poly_1b(c, model), t);
}

double xdot_1b(const Model1bCoefficients& c, const ModelInstance& model, double t) {
    const Poly x = state_poly_1b(c, model);
    return x[1] + t * (2.0 * x[2] + t * 3.0 * x[3]);
}

double xddot_1b(const Model1bCoefficients& c, const ModelInstance& model, double t) {
    const Poly x = state_poly_1b(c, model);
    return 2.0 * x[2] + 6.0 * x[3] * t;
}

double u_1b(const Model1bCoefficients& c, const ModelInstance& model, double t) {
    return poly_eval(control_poly_1b(c, model), t);
}

double profit_1b(const Model1bCoefficients& c, const ModelInstance& model) {
    const double T = model.T;
    const auto& d = model.demand;
    const Poly x = state_poly_1b(c, model);
    const Poly u = control_poly_1b(c, model);

    const double revenue =
        model.econ.p * (d.d1 * T + d.d2 * T * T / 2.0 + d.d3 * T * T * T / 3.0);
    const double fixed = model.econ.development_cost() * T + model.econ.s1;
    const double holding = poly_integral(poly_mul({model.holding.a, model.holding.b}, x), T);
    const double linear_u = model.control_cost_linear() * poly_integral(u, T);
    const double quad_u = model.econ.beta10 * poly_integral(poly_mul(u, u), T);

    return revenue - fixed - holding - linear_u - quad_u;
}

namespace {

template <typename StateFn, typename ControlFn>
Trajectory sample_closed_form(const ModelInstance& model, std::size_t intervals, StateFn x_at,
                              ControlFn u_at) {
    require(intervals >= 2, "sample: needs at least 2 intervals");
    Trajectory traj;
    traj.times = make_uniform_grid(model.T, intervals);
    traj.x.resize(traj.times.size());
    traj.u.resize(traj.times.size());
    traj.d.resize(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        traj.x[i] = x_at(t);
        traj.u[i] = u_at(t);
        traj.d[i] = model.demand.at(t);
    }
    // The closed forms satisfy x(0) = x(T) = 0 up to round-off; pin the
    // endpoints so downstream feasibility checks see the exact boundary.
    traj.x.front() = 0.0;
    traj.x.back() = 0.0;
    return traj;
}

}  // namespace

Trajectory sample_1a(const Model1aCoefficients& c, const ModelInstance& model,
                     std::size_t intervals) {
    return sample_closed_form(
        model, intervals, [&](double t) { return x_1a(c, model, t); },
        [&](double t) { return u_1a(c, model, t); });
}

Trajectory sample_1b(const Model1bCoefficients& c, const ModelInstance& model,
                     std::size_t intervals) {
    return sample_closed_form(
        model, intervals, [&](double t) { return x_1b(c, model, t); },
        [&](double t) { return u_1b(c, model, t); });
}

}  // namespace breakopt
