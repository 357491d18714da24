#pragma once

#include <cstddef>

#include "breakopt/model.hpp"

namespace breakopt {

/// Derived constants of the linear-breakage closed form (gamma = 1, n = 1,
/// b1 > 0). The state solves xddot - b1^2 x = f(t) with
/// f(t) = (a11 + a22 t + a33 t^2) / (2 beta10), and the control collapses
/// to u(t) = 2 A1 b1 e^{b1 t} - M1 - M2 t.
struct Model1aCoefficients {
    double a11 = 0.0;
    double a22 = 0.0;
    double a33 = 0.0;
    double C11 = 0.0;  // c10 + s2/T
    double A1 = 0.0;   // coefficient of e^{b1 t}
    double B1 = 0.0;   // coefficient of e^{-b1 t}
    double M1 = 0.0;
    double M2 = 0.0;
    double M3 = 0.0;  // -2 A1 b1 e^{b1 T}

    double forcing(const ModelInstance& model, double t) const;  // f(t)
};

/// Integration constants of the no-breakage cubic (b1 = 0, n = 1):
/// x(t) = A + B t + (a/(2 beta10) - d2) t^2/2 - (2 d3 - b/(2 beta10)) t^3/6.
/// A = 0 from x(0) = 0; B is set by x(T) = 0.
struct Model1bCoefficients {
    double A = 0.0;
    double B = 0.0;
};

/// Requires gamma = 1, n = 1 and b1 large enough that the boundary system
/// is well conditioned (b1 * T >= 1e-6); smaller b1 must use the b1 = 0
/// path. Throws std::invalid_argument otherwise.
Model1aCoefficients coefficients_1a(const ModelInstance& model);

double x_1a(const Model1aCoefficients& c, const ModelInstance& model, double t);
double xdot_1a(const Model1aCoefficients& c, const ModelInstance& model, double t);
double xddot_1a(const Model1aCoefficients& c, const ModelInstance& model, double t);
double u_1a(const Model1aCoefficients& c, const ModelInstance& model, double t);

/// Closed-form profit of the Model-1a extremal (term-by-term integration of
/// the reduced profit integrand along the closed-form trajectory).
double profit_1a(const Model1aCoefficients& c, const ModelInstance& model);

/// Requires b1 = 0 and n = 1.
Model1bCoefficients coefficients_1b(const ModelInstance& model);

double x_1b(const Model1bCoefficients& c, const ModelInstance& model, double t);
double xdot_1b(const Model1bCoefficients& c, const ModelInstance& model, double t);
double xddot_1b(const Model1bCoefficients& c, const ModelInstance& model, double t);
double u_1b(const Model1bCoefficients& c, const ModelInstance& model, double t);

double profit_1b(const Model1bCoefficients& c, const ModelInstance& model);

/// Samples a closed form on a uniform grid.
Trajectory sample_1a(const Model1aCoefficients& c, const ModelInstance& model,
                     std::size_t intervals);
Trajectory sample_1b(const Model1bCoefficients& c, const ModelInstance& model,
                     std::size_t intervals);

}  // namespace breakopt
