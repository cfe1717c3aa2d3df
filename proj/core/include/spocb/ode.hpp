#pragma once

#include "spocb/types.hpp"

#include <functional>
#include <vector>

namespace spocb {

// Right-hand side f(t, y) and Jacobian df/dy of a first-order ODE system.
using OdeRhs = std::function<Vector(double, const Vector&)>;
using OdeJacobian = std::function<Matrix(double, const Vector&)>;

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0.0;               // 0: choose automatically
    double h_min = 1e-14;
    long max_steps = 2000000;
    bool jacobian_constant = false;    // factor once, refactor only on step change
    std::function<double(double)> max_step;   // optional cap as a function of t
    std::vector<double> barriers;      // times the integrator lands on exactly
};

// Accepted-step grid with per-step midpoints: t has 2*steps+1 entries and
// t[2i+1] is the midpoint of [t[2i], t[2i+2]]. f holds the rhs at each node,
// so the grid supports cubic Hermite interpolation and the composite
// Gauss-Lobatto rule directly.
struct OdeSolution {
    std::vector<double> t;
    std::vector<Vector> y;
    std::vector<Vector> f;
};

// Adaptive SDIRK integrator of order 4 (L-stable, stiffly accurate,
// gamma = 1/4; Hairer & Wanner coefficients) with an embedded order-3 error
// estimate filtered through (I - h*gamma*J). Integrates from t0 to t1 > t0.
// Throws IntegrationFailure on step-size underflow or Newton breakdown.
OdeSolution integrate_sdirk4(const OdeRhs& rhs, const OdeJacobian& jac,
                             double t0, double t1, const Vector& y0,
                             const OdeOptions& opts = {});

// Step-size cap resolving two boundary layers of width `width`, `pts` steps
// per layer, for use as OdeOptions::max_step on [t0, t1].
std::function<double(double)> layer_step_cap(double t0, double t1, double width, int pts);

} // namespace spocb
