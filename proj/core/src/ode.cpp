#include "spocb/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spocb {

namespace {

constexpr double kGamma = 0.25;

// SDIRK4 tableau, Hairer & Wanner vol. II, table 6.5.
constexpr double kC[5] = {0.25, 0.75, 11.0 / 20.0, 0.5, 1.0};
constexpr double kA[5][5] = {
    {0.25, 0, 0, 0, 0},
    {0.5, 0.25, 0, 0, 0},
    {17.0 / 50.0, -1.0 / 25.0, 0.25, 0, 0},
    {371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0},
    {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25},
};
// b equals the last row (stiffly accurate); e = b - bhat drives the
// embedded order-3 error estimate.
constexpr double kE[5] = {-3.0 / 16.0, -27.0 / 32.0, 25.0 / 32.0, 0.0, 0.25};

struct ErrorNorm {
    double rtol, atol;
    double operator()(const Vector& v, const Vector& ref) const {
        double acc = 0.0;
        for (Index i = 0; i < v.size(); ++i) {
            const double sc = atol + rtol * std::abs(ref[i]);
            const double q = v[i] / sc;
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(std::max<Index>(1, v.size())));
    }
};

} // namespace

std::function<double(double)> layer_step_cap(double t0, double t1, double width, int pts) {
    const double span = t1 - t0;
    const double w = std::min(width, 0.25 * span);
    const double cap_layer = std::max(w / std::max(1, pts), 1e-300);
    const double cap_bulk = span / 16.0;
    return [=](double t) {
        if (t - t0 < w || t1 - t < w) return cap_layer;
        return cap_bulk;
    };
}

OdeSolution integrate_sdirk4(const OdeRhs& rhs, const OdeJacobian& jac,
                             double t0, double t1, const Vector& y0,
                             const OdeOptions& opts) {
    if (!(t1 > t0)) {
        throw IntegrationFailure("integrate_sdirk4: require t1 > t0");
    }
    const Index nd = y0.size();
    const ErrorNorm enorm{opts.rtol, opts.atol};

    std::vector<double> barriers(opts.barriers);
    barriers.push_back(t1);
    std::sort(barriers.begin(), barriers.end());

    auto cap_at = [&](double t) {
        double cap = t1 - t0;
        if (opts.max_step) cap = std::min(cap, opts.max_step(t));
        return cap;
    };

    OdeSolution sol;
    sol.t.push_back(t0);
    sol.y.push_back(y0);
    sol.f.push_back(rhs(t0, y0));

    double t = t0;
    Vector y = y0;
    Vector f0 = sol.f.front();

    double h = opts.h_init;
    if (h <= 0.0) {
        const double fscale = 1e-2 * (1.0 + y.norm()) / (1.0 + f0.norm());
        h = std::min({cap_at(t0), (t1 - t0) / 64.0, fscale});
    }
    h = std::max(h, opts.h_min);

    Eigen::PartialPivLU<Matrix> lu;
    Matrix jmat;
    bool have_jac = false;
    double h_factored = -1.0;

    auto refactor = [&](double tt, const Vector& yy, double hh) {
        if (!have_jac || !opts.jacobian_constant) {
            jmat = jac(tt, yy);
            have_jac = true;
        }
        lu.compute(Matrix::Identity(nd, nd) - (hh * kGamma) * jmat);
        h_factored = hh;
    };

    long steps = 0;
    std::vector<Vector> k(5, Vector::Zero(nd));

    while (t < t1 - 1e-14 * (t1 - t0)) {
        if (++steps > opts.max_steps) {
            throw IntegrationFailure("integrate_sdirk4: max step count exceeded");
        }
        h = std::min(h, cap_at(t));
        for (double bar : barriers) {
            if (bar > t + 1e-14 * (t1 - t0)) {
                // Land on the barrier without leaving a sliver step behind.
                // Stretch at most 2% (a rejected step must shrink on retry);
                // otherwise split the remainder evenly when it fits in two.
                const double rem = bar - t;
                if (rem <= 1.02 * h) {
                    h = rem;
                } else if (rem <= 2.0 * h) {
                    h = 0.5 * rem;
                }
                h = std::min(h, rem);
                break;
            }
        }
        if (h < opts.h_min) {
            throw IntegrationFailure("integrate_sdirk4: step size underflow");
        }

        if (h_factored < 0.0 || std::abs(h - h_factored) > 0.02 * h_factored ||
            !opts.jacobian_constant) {
            refactor(t, y, h);
        }

        bool stage_ok = true;
        for (int i = 0; i < 5 && stage_ok; ++i) {
            Vector di = y;
            for (int j = 0; j < i; ++j) {
                di += (h * kA[i][j]) * k[j];
            }
            Vector yi = (i == 0) ? Vector(y + (h * kGamma) * f0) : Vector(di + (h * kGamma) * k[i - 1]);
            const double ti = t + kC[i] * h;
            double prev_norm = std::numeric_limits<double>::infinity();
            bool converged = false;
            for (int it = 0; it < 12; ++it) {
                const Vector fi = rhs(ti, yi);
                const Vector g = yi - di - (h * kGamma) * fi;
                const Vector dy = lu.solve(g);
                yi -= dy;
                const double dn = enorm(dy, y);
                if (dn <= 0.03) {
                    k[i] = rhs(ti, yi);
                    converged = true;
                    break;
                }
                if (it > 2 && dn > 0.9 * prev_norm) {
                    break; // diverging Newton; retry with smaller step
                }
                prev_norm = dn;
            }
            if (!converged) stage_ok = false;
        }

        if (!stage_ok) {
            h *= 0.25;
            h_factored = -1.0;
            have_jac = opts.jacobian_constant && have_jac;
            continue;
        }

        Vector ynew = y;
        for (int i = 0; i < 5; ++i) {
            ynew += (h * kA[4][i]) * k[i];
        }
        Vector errv = Vector::Zero(nd);
        for (int i = 0; i < 5; ++i) {
            errv += (h * kE[i]) * k[i];
        }
        errv = lu.solve(errv); // damp the stiff components of the estimate
        Vector ref = y.cwiseAbs().cwiseMax(ynew.cwiseAbs());
        const double err = enorm(errv, ref);

        if (err <= 1.0) {
            const Vector fnew = k[4]; // stiffly accurate: k5 = f(t+h, ynew)
            const double tm = t + 0.5 * h;
            Vector ym = 0.5 * (y + ynew) + (h / 8.0) * (f0 - fnew);
            sol.t.push_back(tm);
            sol.y.push_back(ym);
            sol.f.push_back(rhs(tm, ym));
            sol.t.push_back(t + h);
            sol.y.push_back(ynew);
            sol.f.push_back(fnew);

            t += h;
            y = ynew;
            f0 = fnew;
            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.25), 0.2, 6.0);
            h *= fac;
        } else {
            const double fac = std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
            h *= fac;
        }
    }
    return sol;
}

} // namespace spocb
