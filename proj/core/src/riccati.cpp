#include "spocb/riccati.hpp"

#include "spocb/numerics.hpp"
#include "spocb/ode.hpp"

#include <cmath>

namespace spocb {

namespace {

Matrix unvec(const Vector& v, Index nd) {
    return Eigen::Map<const Matrix>(v.data(), nd, nd);
}

Vector vec(const Matrix& a) {
    return Eigen::Map<const Vector>(a.data(), a.size());
}

double layer_width(const SpLqProblem& p, double tol) {
    return p.epsilon * std::log(1.0 / std::max(tol, 1e-16));
}

OdeOptions sweep_options(const SpLqProblem& p, double tol, int grid_min = 32) {
    OdeOptions o;
    // Two digits tighter than the declared tolerance so that finite-difference
    // consistency checks of the output see integration noise well below tol.
    o.rtol = std::max(tol * 1e-2, 1e-13);
    o.atol = std::max(tol * 1e-4, 1e-15);
    o.max_step = layer_step_cap(0.0, p.horizon, layer_width(p, tol), grid_min);
    const double w = std::min(layer_width(p, tol), 0.25 * p.horizon);
    o.barriers = {w, p.horizon - w};
    return o;
}

} // namespace

Matrix RiccatiSolution::at(double tq) const {
    return hermite_eval(t, P, Pdot, tq);
}

RiccatiSolution solve_riccati_full(const SpLqProblem& p, double tol) {
    if (!(tol > 0.0)) {
        throw Error("solve_riccati_full: tol must be positive");
    }
    double w = 0.0;
    if (!is_positive_definite(p.R, 1e-12, &w)) {
        throw AssumptionViolated("solve_riccati_full: R not positive definite (assumption (d))");
    }
    if (!is_positive_definite(p.pi(), 1e-14, &w) || !is_positive_definite(p.Q, 1e-12, &w)) {
        throw AssumptionViolated("solve_riccati_full: Q or pi(eps) not positive definite");
    }

    const ScaledSystem sc = scaled_dynamics(p);
    const Matrix S = sc.bhat * p.R.llt().solve(sc.bhat.transpose());
    const Matrix& Ah = sc.Ahat;
    const Index nd = p.dim();
    const double Tf = p.horizon;

    // Backward sweep in s = Tf - t: dP/ds = P Ah + Ah' P - P S P + Q.
    auto rhs = [&](double, const Vector& v) {
        const Matrix P = unvec(v, nd);
        const Matrix d = P * Ah + Ah.transpose() * P - P * S * P + p.Q;
        return vec(d);
    };
    auto jac = [&](double, const Vector& v) {
        const Matrix P = unvec(v, nd);
        const Matrix M = Ah - S * P;            // dF/dP : X -> X M + M' X
        const Matrix I = Matrix::Identity(nd, nd);
        Matrix J(nd * nd, nd * nd);
        // vec(X M) = (M' (x) I) vec X, vec(M' X) = (I (x) M') vec X
        for (Index j = 0; j < nd; ++j) {
            for (Index i = 0; i < nd; ++i) {
                J.block(i * nd, j * nd, nd, nd) = M(j, i) * I;
            }
        }
        for (Index j = 0; j < nd; ++j) {
            J.block(j * nd, j * nd, nd, nd) += M.transpose();
        }
        return J;
    };

    OdeOptions opts = sweep_options(p, tol);
    const OdeSolution s = integrate_sdirk4(rhs, jac, 0.0, Tf, vec(p.pi()), opts);

    RiccatiSolution out;
    out.tol = tol;
    const size_t np = s.t.size();
    out.t.resize(np);
    out.P.resize(np);
    out.Pdot.resize(np);
    for (size_t i = 0; i < np; ++i) {
        const size_t j = np - 1 - i;
        out.t[i] = Tf - s.t[j];
        Matrix P = unvec(s.y[j], nd);
        P = 0.5 * (P + P.transpose());
        out.P[i] = P;
        out.Pdot[i] = -unvec(s.f[j], nd);   // d/dt = -d/ds
    }

    // Sanity on the invariants the type promises.
    for (size_t i = 0; i < np; i += std::max<size_t>(1, np / 8)) {
        const Matrix& P = out.P[i];
        const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
        if (sym_min_eig(P) < -1e-8 * scale) {
            throw IntegrationFailure("solve_riccati_full: P lost positive semidefiniteness");
        }
    }
    return out;
}

double optimal_value(const RiccatiSolution& sol, const Vector& z0) {
    if (sol.t.front() > 1e-12) {
        throw Error("optimal_value: Riccati solution does not cover t = 0");
    }
    return 0.5 * z0.dot(sol.P.front() * z0);
}

Trajectory optimal_trajectory(const SpLqProblem& p, const RiccatiSolution& sol) {
    const ScaledSystem sc = scaled_dynamics(p);
    const Matrix S = sc.bhat * p.R.llt().solve(sc.bhat.transpose());
    const Matrix rinv_bhat_t = p.R.llt().solve(sc.bhat.transpose());

    auto rhs = [&](double t, const Vector& z) -> Vector {
        return (sc.Ahat - S * sol.at(t)) * z;
    };
    auto jac = [&](double t, const Vector&) -> Matrix {
        return sc.Ahat - S * sol.at(t);
    };

    OdeOptions opts = sweep_options(p, sol.tol);
    const OdeSolution s = integrate_sdirk4(rhs, jac, 0.0, p.horizon, p.z0, opts);

    Trajectory traj;
    traj.t = s.t;
    traj.z = s.y;
    traj.zdot = s.f;
    traj.u.resize(s.t.size());
    traj.chi.resize(s.t.size());
    const Vector iinv = p.ieps_inv_diag();
    for (size_t i = 0; i < s.t.size(); ++i) {
        const Matrix P = sol.at(s.t[i]);
        traj.u[i] = -rinv_bhat_t * (P * s.y[i]);
        traj.chi[i] = iinv.asDiagonal() * (P * s.y[i]);
    }
    return traj;
}

double evaluate_primal_objective(const SpLqProblem& p, const Trajectory& traj,
                                 double feas_tol, bool skip_feasibility) {
    if (!skip_feasibility) {
        const double res = primal_dynamics_residual(p, traj);
        if (res > feas_tol) {
            throw InfeasibleTrajectory("evaluate_primal_objective: dynamics residual " +
                                       std::to_string(res) + " exceeds tolerance " +
                                       std::to_string(feas_tol));
        }
    }
    std::vector<double> f(traj.t.size());
    for (size_t i = 0; i < traj.t.size(); ++i) {
        f[i] = traj.z[i].dot(p.Q * traj.z[i]) + traj.u[i].dot(p.R * traj.u[i]);
    }
    const double integral = lobatto_quadrature(traj.t, f);
    const Vector zf = traj.z.back();
    return 0.5 * integral + 0.5 * zf.dot(p.pi() * zf);
}

} // namespace spocb
