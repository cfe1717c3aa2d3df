#pragma once

#include "spocb/problem.hpp"
#include "spocb/trajectory.hpp"

namespace spocb {

// Value-function Hessian P(t) of the eps-scaled system on [0, Tf], from the
// backward matrix Riccati sweep
//   dP/dt = -P Ahat - Ahat' P + P bhat R^-1 bhat' P - Q,   P(Tf) = pi(eps).
struct RiccatiSolution {
    std::vector<double> t;       // ascending, step-triple structure
    std::vector<Matrix> P;
    std::vector<Matrix> Pdot;
    double tol = 1e-8;           // sweep tolerance, reused by the state sweep

    Matrix at(double tq) const;  // cubic Hermite between samples
    double t0() const { return t.front(); }
    double tf() const { return t.back(); }
};

RiccatiSolution solve_riccati_full(const SpLqProblem& p, double tol);

// 1/2 z0' P(0) z0.
double optimal_value(const RiccatiSolution& sol, const Vector& z0);

// Closed-loop optimal trajectory: state, control u = -R^-1 bhat' P z and the
// scaled costate chi = I^(1/eps) P z.
Trajectory optimal_trajectory(const SpLqProblem& p, const RiccatiSolution& sol);

// J_P of a sampled trajectory by the grid's bound quadrature rule plus the
// terminal cost. Unless skipped, the primal dynamics residual is checked
// against feas_tol first; InfeasibleTrajectory on violation.
double evaluate_primal_objective(const SpLqProblem& p, const Trajectory& traj,
                                 double feas_tol = 1e-4, bool skip_feasibility = false);

} // namespace spocb
