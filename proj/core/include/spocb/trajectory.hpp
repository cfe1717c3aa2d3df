#pragma once

#include "spocb/problem.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace spocb {

// Sampled state/control path on a step-triple grid (see OdeSolution). chi is
// optional: oracle trajectories carry the scaled costate, open-loop
// trajectories may leave it empty. zdot backs cubic interpolation.
struct Trajectory {
    std::vector<double> t;
    std::vector<Vector> z;
    std::vector<Vector> u;
    std::vector<Vector> chi;
    std::vector<Vector> zdot;
    std::string quadrature_rule = "gauss_lobatto_4";

    bool has_costate() const { return !chi.empty(); }
    Vector z_at(double tq) const;
};

// CSV with columns t, z_1..z_{m+n}, u_1..u_k, chi_1..chi_{m+n} (chi columns
// zero-filled when the trajectory carries no costate), 15 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// Sup-norm residual of I^eps zdot - A z - b u over the grid, zdot via
// fourth-order finite differences of the samples.
double primal_dynamics_residual(const SpLqProblem& p, const Trajectory& traj);

} // namespace spocb
