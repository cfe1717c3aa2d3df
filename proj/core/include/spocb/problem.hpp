#pragma once

#include "spocb/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spocb {

// Raw, unvalidated problem data plus run options as parsed from a problem
// file. build_problem() turns this into a validated SpLqProblem.
struct ProblemConfig {
    Index m = 0, n = 0, k = 0;
    double epsilon = 0.0;
    double horizon = 1.0;
    Matrix A11, A12, A21, A22;
    Matrix b1, b2;
    Matrix Q;   // (m+n) x (m+n)
    Matrix R;   // k x k
    Matrix pi11, pi12, pi22;
    Vector z0;

    // Run options (file defaults; CLI flags override).
    double tol = 1e-8;
    int grid_min = 32;
    std::vector<double> eps_sweep;
    std::string out_dir;
    std::optional<double> eps_override;
};

// A singularly perturbed LQ instance
//
//   dz1/dt       = A11 z1 + A12 z2 + b1 u
//   eps dz2/dt   = A21 z1 + A22 z2 + b2 u
//   J            = 1/2 int_0^Tf (z'Qz + u'Ru) dt + 1/2 z(Tf)' pi(eps) z(Tf)
//
// with terminal weight pi(eps) = [[pi11, eps pi12], [eps pi12', eps pi22]].
// n == 0 is allowed and degenerates to an ordinary LQ problem (used when a
// reduced problem is exported through the same schema).
struct SpLqProblem {
    Index m = 0, n = 0, k = 0;
    double epsilon = 0.0;
    double horizon = 1.0;
    Matrix A11, A12, A21, A22;
    Matrix b1, b2;
    Matrix Q;
    Matrix R;
    Matrix pi11, pi12, pi22;
    Vector z0;

    Index dim() const { return m + n; }

    Matrix A() const;
    Matrix b() const;
    Matrix pi() const;                // pi(eps), assembled
    Vector ieps_diag() const;         // diag of I^eps
    Vector ieps_inv_diag() const;     // diag of I^(1/eps)

    Matrix Q11() const { return Q.topLeftCorner(m, m); }
    Matrix Q12() const { return Q.topRightCorner(m, n); }
    Matrix Q21() const { return Q.bottomLeftCorner(n, m); }
    Matrix Q22() const { return Q.bottomRightCorner(n, n); }

    // S blocks of the optimality system: Sij = bi R^-1 bj'.
    Matrix S11() const;
    Matrix S12() const;
    Matrix S22() const;

    Vector z10() const { return z0.head(m); }
    Vector z20() const { return z0.tail(n); }

    SpLqProblem with_epsilon(double eps) const;
};

struct AssumptionCheck {
    std::string id;          // "(a)-hurwitz", "(d)", ...
    std::string what;
    bool pass = false;
    double witness = 0.0;    // offending/critical eigenvalue or condition number
    double tolerance = 0.0;
    bool informational = false;  // reported but not gating (strict (a) reading)
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_pass() const;
    const AssumptionCheck* find(const std::string& id) const;
    std::string to_string() const;
};

// Scaled dynamics: I^(1/eps) A and I^(1/eps) b.
struct ScaledSystem {
    Matrix Ahat;
    Matrix bhat;
};

// Validates dimensions and finiteness, symmetrizes Q, R, pi11, pi22 when the
// relative asymmetry is at most 1e-12 (errors otherwise), and enforces the
// definiteness the cost functionals need (R, Q, pi(eps) positive definite).
SpLqProblem build_problem(const ProblemConfig& raw);

// Checks the standing assumptions on the dynamics and reports each one with
// a witness value. Never throws; downstream consumers decide.
AssumptionReport validate_assumptions(const SpLqProblem& p);

ScaledSystem scaled_dynamics(const SpLqProblem& p);

} // namespace spocb
