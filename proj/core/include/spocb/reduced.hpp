#pragma once

#include "spocb/problem.hpp"

#include <utility>
#include <vector>

namespace spocb {

// The m-dimensional non-perturbed problem
//   min 1/2 int_0^Tf (x' calQ x + v' calR v) dt + 1/2 x(Tf)' pi11_0 x(Tf)
//   s.t. dx/dt = calA x + calB v,  x(0) = x0,
// in the substituted control v = u - calR^-1 calC' x. The cross coupling calC
// is kept so the original-variable control can be recovered.
struct ReducedProblem {
    Index m = 0, k = 0;
    Matrix calA;     // m x m
    Matrix calB;     // m x k
    Matrix calQ;     // m x m, symmetric PSD
    Matrix calR;     // k x k, symmetric PD
    Matrix calC;     // m x k coupling
    Matrix pi11_0;   // m x m terminal weight
    Vector x0;
    double horizon = 1.0;
};

ReducedProblem build_reduced(const SpLqProblem& p);

// Slow outer variables from the reduced Riccati sweep. Samples live on a
// step-triple grid; *_dot holds derivatives for Hermite interpolation.
// u is the original-variable outer control -calR^-1 (calB' chi1 - calC' x).
struct SlowOuterSolution {
    std::vector<double> t;
    std::vector<Vector> x, chi1, u;
    std::vector<Vector> xdot, chi1dot, udot;
    double value = 0.0;   // reduced optimal value 1/2 x0' P(0) x0

    Vector x_at(double tq) const;
    Vector chi1_at(double tq) const;
    Vector u_at(double tq) const;
};

SlowOuterSolution solve_reduced(const ReducedProblem& rp, double tol);

// Solves the two algebraic rows of the zeroth-order outer system for
// (z2o, chi2o) given (z1o, chi1o) at one time sample.
std::pair<Vector, Vector> outer_fast_algebraic(const SpLqProblem& p,
                                               const Vector& x, const Vector& chi1);

// Full zeroth-order outer solution: slow variables plus the algebraic fast
// pair on the same grid, evaluable anywhere on [0, Tf].
struct OuterSolution {
    ReducedProblem reduced;
    SlowOuterSolution slow;
    std::vector<Vector> z2, chi2;
    std::vector<Vector> z2dot, chi2dot;

    Vector x_at(double t) const { return slow.x_at(t); }
    Vector chi1_at(double t) const { return slow.chi1_at(t); }
    Vector z2_at(double t) const;
    Vector chi2_at(double t) const;
    double horizon() const { return reduced.horizon; }
    double value() const { return slow.value; }
};

OuterSolution make_outer_solution(const SpLqProblem& p, double tol);

} // namespace spocb
