#include "spocb/reduced.hpp"

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

} // namespace

ReducedProblem build_reduced(const SpLqProblem& p) {
    ReducedProblem rp;
    rp.m = p.m;
    rp.k = p.k;
    rp.x0 = p.z10();
    rp.pi11_0 = p.pi11;
    rp.horizon = p.horizon;

    if (p.n == 0) {
        rp.calA = p.A11;
        rp.calB = p.b1;
        rp.calQ = p.Q;
        rp.calR = p.R;
        rp.calC = Matrix::Zero(p.m, p.k);
        return rp;
    }

    Eigen::FullPivLU<Matrix> lu(p.A22);
    if (!lu.isInvertible()) {
        throw SingularFastBlock("build_reduced: A22 is singular");
    }
    const Matrix A22i_A21 = lu.solve(p.A21);            // A22^-1 A21
    const Matrix A22i_b2 = lu.solve(p.b2);              // A22^-1 b2
    const Matrix Q11 = p.Q11(), Q12 = p.Q12(), Q21 = p.Q21(), Q22 = p.Q22();

    rp.calR = p.R + A22i_b2.transpose() * Q22 * A22i_b2;
    rp.calR = 0.5 * (rp.calR + rp.calR.transpose());
    rp.calC = (Q12 - A22i_A21.transpose() * Q22) * A22i_b2;
    rp.calB = p.b1 - p.A12 * A22i_b2;

    Matrix Qt = Q11 - Q12 * A22i_A21 - A22i_A21.transpose() * Q21 +
                A22i_A21.transpose() * Q22 * A22i_A21;
    const Matrix Rinv_Ct = rp.calR.llt().solve(rp.calC.transpose());
    rp.calQ = Qt - rp.calC * Rinv_Ct;
    rp.calQ = 0.5 * (rp.calQ + rp.calQ.transpose());
    rp.calA = p.A11 - p.A12 * A22i_A21 + rp.calB * Rinv_Ct;

    double w = 0.0;
    if (!is_positive_semidefinite(rp.calQ, 1e-9, &w)) {
        throw NotPsd("build_reduced: calQ is not positive semidefinite; min eigenvalue " +
                     std::to_string(w));
    }
    if (!is_positive_definite(rp.calR, 1e-12, &w)) {
        throw NotPositiveDefinite("build_reduced: calR lost positive definiteness");
    }
    return rp;
}

Vector SlowOuterSolution::x_at(double tq) const { return hermite_eval(t, x, xdot, tq); }
Vector SlowOuterSolution::chi1_at(double tq) const { return hermite_eval(t, chi1, chi1dot, tq); }
Vector SlowOuterSolution::u_at(double tq) const { return hermite_eval(t, u, udot, tq); }

SlowOuterSolution solve_reduced(const ReducedProblem& rp, double tol) {
    const Index m = rp.m;
    const double Tf = rp.horizon;
    const Matrix S = rp.calB * rp.calR.llt().solve(rp.calB.transpose());

    // Backward sweep in s = Tf - t (the reduced problem is not stiff, but the
    // same integrator serves).
    auto rrhs = [&](double, const Vector& v) {
        const Matrix P = unvec(v, m);
        return vec(Matrix(P * rp.calA + rp.calA.transpose() * P - P * S * P + rp.calQ));
    };
    auto rjac = [&](double, const Vector& v) {
        const Matrix P = unvec(v, m);
        const Matrix M = rp.calA - S * P;
        Matrix J(m * m, m * m);
        const Matrix I = Matrix::Identity(m, m);
        for (Index j = 0; j < m; ++j) {
            for (Index i = 0; i < m; ++i) {
                J.block(i * m, j * m, m, m) = M(j, i) * I;
            }
        }
        for (Index j = 0; j < m; ++j) {
            J.block(j * m, j * m, m, m) += M.transpose();
        }
        return J;
    };

    OdeOptions popt;
    popt.rtol = std::max(tol * 1e-2, 1e-13);
    popt.atol = std::max(tol * 1e-4, 1e-15);
    const OdeSolution ps = integrate_sdirk4(rrhs, rjac, 0.0, Tf, vec(rp.pi11_0), popt);

    std::vector<double> pt(ps.t.size());
    std::vector<Matrix> P(ps.t.size()), Pd(ps.t.size());
    for (size_t i = 0; i < ps.t.size(); ++i) {
        const size_t j = ps.t.size() - 1 - i;
        pt[i] = Tf - ps.t[j];
        Matrix Pi = unvec(ps.y[j], m);
        P[i] = 0.5 * (Pi + Pi.transpose());
        Pd[i] = -unvec(ps.f[j], m);
    }
    auto P_at = [&](double t) { return hermite_eval(pt, P, Pd, t); };

    auto xrhs = [&](double t, const Vector& x) -> Vector {
        return (rp.calA - S * P_at(t)) * x;
    };
    auto xjac = [&](double t, const Vector&) -> Matrix {
        return rp.calA - S * P_at(t);
    };
    OdeOptions xopt;
    xopt.rtol = std::max(tol * 1e-2, 1e-13);
    xopt.atol = std::max(tol * 1e-4, 1e-15);
    const OdeSolution xs = integrate_sdirk4(xrhs, xjac, 0.0, Tf, rp.x0, xopt);

    SlowOuterSolution out;
    out.t = xs.t;
    out.value = 0.5 * rp.x0.dot(P.front() * rp.x0);
    const size_t np = xs.t.size();
    out.x = xs.y;
    out.xdot = xs.f;
    out.chi1.resize(np);
    out.chi1dot.resize(np);
    out.u.resize(np);
    out.udot.resize(np);
    const double stat_tol = 1e-9;
    for (size_t i = 0; i < np; ++i) {
        const double t = xs.t[i];
        const Vector chi1 = P_at(t) * xs.y[i];
        // Reduced costate equation gives the derivative without differencing P.
        const Vector chi1dot = -rp.calQ * xs.y[i] - rp.calA.transpose() * chi1;
        const Vector u = -rp.calR.llt().solve(rp.calB.transpose() * chi1 -
                                              rp.calC.transpose() * xs.y[i]);
        const Vector udot = -rp.calR.llt().solve(rp.calB.transpose() * chi1dot -
                                                 rp.calC.transpose() * xs.f[i]);
        out.chi1[i] = chi1;
        out.chi1dot[i] = chi1dot;
        out.u[i] = u;
        out.udot[i] = udot;
        // Stationarity of the reduced Hamiltonian in the substituted control.
        const Vector stat = rp.calR * u + rp.calB.transpose() * chi1 - rp.calC.transpose() * xs.y[i];
        const double scale = 1.0 + chi1.norm();
        if (stat.cwiseAbs().maxCoeff() > stat_tol * scale) {
            throw Error("solve_reduced: reduced stationarity condition violated");
        }
    }
    return out;
}

std::pair<Vector, Vector> outer_fast_algebraic(const SpLqProblem& p,
                                               const Vector& x, const Vector& chi1) {
    const Index n = p.n;
    if (n == 0) {
        return {Vector(0), Vector(0)};
    }
    Matrix G(2 * n, 2 * n);
    G.topLeftCorner(n, n) = p.A22;
    G.topRightCorner(n, n) = -p.S22();
    G.bottomLeftCorner(n, n) = -p.Q22();
    G.bottomRightCorner(n, n) = -p.A22.transpose();
    Eigen::FullPivLU<Matrix> lu(G);
    if (!lu.isInvertible()) {
        throw SingularSystem("outer_fast_algebraic: fast coefficient matrix is singular");
    }
    Vector rhs(2 * n);
    rhs.head(n) = -p.A21 * x + p.S12().transpose() * chi1;
    rhs.tail(n) = p.Q21() * x + p.A12.transpose() * chi1;
    const Vector s = lu.solve(rhs);
    return {s.head(n), s.tail(n)};
}

Vector OuterSolution::z2_at(double t) const { return hermite_eval(slow.t, z2, z2dot, t); }
Vector OuterSolution::chi2_at(double t) const { return hermite_eval(slow.t, chi2, chi2dot, t); }

OuterSolution make_outer_solution(const SpLqProblem& p, double tol) {
    OuterSolution out;
    out.reduced = build_reduced(p);
    out.slow = solve_reduced(out.reduced, tol);

    const Index n = p.n;
    const size_t np = out.slow.t.size();
    out.z2.resize(np);
    out.chi2.resize(np);
    out.z2dot.resize(np);
    out.chi2dot.resize(np);
    if (n == 0) {
        for (size_t i = 0; i < np; ++i) {
            out.z2[i] = out.chi2[i] = out.z2dot[i] = out.chi2dot[i] = Vector(0);
        }
        return out;
    }

    Matrix G(2 * n, 2 * n);
    G.topLeftCorner(n, n) = p.A22;
    G.topRightCorner(n, n) = -p.S22();
    G.bottomLeftCorner(n, n) = -p.Q22();
    G.bottomRightCorner(n, n) = -p.A22.transpose();
    Eigen::PartialPivLU<Matrix> lu(G);   // constant matrices: factor once

    auto solve_pair = [&](const Vector& x, const Vector& chi1) {
        Vector rhs(2 * n);
        rhs.head(n) = -p.A21 * x + p.S12().transpose() * chi1;
        rhs.tail(n) = p.Q21() * x + p.A12.transpose() * chi1;
        return Vector(lu.solve(rhs));
    };
    for (size_t i = 0; i < np; ++i) {
        const Vector s = solve_pair(out.slow.x[i], out.slow.chi1[i]);
        const Vector sd = solve_pair(out.slow.xdot[i], out.slow.chi1dot[i]);
        out.z2[i] = s.head(n);
        out.chi2[i] = s.tail(n);
        out.z2dot[i] = sd.head(n);
        out.chi2dot[i] = sd.tail(n);
    }
    return out;
}

} // namespace spocb
