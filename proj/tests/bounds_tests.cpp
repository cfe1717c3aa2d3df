#include "spocb/bounds.hpp"
#include "spocb/fixtures.hpp"
#include "spocb/layers.hpp"
#include "spocb/numerics.hpp"
#include "spocb/riccati.hpp"
#include "support/random_instances.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace spocb;

TEST_SUITE("duality_bounds") {
    TEST_CASE("upper bound with the oracle control recovers the optimal value") {
        const SpLqProblem p = f8_aircraft();
        const RiccatiSolution sol = solve_riccati_full(p, 1e-9);
        const double vstar = optimal_value(sol, p.z0);
        const ScaledSystem sc = scaled_dynamics(p);
        const Matrix rinv_bhat_t = p.R.llt().solve(sc.bhat.transpose());
        // open-loop optimal control recovered from the oracle sweep
        const Trajectory traj = optimal_trajectory(p, sol);
        auto u_from_traj = [&](double t) -> Vector {
            return -rinv_bhat_t * (sol.at(t) * traj.z_at(t));
        };
        const UpperBoundResult up = upper_bound(p, u_from_traj, 1e-8);
        CHECK(std::abs(up.value - vstar) <= 1e-6 * (1.0 + std::abs(vstar)));
    }

    TEST_CASE("zero control still upper-bounds the optimum") {
        const SpLqProblem p = f8_aircraft();
        const RiccatiSolution sol = solve_riccati_full(p, 1e-9);
        const double vstar = optimal_value(sol, p.z0);
        const UpperBoundResult up =
            upper_bound(p, [](double) { return Vector::Zero(1); }, 1e-8);
        CHECK(up.value >= vstar - 1e-8);
    }

    TEST_CASE("dual control from state: trivial identities") {
        const SpLqProblem p = f8_aircraft();
        auto traj = std::make_shared<Trajectory>();
        traj->t = {0.0, 0.5, 1.0};
        traj->z = {Vector::Zero(4), Vector::Zero(4), Vector::Zero(4)};
        traj->zdot = traj->z;
        traj->u = {Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
        const ControlFunction rho = dual_control_from_state(p, traj);
        CHECK(rho(0.3).norm() == 0.0);

        // Q = I means rho equals the state; initial sample is exact
        auto traj2 = std::make_shared<Trajectory>(*traj);
        traj2->z = {p.z0, 0.5 * p.z0, 0.25 * p.z0};
        traj2->zdot = {Vector::Zero(4), Vector::Zero(4), Vector::Zero(4)};
        const ControlFunction rho2 = dual_control_from_state(p, traj2);
        CHECK((rho2(0.0) - p.Q * p.z0).cwiseAbs().maxCoeff() < 1e-14);
    }

    TEST_CASE("dual terminal condition") {
        const SpLqProblem p = f8_aircraft();
        SUBCASE("zero terminal control maps to zero") {
            CHECK(dual_terminal(p, Vector::Zero(4)).norm() == 0.0);
        }
        SUBCASE("identity blocks cancel: Q = I, pi = I^eps gives -rho") {
            // the aircraft fixture has Q = I and pi = I^eps exactly
            const Vector r{{0.4, -1.0, 2.0, 0.3}};
            CHECK((dual_terminal(p, r) + r).cwiseAbs().maxCoeff() < 1e-13);
        }
        SUBCASE("substituting rho = Q zhat reproduces -I^(1/eps) pi zhat") {
            const Vector zf{{1.0, -0.5, 0.25, 2.0}};
            const Vector g = dual_terminal(p, p.Q * zf);
            Matrix ipin(4, 4);
            ipin.topLeftCorner(2, 2) = p.pi11;
            ipin.topRightCorner(2, 2) = p.epsilon * p.pi12;
            ipin.bottomLeftCorner(2, 2) = p.pi12.transpose();
            ipin.bottomRightCorner(2, 2) = p.pi22;
            CHECK((g + ipin * zf).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    TEST_CASE("lower bound: zero dual data gives J_D = 0") {
        const SpLqProblem p = f8_aircraft();
        const LowerBoundResult low = lower_bound(
            p, [](double) { return Vector::Zero(4); }, Vector::Zero(4), 1e-8);
        CHECK(std::abs(low.value) < 1e-12);
        const RiccatiSolution sol = solve_riccati_full(p, 1e-9);
        CHECK(low.value <= optimal_value(sol, p.z0));   // still a valid bound
    }

    TEST_CASE("mapped optimum attains the primal value from below") {
        const SpLqProblem p = f8_aircraft();
        const RiccatiSolution sol = solve_riccati_full(p, 1e-9);
        const double vstar = optimal_value(sol, p.z0);
        auto traj = std::make_shared<Trajectory>(optimal_trajectory(p, sol));
        const ControlFunction rho = dual_control_from_state(p, traj);
        const Vector gtf = dual_terminal(p, rho(p.horizon));
        const LowerBoundResult low = lower_bound(p, rho, gtf, 1e-8);
        CHECK(std::abs(low.value - vstar) <= 1e-5 * (1.0 + std::abs(vstar)));
        CHECK(low.value <= vstar + 1e-8 * (1.0 + std::abs(vstar)));
    }

    TEST_CASE("composite dual control lower-bounds the optimum") {
        const SpLqProblem p = f8_aircraft();
        const RiccatiSolution sol = solve_riccati_full(p, 1e-9);
        const double vstar = optimal_value(sol, p.z0);
        const BoundsReport rep = bounds_report(p);
        CHECK(rep.lower <= vstar + 1e-8 * (1.0 + std::abs(vstar)));
        CHECK(rep.upper >= vstar - 1e-8 * (1.0 + std::abs(vstar)));
    }

    TEST_CASE("dual feasibility residual: integrator output, stationary case, fault") {
        const SpLqProblem p = f8_aircraft();
        const double tol = 1e-8;
        const CompositeApproximation comp = build_composite(p, tol);
        const UpperBoundResult up =
            upper_bound(p, [&](double t) { return comp.u0(t); }, tol);
        auto traj = std::make_shared<Trajectory>(up.trajectory);
        const ControlFunction rho = dual_control_from_state(p, traj);
        const Vector gtf = dual_terminal(p, rho(p.horizon));
        LowerBoundResult low = lower_bound(p, rho, gtf, tol);
        CHECK(dual_feasibility_residual(p, low.trajectory) <= 100.0 * tol);

        SUBCASE("stationary pair has near-zero residual") {
            DualTrajectory dt;
            const Vector gamma = Vector{{1.0, -2.0, 0.5, 0.7}};
            const Vector rho_c = p.A().transpose() * gamma;
            const int npts = 33;
            for (int i = 0; i < npts; ++i) {
                dt.t.push_back(static_cast<double>(i) / (npts - 1));
                dt.gamma.push_back(gamma);
                dt.rho.push_back(rho_c);
                dt.gammadot.push_back(Vector::Zero(4));
            }
            CHECK(dual_feasibility_residual(p, dt) < 1e-12);
        }
        SUBCASE("a corrupted sample is flagged") {
            size_t mid = low.trajectory.gamma.size() / 2;
            mid -= mid % 2;   // residuals difference the step endpoints
            low.trajectory.gamma[mid][0] += 1.0;
            CHECK(dual_feasibility_residual(p, low.trajectory) > 1e-2);
        }
        SUBCASE("too few points") {
            DualTrajectory dt;
            dt.t = {0.0, 1.0};
            dt.gamma = {Vector::Zero(4), Vector::Zero(4)};
            dt.rho = dt.gamma;
            dt.gammadot = dt.gamma;
            CHECK_THROWS_AS(dual_feasibility_residual(p, dt), GridTooCoarse);
        }
    }

    TEST_CASE("strong duality on the aircraft fixture") {
        const SpLqProblem p = f8_aircraft();
        const RiccatiSolution sol = solve_riccati_full(p, 1e-9);
        const Trajectory traj = optimal_trajectory(p, sol);
        CHECK(strong_duality_check(p, traj) <= 1e-5);
    }

    TEST_CASE("strong duality requires the costate") {
        const SpLqProblem p = scalar_toy();
        Trajectory traj;
        traj.t = {0.0, 0.5, 1.0};
        traj.z = {p.z0, p.z0, p.z0};
        traj.zdot = {Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)};
        traj.u = {Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
        CHECK_THROWS_AS(strong_duality_check(p, traj), Error);
    }

    TEST_CASE("strong duality is trivial at z0 = 0") {
        SpLqProblem p = f8_aircraft();
        p.z0 = Vector::Zero(4);
        const RiccatiSolution sol = solve_riccati_full(p, 1e-9);
        const Trajectory traj = optimal_trajectory(p, sol);
        CHECK(strong_duality_check(p, traj) < 1e-12);
        CHECK(optimal_value(sol, p.z0) == 0.0);
    }

    TEST_CASE("bounds_report: aircraft brackets the oracle") {
        const SpLqProblem p = f8_aircraft();
        const BoundsReport rep = bounds_report(p);
        REQUIRE(rep.oracle.has_value());
        CHECK(rep.bracketing.value_or(false));
        CHECK(rep.gap >= -1e-9 * (1.0 + std::abs(rep.upper)));
        CHECK(rep.lower <= *rep.oracle + 1e-6 * (1.0 + std::abs(*rep.oracle)));
        CHECK(*rep.oracle <= rep.upper + 1e-6 * (1.0 + std::abs(*rep.oracle)));
        CHECK(rep.primal_residual < 1e-5);
        CHECK(rep.dual_residual < 1e-5);
    }

    TEST_CASE("bounds_report: degenerate z0 = 0 collapses to zero") {
        SpLqProblem p = f8_aircraft();
        p.z0 = Vector::Zero(4);
        const BoundsReport rep = bounds_report(p);
        CHECK(std::abs(rep.upper) < 1e-12);
        CHECK(std::abs(rep.lower) < 1e-12);
        REQUIRE(rep.oracle.has_value());
        CHECK(std::abs(*rep.oracle) < 1e-12);
    }

    TEST_CASE("bounds_report with the literal upper-trajectory dual source") {
        const SpLqProblem p = f8_aircraft();
        BoundsOptions opts;
        opts.dual_source = BoundsOptions::DualSource::upper_trajectory;
        const BoundsReport rep = bounds_report(p, opts);
        REQUIRE(rep.oracle.has_value());
        CHECK(rep.bracketing.value_or(false));   // looser, still valid
        const BoundsReport tight = bounds_report(p);
        CHECK(tight.gap <= rep.gap);
    }

    TEST_CASE("bounds_report without the oracle still produces finite bounds") {
        const SpLqProblem p = clustered_surrogate(0.25);
        BoundsOptions opts;
        opts.with_oracle = false;
        const BoundsReport rep = bounds_report(p, opts);
        CHECK_FALSE(rep.oracle.has_value());
        CHECK(std::isfinite(rep.upper));
        CHECK(std::isfinite(rep.lower));
        CHECK(rep.upper >= rep.lower - 1e-9);
    }

    TEST_CASE("bounds_report refuses instances violating the assumptions") {
        ProblemConfig c;
        c.m = 1; c.n = 1; c.k = 1;
        c.epsilon = 0.1;
        c.A11 = Matrix{{-1.0}};
        c.A12 = Matrix{{0.0}};
        c.A21 = Matrix{{0.0}};
        c.A22 = Matrix{{1.0}};   // unstable fast block
        c.b1 = Matrix{{1.0}};
        c.b2 = Matrix{{0.0}};
        c.Q = Matrix::Identity(2, 2);
        c.R = Matrix{{1.0}};
        c.pi11 = Matrix{{1.0}};
        c.pi12 = Matrix{{0.0}};
        c.pi22 = Matrix{{1.0}};
        c.z0 = Vector{{1.0, 1.0}};
        CHECK_THROWS_AS(bounds_report(build_problem(c)), AssumptionViolated);
    }

    TEST_CASE("reports are deterministic: identical CSV on repeated runs") {
        const SpLqProblem p = f8_aircraft();
        const BoundsReport r1 = bounds_report(p);
        const BoundsReport r2 = bounds_report(p);
        CHECK(r1.csv_row() == r2.csv_row());
    }

    TEST_CASE("J_D integrand terms are nonpositive sample by sample") {
        const SpLqProblem p = f8_aircraft();
        const CompositeApproximation comp = build_composite(p, 1e-8);
        const UpperBoundResult up =
            upper_bound(p, [&](double t) { return comp.u0(t); }, 1e-8);
        auto traj = std::make_shared<Trajectory>(up.trajectory);
        const ControlFunction rho = dual_control_from_state(p, traj);
        const LowerBoundResult low =
            lower_bound(p, rho, dual_terminal(p, rho(p.horizon)), 1e-8);
        const Matrix bRbt = p.b() * p.R.llt().solve(p.b().transpose());
        for (size_t i = 0; i < low.trajectory.t.size(); i += 3) {
            const Vector& g = low.trajectory.gamma[i];
            const Vector& r = low.trajectory.rho[i];
            CHECK(-r.dot(p.Q.llt().solve(r)) <= 1e-12);
            CHECK(-g.dot(bRbt * g) <= 1e-12);
        }
    }

    TEST_CASE("n = 0 embedding: bounds collapse onto the reduced optimum") {
        const SpLqProblem p = reduced_as_problem(network20_reduced());
        const BoundsReport rep = bounds_report(p);
        REQUIRE(rep.oracle.has_value());
        CHECK(rep.bracketing.value_or(false));
        CHECK(rep.gap <= 1e-6 * (1.0 + std::abs(*rep.oracle)));
        CHECK(std::abs(*rep.oracle - 1.4132) < 2e-3);
    }
}
