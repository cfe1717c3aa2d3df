#include "spocb/config.hpp"
#include "spocb/fixtures.hpp"
#include "spocb/problem.hpp"

#include <doctest.h>

using namespace spocb;

namespace {

ProblemConfig identity_config() {
    ProblemConfig c;
    c.m = c.n = c.k = 1;
    c.epsilon = 1.0;
    c.horizon = 1.0;
    c.A11 = Matrix{{-1.0}};
    c.A12 = Matrix{{0.0}};
    c.A21 = Matrix{{0.0}};
    c.A22 = Matrix{{-1.0}};
    c.b1 = Matrix{{1.0}};
    c.b2 = Matrix{{1.0}};
    c.Q = Matrix::Identity(2, 2);
    c.R = Matrix{{1.0}};
    c.pi11 = Matrix{{1.0}};
    c.pi12 = Matrix{{0.0}};
    c.pi22 = Matrix{{1.0}};
    c.z0 = Vector{{1.0, 1.0}};
    return c;
}

} // namespace

TEST_SUITE("problem_model") {
    TEST_CASE("build_problem accepts the aircraft fixture and the identity case") {
        CHECK_NOTHROW(f8_aircraft());
        const SpLqProblem p = build_problem(identity_config());
        CHECK(p.dim() == 2);
        CHECK(p.A()(0, 0) == -1.0);
    }

    TEST_CASE("R = 0 violates assumption (d) at build time") {
        ProblemConfig c = identity_config();
        c.R = Matrix{{0.0}};
        CHECK_THROWS_AS(build_problem(c), NotPositiveDefinite);
        CHECK_THROWS_WITH_AS(build_problem(c),
                             doctest::Contains("assumption (d)"), NotPositiveDefinite);
    }

    TEST_CASE("dimension and finiteness guards") {
        ProblemConfig c = identity_config();
        c.A12 = Matrix::Zero(2, 1);
        CHECK_THROWS_AS(build_problem(c), DimensionMismatch);
        c = identity_config();
        c.Q(0, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(build_problem(c), NonFiniteEntry);
        c = identity_config();
        c.z0 = Vector{{1.0}};
        CHECK_THROWS_AS(build_problem(c), DimensionMismatch);
    }

    TEST_CASE("asymmetry: small gets symmetrized, large errors out") {
        ProblemConfig c = identity_config();
        c.Q(0, 1) = 1e-14;
        const SpLqProblem p = build_problem(c);
        CHECK(p.Q(0, 1) == p.Q(1, 0));
        c.Q(0, 1) = 1e-3;
        CHECK_THROWS_AS(build_problem(c), AsymmetryTooLarge);
    }

    TEST_CASE("pi(eps) definiteness depends on eps") {
        ProblemConfig c = identity_config();
        c.pi22 = Matrix{{-0.5}};
        c.epsilon = 0.5;
        CHECK_THROWS_AS(build_problem(c), NotPositiveDefinite);
    }

    TEST_CASE("scaled_dynamics divides the fast rows exactly") {
        SUBCASE("eps = 1 is the identity scaling") {
            const SpLqProblem p = build_problem(identity_config());
            const ScaledSystem s = scaled_dynamics(p);
            CHECK((s.Ahat - p.A()).cwiseAbs().maxCoeff() == 0.0);
        }
        SUBCASE("eps = 0.5 doubles the scalar fast row") {
            ProblemConfig c = identity_config();
            c.A22 = Matrix{{-2.0}};
            c.epsilon = 0.5;
            const SpLqProblem p = build_problem(c);
            const ScaledSystem s = scaled_dynamics(p);
            CHECK(s.Ahat(1, 1) == -4.0);   // exact binary division
            CHECK(s.bhat(1, 0) == 2.0);
        }
        SUBCASE("aircraft fixture: bit-exact division of the bottom rows") {
            const SpLqProblem p = f8_aircraft();
            const ScaledSystem s = scaled_dynamics(p);
            for (Index i = 0; i < 2; ++i) {
                for (Index j = 0; j < 4; ++j) {
                    CHECK(s.Ahat(2 + i, j) == p.A()(2 + i, j) / 0.0336);
                }
                CHECK(s.bhat(2 + i, 0) == p.b()(2 + i, 0) / 0.0336);
            }
            // top rows untouched
            CHECK((s.Ahat.topRows(2) - p.A().topRows(2)).cwiseAbs().maxCoeff() == 0.0);
        }
    }

    TEST_CASE("I^eps times its inverse is the identity") {
        for (double eps : {1.0, 0.3, 0.0336, 0.005, 1e-6}) {
            const SpLqProblem p = f8_aircraft(eps);
            const Vector prod = p.ieps_diag().cwiseProduct(p.ieps_inv_diag());
            CHECK((prod - Vector::Ones(4)).cwiseAbs().maxCoeff() < 1e-15);
        }
    }

    TEST_CASE("pi(eps) assembled from blocks is exactly symmetric") {
        const SpLqProblem p = f8_aircraft();
        const Matrix pi = p.pi();
        CHECK((pi - pi.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }

    TEST_CASE("validate_assumptions: aircraft passes, sign case fails (a)") {
        const AssumptionReport rep = validate_assumptions(f8_aircraft());
        CHECK(rep.all_pass());
        CHECK(rep.find("(g)") != nullptr);

        ProblemConfig c = identity_config();
        c.A22 = Matrix{{1.0}};
        const SpLqProblem bad = build_problem(c);
        const AssumptionReport rep2 = validate_assumptions(bad);
        CHECK_FALSE(rep2.all_pass());
        const auto* a = rep2.find("(a)-hurwitz");
        REQUIRE(a != nullptr);
        CHECK_FALSE(a->pass);
        CHECK(a->witness == doctest::Approx(1.0));
    }

    TEST_CASE("validate_assumptions: (g) spectrum for the uncontrolled fast block") {
        // b2 = 0, Q22 = I, A22 = -I gives G block-triangular with eigenvalues +-1.
        ProblemConfig c = identity_config();
        c.b2 = Matrix{{0.0}};
        const SpLqProblem p = build_problem(c);
        const AssumptionReport rep = validate_assumptions(p);
        const auto* g = rep.find("(g)");
        REQUIRE(g != nullptr);
        CHECK(g->pass);
        CHECK(g->witness == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("config round trip is bit-exact") {
        const ProblemConfig c = fixture_config("f8-aircraft");
        const std::string text = config_to_json(c);
        const ProblemConfig c2 = parse_problem_json(text);
        const SpLqProblem p1 = build_problem(c);
        const SpLqProblem p2 = build_problem(c2);
        CHECK((p1.A() - p2.A()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((p1.Q - p2.Q).cwiseAbs().maxCoeff() == 0.0);
        CHECK((p1.z0 - p2.z0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p1.epsilon == p2.epsilon);
        // idempotent: a second emission is textually identical
        CHECK(config_to_json(c2) == text);
    }

    TEST_CASE("schema errors carry the offending field") {
        CHECK_THROWS_AS(parse_problem_json("{ not json"), ParseError);
        CHECK_THROWS_AS(parse_problem_json("{}"), SchemaError);
        const std::string m0 = R"({"dims":{"m":0,"n":1,"k":1},"epsilon":0.1})";
        CHECK_THROWS_AS(parse_problem_json(m0), SchemaError);
    }

    TEST_CASE("n = 0 reduced export builds and validates") {
        const SpLqProblem p = reduced_as_problem(network20_reduced());
        CHECK(p.n == 0);
        CHECK(p.dim() == 4);
        CHECK(validate_assumptions(p).all_pass());
        const std::string text = problem_to_json(p);
        const SpLqProblem p2 = build_problem(parse_problem_json(text));
        CHECK((p2.A() - p.A()).cwiseAbs().maxCoeff() == 0.0);
    }
}
