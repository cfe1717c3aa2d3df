#include "spocb/config.hpp"
#include "spocb/fixtures.hpp"
#include "spocb/sweep.hpp"
#include "spocb_cli.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

using namespace spocb;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spocb_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(std::initializer_list<std::string> args) {
    return cli::run_command(std::vector<std::string>(args));
}

} // namespace

TEST_SUITE("sweep") {
    TEST_CASE("scalar toy: gap below 1e-6 at every epsilon, any order of input") {
        const SpLqProblem p = scalar_toy();
        const SweepResult res = sweep(p, {0.02, 0.1, 0.05}, {}, 1);
        REQUIRE(res.rows.size() == 3);
        CHECK(res.rows[0].epsilon == 0.1);   // sorted decreasing
        CHECK(res.rows[2].epsilon == 0.02);
        for (const auto& row : res.rows) {
            REQUIRE(row.report.has_value());
            CHECK(row.report->gap <= 1e-6);
            CHECK(row.report->bracketing.value_or(false));
        }
    }

    TEST_CASE("partial failures are retained with markers") {
        // pi(eps) loses definiteness at large eps when pi12 dominates, so the
        // largest value fails while the small ones succeed.
        ProblemConfig c = fixture_config("f8-aircraft");
        c.pi12 = Matrix{{3.0, 0.0}, {0.0, 3.0}};
        const SpLqProblem p = build_problem(c);   // valid at eps = 0.0336
        const SweepResult res = sweep(p, {2.0, 0.03, 0.02, 0.01}, {}, 1);
        CHECK_FALSE(res.rows[0].report.has_value());
        CHECK_FALSE(res.rows[0].error.empty());
        for (size_t i = 1; i < res.rows.size(); ++i) {
            CHECK(res.rows[i].report.has_value());
        }
        // CSV keeps the failing row with empty numeric fields
        const std::string csv = res.to_csv();
        CHECK(csv.find("2,,,,,,,") != std::string::npos);
        // slope fit still uses the three successful rows
        CHECK(res.slope != 0.0);
    }

    TEST_CASE("too few or invalid epsilon lists") {
        const SpLqProblem p = scalar_toy();
        CHECK_THROWS_AS(sweep(p, {0.1, 0.05}, {}, 1), TooFewPoints);
        CHECK_THROWS_AS(sweep(p, {0.1, 0.05, 0.05}, {}, 1), SchemaError);
        CHECK_THROWS_AS(sweep(p, {0.1, 0.05, -0.01}, {}, 1), SchemaError);
    }

    TEST_CASE("SPOCB_THREADS caps the pool and keeps results identical") {
        const SpLqProblem p = scalar_toy();
        setenv("SPOCB_THREADS", "1", 1);
        const SweepResult serial = sweep(p, {0.1, 0.05, 0.02}, {});
        setenv("SPOCB_THREADS", "4", 1);
        const SweepResult pooled = sweep(p, {0.1, 0.05, 0.02}, {});
        unsetenv("SPOCB_THREADS");
        CHECK(serial.to_csv() == pooled.to_csv());
    }

    TEST_CASE("aircraft sweep: monotone gap, parallel equals serial") {
        const SpLqProblem p = f8_aircraft();
        const std::vector<double> eps = {0.04, 0.02, 0.01};
        const SweepResult serial = sweep(p, eps, {}, 1);
        const SweepResult parallel = sweep(p, eps, {}, 2);
        for (size_t i = 0; i < eps.size(); ++i) {
            REQUIRE(serial.rows[i].report.has_value());
            REQUIRE(parallel.rows[i].report.has_value());
            CHECK(serial.rows[i].report->csv_row() == parallel.rows[i].report->csv_row());
            if (i > 0) {
                CHECK(serial.rows[i].report->gap < serial.rows[i - 1].report->gap);
            }
        }
        CHECK(serial.to_csv() == parallel.to_csv());
        CHECK(serial.slope > 0.0);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("example then validate/solve round trip") {
        TempDir dir;
        CHECK(run({"example", "f8-aircraft", "--out", dir.path.string()}) == 0);
        const std::string cfg = dir.file("f8-aircraft.json");
        CHECK(fs::exists(cfg));
        CHECK(run({"validate", cfg}) == 0);

        // exported fixture equals the in-memory fixture
        const SpLqProblem p1 = load_problem_file(cfg);
        const SpLqProblem p2 = f8_aircraft();
        CHECK((p1.A() - p2.A()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((p1.z0 - p2.z0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p1.epsilon == p2.epsilon);
    }

    TEST_CASE("validate exits 1 and cites assumption (d) for R = 0") {
        TempDir dir;
        ProblemConfig c = fixture_config("scalar-toy");
        c.R = Matrix{{0.0}};
        std::ofstream(dir.file("bad.json")) << config_to_json(c);
        CHECK(run({"validate", dir.file("bad.json")}) == 1);
    }

    TEST_CASE("parse and schema failures exit 1") {
        TempDir dir;
        std::ofstream(dir.file("trunc.json")) << "{\"dims\": {\"m\": 2,";
        CHECK(run({"validate", dir.file("trunc.json")}) == 1);
        std::ofstream(dir.file("m0.json")) << R"({"dims":{"m":0,"n":1,"k":1},"epsilon":0.1})";
        CHECK(run({"validate", dir.file("m0.json")}) == 1);
        CHECK(run({"validate", dir.file("missing.json")}) == 1);
    }

    TEST_CASE("bounds command writes the report CSV") {
        TempDir dir;
        CHECK(run({"example", "scalar-toy", "--out", dir.path.string()}) == 0);
        CHECK(run({"bounds", dir.file("scalar-toy.json"), "--out", dir.path.string()}) == 0);
        std::ifstream in(dir.file("scalar-toy.bounds.csv"));
        REQUIRE(in.good());
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        CHECK(header == BoundsReport::csv_header());
        CHECK(row.find("0.1,0,") == 0);
    }

    TEST_CASE("solve on the n = 0 network export prints the reduced value") {
        TempDir dir;
        CHECK(run({"example", "network20-reduced", "--out", dir.path.string()}) == 0);
        CHECK(run({"solve", dir.file("network20-reduced.json"), "--out", dir.path.string()}) == 0);
        std::ifstream in(dir.file("network20-reduced.trajectory.csv"));
        REQUIRE(in.good());
        std::string header;
        std::getline(in, header);
        CHECK(header.rfind("t,z_1,z_2,z_3,z_4,u_1,", 0) == 0);
        CHECK(header.find("u_20,chi_1,chi_2,chi_3,chi_4") != std::string::npos);
    }

    TEST_CASE("sweep command: csv schema with slope columns") {
        TempDir dir;
        CHECK(run({"example", "scalar-toy", "--out", dir.path.string()}) == 0);
        CHECK(run({"sweep", dir.file("scalar-toy.json"), "--eps", "0.1,0.05,0.02", "--out",
                   dir.path.string()}) == 0);
        std::ifstream in(dir.file("scalar-toy.sweep.csv"));
        REQUIRE(in.good());
        std::string header;
        std::getline(in, header);
        CHECK(header == BoundsReport::csv_header() + ",slope,slope_stderr");
        int rows = 0;
        for (std::string line; std::getline(in, line) && !line.empty();) ++rows;
        CHECK(rows == 3);
        // sweep with fewer than 3 points exits nonzero
        CHECK(run({"sweep", dir.file("scalar-toy.json"), "--eps", "0.1,0.05", "--out",
                   dir.path.string()}) != 0);
    }

    TEST_CASE("no-oracle bounds leave the oracle column empty") {
        TempDir dir;
        CHECK(run({"example", "scalar-toy", "--out", dir.path.string()}) == 0);
        CHECK(run({"bounds", dir.file("scalar-toy.json"), "--no-oracle", "--out",
                   dir.path.string()}) == 0);
        std::ifstream in(dir.file("scalar-toy.bounds.csv"));
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        // columns: eps,order,upper,lower,gap,oracle,primal,dual -> ",," around oracle
        int commas = 0;
        size_t oracle_start = 0, fields = 0;
        for (size_t i = 0; i < row.size(); ++i) {
            if (row[i] == ',') {
                ++commas;
                if (commas == 5) oracle_start = i + 1;
                if (commas == 6) fields = i - oracle_start;
            }
        }
        CHECK(commas == 7);
        CHECK(fields == 0);   // empty oracle field
    }

    TEST_CASE("eps lists are rejected outside sweep") {
        TempDir dir;
        CHECK(run({"example", "scalar-toy", "--out", dir.path.string()}) == 0);
        CHECK(run({"bounds", dir.file("scalar-toy.json"), "--eps", "0.1,0.05"}) == 1);
    }

    TEST_CASE("unknown example name is a validation failure") {
        CHECK(run({"example", "does-not-exist"}) == 1);
    }

    TEST_CASE("eps override on bounds") {
        TempDir dir;
        CHECK(run({"example", "scalar-toy", "--out", dir.path.string()}) == 0);
        CHECK(run({"bounds", dir.file("scalar-toy.json"), "--eps", "0.05", "--out",
                   dir.path.string()}) == 0);
        std::ifstream in(dir.file("scalar-toy.bounds.csv"));
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        CHECK(row.rfind("0.05,", 0) == 0);
    }
}
