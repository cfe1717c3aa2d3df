#include "spocb_cli.hpp"

#include "spocb/bounds.hpp"
#include "spocb/config.hpp"
#include "spocb/fixtures.hpp"
#include "spocb/riccati.hpp"
#include "spocb/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace spocb::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

struct CommonFlags {
    std::string file;
    double tol = 1e-8;
    int grid_min = 32;
    int order = 0;
    bool no_oracle = false;
    std::string out_dir = ".";
    std::vector<double> eps;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

SpLqProblem load(const CommonFlags& fl, ProblemConfig* raw_out = nullptr) {
    ProblemConfig c = load_problem_config(fl.file);
    if (c.eps_override) c.epsilon = *c.eps_override;
    if (fl.eps.size() == 1) {
        c.epsilon = fl.eps.front();
    } else if (fl.eps.size() > 1 && !raw_out) {
        throw SchemaError("--eps takes a single value here; lists belong to `sweep`");
    }
    if (raw_out) *raw_out = c;
    return build_problem(c);
}

std::string stem_of(const std::string& path) {
    return fs::path(path).stem().string();
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write output file: " + path.string());
    }
    out << text;
}

void print_report(const BoundsReport& r) {
    std::cout << "eps             = " << fmt(r.epsilon) << "\n"
              << "order           = " << r.order << "\n"
              << "upper bound     = " << fmt(r.upper) << "\n"
              << "lower bound     = " << fmt(r.lower) << "\n"
              << "gap             = " << fmt(r.gap) << "\n";
    if (r.oracle) {
        std::cout << "oracle V_P      = " << fmt(*r.oracle) << "\n"
                  << "bracketing      = " << (r.bracketing.value_or(false) ? "yes" : "NO") << "\n";
    } else {
        std::cout << "oracle V_P      = (not computed)\n";
    }
    std::cout << "primal residual = " << fmt(r.primal_residual) << "\n"
              << "dual residual   = " << fmt(r.dual_residual) << "\n";
}

int cmd_validate(const CommonFlags& fl) {
    const SpLqProblem p = load(fl);
    const AssumptionReport rep = validate_assumptions(p);
    std::cout << rep.to_string();
    return rep.all_pass() ? kExitOk : kExitValidation;
}

int cmd_solve(const CommonFlags& fl) {
    // n = 0 exports degenerate to a plain LQ problem; the same sweep applies.
    const SpLqProblem p = load(fl);
    const RiccatiSolution sol = solve_riccati_full(p, fl.tol);
    std::cout << "V_P = " << fmt(optimal_value(sol, p.z0)) << "\n";
    const Trajectory traj = optimal_trajectory(p, sol);
    const fs::path out = fs::path(fl.out_dir) / (stem_of(fl.file) + ".trajectory.csv");
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    write_file(out, os.str());
    std::cout << "trajectory written: " << out.string() << "\n";
    return kExitOk;
}

int cmd_bounds(const CommonFlags& fl) {
    const SpLqProblem p = load(fl);
    BoundsOptions opts;
    opts.tol = fl.tol;
    opts.grid_min = fl.grid_min;
    opts.order = fl.order;
    opts.with_oracle = !fl.no_oracle;
    const BoundsReport r = bounds_report(p, opts);
    print_report(r);
    const fs::path out = fs::path(fl.out_dir) / (stem_of(fl.file) + ".bounds.csv");
    write_file(out, BoundsReport::csv_header() + "\n" + r.csv_row() + "\n");
    std::cout << "report written: " << out.string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonFlags& fl) {
    ProblemConfig raw;
    const SpLqProblem p = load(fl, &raw);
    std::vector<double> eps = fl.eps.empty() ? raw.eps_sweep : fl.eps;
    if (eps.empty()) {
        throw SchemaError("sweep: provide --eps e1,e2,e3,... or options.eps_sweep in the file");
    }
    BoundsOptions opts;
    opts.tol = fl.tol;
    opts.grid_min = fl.grid_min;
    opts.order = fl.order;
    opts.with_oracle = !fl.no_oracle;
    const SweepResult res = sweep(p, eps, opts);
    for (const auto& row : res.rows) {
        if (row.report) {
            std::cout << "eps=" << fmt(row.epsilon) << " upper=" << fmt(row.report->upper)
                      << " lower=" << fmt(row.report->lower) << " gap=" << fmt(row.report->gap);
            if (row.report->oracle) std::cout << " oracle=" << fmt(*row.report->oracle);
            std::cout << "\n";
        } else {
            std::cout << "eps=" << fmt(row.epsilon) << " FAILED: " << row.error << "\n";
        }
    }
    std::cout << "slope = " << fmt(res.slope) << " (stderr " << fmt(res.slope_stderr)
              << ", fit range [" << fmt(res.eps_min) << ", " << fmt(res.eps_max) << "])\n";
    const fs::path out = fs::path(fl.out_dir) / (stem_of(fl.file) + ".sweep.csv");
    write_file(out, res.to_csv());
    std::cout << "sweep written: " << out.string() << "\n";
    for (const auto& row : res.rows) {
        if (!row.report) return kExitNumeric;
    }
    return kExitOk;
}

int cmd_example(const std::string& name, const std::string& out_dir) {
    const ProblemConfig c = fixture_config(name);
    const fs::path out = fs::path(out_dir) / (name + ".json");
    write_file(out, config_to_json(c));
    std::cout << "wrote " << out.string() << "\n";
    return kExitOk;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"Bounds on singularly perturbed linear-quadratic optimal control problems"};
    app.require_subcommand(1);

    CommonFlags fl;
    std::string example_name;

    auto add_common = [&](CLI::App* sub, bool with_eps) {
        sub->add_option("file", fl.file, "problem file (JSON)")->required();
        sub->add_option("--tol", fl.tol, "integrator tolerance")->capture_default_str();
        sub->add_option("--grid-min", fl.grid_min, "minimum steps per boundary layer")
            ->capture_default_str();
        sub->add_option("--order", fl.order, "expansion order (0 only in v1)")
            ->capture_default_str();
        sub->add_flag("--no-oracle", fl.no_oracle, "skip the full-dimension reference solve");
        sub->add_option("--out", fl.out_dir, "output directory")->capture_default_str();
        if (with_eps) {
            sub->add_option("--eps", fl.eps, "epsilon override (one value) or sweep list")
                ->delimiter(',');
        }
    };

    CLI::App* validate = app.add_subcommand("validate", "check the standing assumptions");
    add_common(validate, true);
    CLI::App* solve = app.add_subcommand("solve", "full-dimension Riccati reference solve");
    add_common(solve, true);
    CLI::App* bounds = app.add_subcommand("bounds", "upper/lower bounds at one epsilon");
    add_common(bounds, true);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "bounds across an epsilon list");
    add_common(sweep_cmd, true);
    CLI::App* example = app.add_subcommand("example", "materialize a built-in fixture");
    example->add_option("name", example_name, "one of: f8-aircraft, scalar-toy, "
                                              "network20-reduced, clustered-surrogate")
        ->required();
    example->add_option("--out", fl.out_dir, "output directory")->capture_default_str();

    std::vector<std::string> argv_copy(args);
    try {
        std::vector<const char*> argv;
        argv.push_back("spocb");
        for (const auto& a : argv_copy) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (validate->parsed()) return cmd_validate(fl);
        if (solve->parsed()) return cmd_solve(fl);
        if (bounds->parsed()) return cmd_bounds(fl);
        if (sweep_cmd->parsed()) return cmd_sweep(fl);
        if (example->parsed()) return cmd_example(example_name, fl.out_dir);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NonFiniteEntry& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const AsymmetryTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NotPositiveDefinite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const AssumptionViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitValidation;
}

} // namespace spocb::cli
