#include "spocb/sweep.hpp"

#include "spocb/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace spocb {

namespace {

int worker_count(int max_threads, size_t jobs) {
    int cap = max_threads;
    if (cap <= 0) {
        if (const char* env = std::getenv("SPOCB_THREADS")) {
            cap = std::atoi(env);
        }
    }
    if (cap <= 0) {
        cap = static_cast<int>(std::thread::hardware_concurrency());
    }
    cap = std::max(1, cap);
    return static_cast<int>(std::min<size_t>(static_cast<size_t>(cap), jobs));
}

} // namespace

std::string SweepResult::to_csv() const {
    std::ostringstream os;
    os << BoundsReport::csv_header() << ",slope,slope_stderr\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.15g", v);
        return std::string(buf);
    };
    for (const auto& row : rows) {
        if (row.report) {
            os << row.report->csv_row();
        } else {
            os << fmt(row.epsilon) << ",,,,,,,";
        }
        os << "," << fmt(slope) << "," << fmt(slope_stderr) << "\n";
    }
    return os.str();
}

SweepResult sweep(const SpLqProblem& problem_template, std::vector<double> eps_list,
                  const BoundsOptions& opts, int max_threads) {
    if (eps_list.size() < 3) {
        throw TooFewPoints("sweep: need at least 3 epsilon values");
    }
    std::sort(eps_list.begin(), eps_list.end(), std::greater<double>());
    for (size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) {
            throw SchemaError("sweep: epsilon values must be positive");
        }
        if (i > 0 && eps_list[i] == eps_list[i - 1]) {
            throw SchemaError("sweep: epsilon values must be distinct");
        }
    }

    SweepResult out;
    out.rows.resize(eps_list.size());
    for (size_t i = 0; i < eps_list.size(); ++i) {
        out.rows[i].epsilon = eps_list[i];
    }

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= eps_list.size()) return;
            try {
                const SpLqProblem p = problem_template.with_epsilon(eps_list[i]);
                out.rows[i].report = bounds_report(p, opts);
            } catch (const std::exception& e) {
                out.rows[i].error = e.what();
            }
        }
    };
    const int nw = worker_count(max_threads, eps_list.size());
    if (nw <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nw));
        for (int i = 0; i < nw; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::vector<double> xs, ys;
    for (const auto& row : out.rows) {
        if (row.report && row.report->gap > 0.0) {
            xs.push_back(row.epsilon);
            ys.push_back(row.report->gap);
        }
    }
    out.eps_max = eps_list.front();
    out.eps_min = eps_list.back();
    if (xs.size() >= 3) {
        out.slope = loglog_slope(xs, ys, &out.slope_stderr);
    }
    return out;
}

} // namespace spocb
