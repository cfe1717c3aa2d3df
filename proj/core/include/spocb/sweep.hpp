#pragma once

#include "spocb/bounds.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spocb {

struct SweepRow {
    double epsilon = 0.0;
    std::optional<BoundsReport> report;
    std::string error;   // non-empty when the pipeline failed at this epsilon
};

struct SweepResult {
    std::vector<SweepRow> rows;          // epsilon strictly decreasing
    double slope = 0.0;                  // log(gap) vs log(eps) least squares
    double slope_stderr = 0.0;
    double eps_max = 0.0, eps_min = 0.0; // fit range

    std::string to_csv() const;          // fixed columns + slope, slope_stderr
};

// One bounds report per epsilon, fanned out over a bounded worker pool
// (SPOCB_THREADS caps it; max_threads = 0 defers to that / the hardware).
// Requires at least three distinct positive epsilon values; rows are ordered
// by decreasing epsilon regardless of input order.
SweepResult sweep(const SpLqProblem& problem_template, std::vector<double> eps_list,
                  const BoundsOptions& opts = {}, int max_threads = 0);

} // namespace spocb
