#pragma once

#include "spocb/problem.hpp"

#include <string>

namespace spocb {

// Problem files are JSON objects with keys
//   dims {m, n, k}, epsilon, horizon,
//   A11 A12 A21 A22 b1 b2 Q R pi11 pi12 pi22 (row-major nested arrays),
//   z0 (array), options (optional: tol, grid_min, eps_sweep, out, eps).
// n = 0 encodes a reduced (slow-only) problem in the same schema.
ProblemConfig parse_problem_json(const std::string& text);
ProblemConfig load_problem_config(const std::string& path);
SpLqProblem load_problem_file(const std::string& path);

// Serialization round-trips bit-for-bit at double precision.
std::string config_to_json(const ProblemConfig& c);
std::string problem_to_json(const SpLqProblem& p);

} // namespace spocb
