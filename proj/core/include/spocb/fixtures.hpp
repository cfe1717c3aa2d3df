#pragma once

#include "spocb/problem.hpp"
#include "spocb/reduced.hpp"

#include <string>
#include <vector>

namespace spocb {

// Built-in instances runnable from the CLI via `example <name>`.
//
//   f8-aircraft        F-8 longitudinal model, 2 slow / 2 fast states.
//   scalar-toy         decoupled 1+1 system with uncontrolled fast state.
//   network20-reduced  4-cluster aggregate of a 20-node consensus network,
//                      reduced (slow-only) problem exported with n = 0.
//   clustered-surrogate synthetic 4-cluster network with full slow/fast
//                      structure; stands in for network systems whose full
//                      matrices are not published.
SpLqProblem f8_aircraft(double epsilon = 0.0336);
SpLqProblem scalar_toy(double epsilon = 0.1);
ReducedProblem network20_reduced();
SpLqProblem clustered_surrogate(double epsilon = 0.25);

// Embeds a reduced problem as an n = 0 instance in the SpLqProblem schema.
// The calC coupling is dropped; the embedded problem is the substituted
// (cross-term-free) form, which has the same optimal value.
SpLqProblem reduced_as_problem(const ReducedProblem& rp, double epsilon = 1.0);

std::vector<std::string> fixture_names();
ProblemConfig fixture_config(const std::string& name);

} // namespace spocb
