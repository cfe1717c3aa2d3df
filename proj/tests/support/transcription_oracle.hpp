#pragma once

#include "spocb/problem.hpp"
#include "spocb/reduced.hpp"

namespace spocb::testing {

// Direct-transcription reference: piecewise-constant control on a uniform
// grid, exact discrete dynamics and exact per-step cost integrals via the
// matrix exponential, then the discrete quadratic program solved by dynamic
// programming. Shares nothing with the continuous Riccati sweep beyond the
// matrix exponential itself.
double transcription_value(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                           const Matrix& piT, const Vector& x0, double horizon, int steps);

// Same oracle on the eps-scaled form of a full instance.
double transcription_value(const SpLqProblem& p, int steps);

// Same oracle on a reduced problem (substituted control form).
double transcription_value(const ReducedProblem& rp, int steps);

} // namespace spocb::testing
