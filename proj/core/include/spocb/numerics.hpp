#pragma once

#include "spocb/types.hpp"

#include <vector>

namespace spocb {

// Matrix exponential (scaling and squaring). Safe for 0x0 inputs.
Matrix expm(const Matrix& a);

// Smallest eigenvalue of a symmetric matrix (input is symmetrized first).
double sym_min_eig(const Matrix& a);

// Positive (semi)definiteness with an eigenvalue witness.
bool is_positive_definite(const Matrix& a, double tol, double* witness = nullptr);
bool is_positive_semidefinite(const Matrix& a, double tol, double* witness = nullptr);

// 1-norm condition number via explicit inverse; +inf when singular.
double condition_number(const Matrix& a);

// Finite-difference weights on arbitrary nodes (Fornberg recursion).
// Returns w such that f^(order)(x0) ~= sum_i w[i] * f(nodes[i]).
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order);

// First derivative of sampled data on a non-uniform grid, fourth-order
// stencils (5 nearest nodes per point). Throws GridTooCoarse below 5 points.
std::vector<Vector> fd_first_derivative(const std::vector<double>& t,
                                        const std::vector<Vector>& y);

// Composite 3-point Gauss-Lobatto (Simpson) quadrature over a grid with
// step-triple structure: odd point count, t[2i+1] the midpoint of
// [t[2i], t[2i+2]]. This is the rule every integrator grid in this library
// carries. Throws GridTooCoarse when the structure is missing.
double lobatto_quadrature(const std::vector<double>& t, const std::vector<double>& f);

// Piecewise cubic Hermite evaluation of sampled data with stored derivatives.
// Queries are clamped to [t.front(), t.back()].
Vector hermite_eval(const std::vector<double>& t, const std::vector<Vector>& y,
                    const std::vector<Vector>& ydot, double tq);
Matrix hermite_eval(const std::vector<double>& t, const std::vector<Matrix>& y,
                    const std::vector<Matrix>& ydot, double tq);

// Exact derivative of the piecewise cubic Hermite interpolant above.
Vector hermite_eval_deriv(const std::vector<double>& t, const std::vector<Vector>& y,
                          const std::vector<Vector>& ydot, double tq);

// Least-squares slope of log(y) vs log(x); se receives the slope standard
// error when non-null. Requires >= 3 points and positive data.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                    double* se = nullptr);

} // namespace spocb
