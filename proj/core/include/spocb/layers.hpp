#pragma once

#include "spocb/problem.hpp"
#include "spocb/reduced.hpp"

#include <memory>

namespace spocb {

// Fast Hamiltonian matrix G = [[A22, -b2 R^-1 b2'], [-Q22, -A22']].
Matrix hamiltonian_fast_matrix(const SpLqProblem& p);

// Real block diagonalization T^-1 G T = blkdiag(-Lambda, Lambda) with all
// eigenvalues of Lambda in the open right half-plane. Columns hold unit
// Euclidean norm; real columns carry the sign convention "largest-magnitude
// entry positive", complex pairs are rotated so both columns have equal norm
// and negated jointly under the same convention. Columns are ordered by
// descending real part within each half, stable half first, paired so the
// stable block equals -Lambda entrywise.
struct LayerDecomposition {
    Matrix G;
    Matrix T;
    Matrix Lambda;           // n x n, real quasi-diagonal, unstable block
    Matrix stable_block;     // n x n; equals -Lambda whenever G is Hamiltonian
    Matrix T11, T12, T21, T22;
    Vector c;                // initial-layer constant; empty until computed
    Vector c1;               // final-layer constant; empty until computed
    double cond_T11 = 0.0;
    double cond_terminal = 0.0;  // cond(T22 - pi22^0 T12)
    double lambda_min_re = 0.0;  // slowest layer decay rate over both blocks
};

LayerDecomposition block_diagonalize(const Matrix& G, const Matrix& pi22_0);

// Decaying layer pair value(s) = coef_z * exp(-Lambda s) * coeff (state row)
// and coef_chi * exp(-Lambda s) * coeff (costate row). Evaluations beyond the
// underflow horizon return exact zeros.
struct LayerFunction {
    Matrix coef_z, coef_chi;
    Matrix Lambda;
    Vector coeff;
    double cutoff = 0.0;     // s beyond which exp(-Lambda s) underflows

    Vector z(double s) const;
    Vector chi(double s) const;
    Vector z_deriv(double s) const;    // d/ds
    Vector chi_deriv(double s) const;  // d/ds
};

// Initial layer z2i(tau) = T11 e^{-Lambda tau} c, chi2i = T21 e^{-Lambda tau} c
// with c = T11^-1 (z2(0) - z2_outer(0)). Stores c into ld.
LayerFunction initial_layer(LayerDecomposition& ld, const Vector& z2_init_gap);

// Final layer z2f(sigma) = T12 e^{-Lambda sigma} c1, chi2f = T22 e^{-Lambda sigma} c1
// with c1 = (T22 - pi22 T12)^-1 (pi12' z1o(Tf) + pi22 z2o(Tf) - chi2o(Tf)).
LayerFunction final_layer(LayerDecomposition& ld, const Matrix& pi12, const Matrix& pi22,
                          const Vector& z1o_Tf, const Vector& z2o_Tf, const Vector& chi2o_Tf);

// Order-zero slow-variable layer corrections, closed form through Lambda^-1.
struct SlowLayerCorrections {
    LayerFunction initial;  // z row = z1i, chi row = chi1i, argument tau
    LayerFunction final_;   // z row = z1f, chi row = chi1f, argument sigma
};

SlowLayerCorrections slow_layer_corrections(const SpLqProblem& p, const LayerDecomposition& ld,
                                            const Vector& c, const Vector& c1);

// Zeroth-order composite control and state,
//   u0(t) = -R^-1 ( b1' chi1o(t) + b2' [chi2o(t) + chi2i(t/eps) + chi2f((Tf-t)/eps)] ).
// The slow-layer corrections enter the state at order eps and are kept for
// diagnostics only.
class CompositeApproximation {
public:
    CompositeApproximation(const SpLqProblem& p, std::shared_ptr<const OuterSolution> outer,
                           const LayerDecomposition& ld, LayerFunction init, LayerFunction fin,
                           SlowLayerCorrections slow);

    int order() const { return 0; }
    double epsilon() const { return epsilon_; }
    double horizon() const { return horizon_; }

    Vector u0(double t) const;
    Vector zhat0(double t) const;
    Vector zhat0_deriv(double t) const;  // exact d/dt of zhat0
    Vector chi_composite(double t) const;
    Vector slow_layer_state(double t) const;  // eps * (z1i + z1f), diagnostic

    const LayerDecomposition& decomposition() const { return ld_; }
    const OuterSolution& outer() const { return *outer_; }
    const LayerFunction& initial() const { return init_; }
    const LayerFunction& final_layer_fn() const { return fin_; }

private:
    double epsilon_, horizon_;
    Index m_, n_;
    std::shared_ptr<const OuterSolution> outer_;
    LayerDecomposition ld_;
    LayerFunction init_, fin_;
    SlowLayerCorrections slow_;
    Matrix rinv_b1t_, rinv_b2t_;
};

CompositeApproximation composite_control(const SpLqProblem& p,
                                         std::shared_ptr<const OuterSolution> outer,
                                         const LayerDecomposition& ld,
                                         const LayerFunction& init, const LayerFunction& fin,
                                         const SlowLayerCorrections& slow);

// Convenience pipeline: reduced problem -> outer solution -> layers -> composite.
CompositeApproximation build_composite(const SpLqProblem& p, double tol);

} // namespace spocb
