#include "spocb/layers.hpp"

#include "spocb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace spocb {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kCondLimit = 1e12;

struct EigPair {
    std::complex<double> lambda;
    Eigen::VectorXcd v;
};

// Rotates a complex eigenvector so its real and imaginary parts have equal
// Euclidean norm, then scales both to unit norm. A common rotation/scaling
// keeps the 2x2 rotation block of the pair intact.
void normalize_pair(Eigen::VectorXcd& v) {
    const std::complex<double> vtv = (v.transpose() * v)(0);  // unconjugated
    double theta = 0.0;
    if (std::abs(vtv) > 1e-300) {
        theta = 0.5 * (M_PI / 2.0 - std::arg(vtv));
    }
    v *= std::exp(std::complex<double>(0.0, theta));
    const double nr = v.real().norm();
    if (nr > 0.0) v /= nr;
}

void apply_sign_convention(Matrix& T, Index col, Index span) {
    // Flip the whole 1- or 2-column group so the largest-magnitude entry of
    // its first column is positive.
    Index imax = 0;
    T.col(col).cwiseAbs().maxCoeff(&imax);
    if (T(imax, col) < 0.0) {
        T.middleCols(col, span) *= -1.0;
    }
}

} // namespace

Matrix hamiltonian_fast_matrix(const SpLqProblem& p) {
    const Index n = p.n;
    Matrix G(2 * n, 2 * n);
    if (n == 0) return G;
    G.topLeftCorner(n, n) = p.A22;
    G.topRightCorner(n, n) = -p.S22();
    G.bottomLeftCorner(n, n) = -p.Q22();
    G.bottomRightCorner(n, n) = -p.A22.transpose();
    return G;
}

LayerDecomposition block_diagonalize(const Matrix& G, const Matrix& pi22_0) {
    if (G.rows() != G.cols() || G.rows() % 2 != 0) {
        throw DimensionMismatch("block_diagonalize: G must be square of even size");
    }
    const Index n = G.rows() / 2;
    LayerDecomposition ld;
    ld.G = G;
    if (n == 0) {
        ld.T = ld.Lambda = ld.stable_block = Matrix(0, 0);
        ld.T11 = ld.T12 = ld.T21 = ld.T22 = Matrix(0, 0);
        ld.cond_T11 = ld.cond_terminal = 1.0;
        ld.lambda_min_re = std::numeric_limits<double>::infinity();
        return ld;
    }

    const double gscale = std::max(1.0, G.cwiseAbs().maxCoeff());
    Eigen::EigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success) {
        throw EigSplitError("block_diagonalize: eigendecomposition failed");
    }

    std::vector<EigPair> stable, unstable;
    for (Index i = 0; i < 2 * n; ++i) {
        const std::complex<double> lam = es.eigenvalues()[i];
        if (std::abs(lam.real()) <= 1e-9 * gscale) {
            throw EigSplitError("block_diagonalize: eigenvalue on the imaginary axis "
                                "(assumption (g) fails)");
        }
        EigPair ep{lam, es.eigenvectors().col(i)};
        (lam.real() < 0.0 ? stable : unstable).push_back(std::move(ep));
    }

    // Keep one representative per conjugate pair: positive imaginary part for
    // the unstable half, negative for the stable half. The stable block built
    // from that choice equals -Lambda entrywise.
    auto keep = [](std::vector<EigPair>& v, bool want_nonneg) {
        std::vector<EigPair> out;
        for (auto& e : v) {
            if (std::abs(e.lambda.imag()) < 1e-12 * (1.0 + std::abs(e.lambda.real()))) {
                e.lambda.imag(0.0);
                out.push_back(std::move(e));
            } else if ((e.lambda.imag() > 0.0) == want_nonneg) {
                out.push_back(std::move(e));
            }
        }
        return out;
    };
    std::vector<EigPair> ur = keep(unstable, true);
    std::vector<EigPair> sr = keep(stable, false);

    auto weight = [](const EigPair& e) { return std::abs(e.lambda.imag()) > 0.0 ? 2 : 1; };
    auto count = [&](const std::vector<EigPair>& v) {
        int c = 0;
        for (const auto& e : v) c += weight(e);
        return c;
    };
    if (count(ur) != n || count(sr) != n) {
        throw EigSplitError("block_diagonalize: spectrum does not split n/n across "
                            "the imaginary axis (assumption (g) fails)");
    }

    // Order by descending real part. When the spectrum is symmetric about the
    // imaginary axis (G Hamiltonian, the generic case here), pair each
    // unstable representative with the stable eigenvalue nearest its negation
    // so the stable block comes out as exactly -Lambda; otherwise fall back to
    // independent ordering of the stable half.
    auto desc = [](const EigPair& a, const EigPair& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
        return a.lambda.imag() > b.lambda.imag();
    };
    std::sort(ur.begin(), ur.end(), desc);
    std::vector<EigPair> sp;
    std::vector<bool> used(sr.size(), false);
    bool paired = true;
    for (const auto& e : ur) {
        const std::complex<double> target = -e.lambda;   // negative imag when e has positive
        size_t best = sr.size();
        double bestd = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < sr.size(); ++j) {
            if (used[j] || weight(sr[j]) != weight(e)) continue;
            const double d = std::abs(sr[j].lambda - target);
            if (d < bestd) { bestd = d; best = j; }
        }
        if (best == sr.size() || bestd > 1e-6 * gscale) {
            paired = false;
            break;
        }
        used[best] = true;
        sp.push_back(sr[best]);
    }
    if (!paired) {
        sp = sr;
        std::sort(sp.begin(), sp.end(), desc);
    }

    Matrix T(2 * n, 2 * n);
    Matrix Lam = Matrix::Zero(n, n);
    Matrix Bs = Matrix::Zero(n, n);
    auto emit = [&](const std::vector<EigPair>& reps, Index col0, Matrix& block) {
        Index col = col0;
        for (const auto& e : reps) {
            Eigen::VectorXcd v = e.v;
            if (weight(e) == 1) {
                Eigen::VectorXd vr = v.real();
                const double ni = v.imag().norm();
                if (ni > 1e-8 * v.real().norm()) {
                    // Real eigenvalue with drifted complex phase: re-align.
                    normalize_pair(v);
                    vr = v.real();
                }
                vr.normalize();
                T.col(col) = vr;
                apply_sign_convention(T, col, 1);
                block(col - col0, col - col0) = e.lambda.real();
                col += 1;
            } else {
                normalize_pair(v);
                T.col(col) = v.real();
                T.col(col + 1) = v.imag();
                apply_sign_convention(T, col, 2);
                const Index j = col - col0;
                block(j, j) = e.lambda.real();
                block(j, j + 1) = e.lambda.imag();
                block(j + 1, j) = -e.lambda.imag();
                block(j + 1, j + 1) = e.lambda.real();
                col += 2;
            }
        }
    };
    emit(sp, 0, Bs);
    emit(ur, n, Lam);

    ld.T = T;
    ld.Lambda = Lam;
    ld.stable_block = Bs;
    ld.T11 = T.topLeftCorner(n, n);
    ld.T12 = T.topRightCorner(n, n);
    ld.T21 = T.bottomLeftCorner(n, n);
    ld.T22 = T.bottomRightCorner(n, n);

    Matrix block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = Bs;
    block.bottomRightCorner(n, n) = Lam;
    Eigen::FullPivLU<Matrix> tlu(T);
    if (!tlu.isInvertible()) {
        throw EigSplitError("block_diagonalize: T is numerically singular");
    }
    const double resid = (tlu.solve(G * T) - block).norm();
    if (resid > kResidualTol * G.norm()) {
        throw EigSplitError("block_diagonalize: similarity residual " + std::to_string(resid) +
                            " exceeds tolerance");
    }

    ld.cond_T11 = condition_number(ld.T11);
    ld.cond_terminal = condition_number(ld.T22 - pi22_0 * ld.T12);
    if (!(ld.cond_T11 < kCondLimit) || !(ld.cond_terminal < kCondLimit)) {
        throw NonsingularityError("block_diagonalize: assumption (h) matrices are "
                                  "numerically singular");
    }

    Eigen::EigenSolver<Matrix> esl(Lam), esb(Bs);
    ld.lambda_min_re = std::min(esl.eigenvalues().real().minCoeff(),
                                -esb.eigenvalues().real().maxCoeff());
    return ld;
}

Vector LayerFunction::z(double s) const {
    if (coeff.size() == 0) return Vector::Zero(coef_z.rows());
    if (s >= cutoff) return Vector::Zero(coef_z.rows());
    return coef_z * (expm(-Lambda * s) * coeff);
}

Vector LayerFunction::chi(double s) const {
    if (coeff.size() == 0) return Vector::Zero(coef_chi.rows());
    if (s >= cutoff) return Vector::Zero(coef_chi.rows());
    return coef_chi * (expm(-Lambda * s) * coeff);
}

Vector LayerFunction::z_deriv(double s) const {
    if (coeff.size() == 0 || s >= cutoff) return Vector::Zero(coef_z.rows());
    return -coef_z * (Lambda * (expm(-Lambda * s) * coeff));
}

Vector LayerFunction::chi_deriv(double s) const {
    if (coeff.size() == 0 || s >= cutoff) return Vector::Zero(coef_chi.rows());
    return -coef_chi * (Lambda * (expm(-Lambda * s) * coeff));
}

namespace {

double underflow_cutoff(const LayerDecomposition& ld) {
    return (ld.lambda_min_re > 0.0) ? 500.0 / ld.lambda_min_re
                                    : std::numeric_limits<double>::infinity();
}

} // namespace

LayerFunction initial_layer(LayerDecomposition& ld, const Vector& z2_init_gap) {
    const Index n = ld.Lambda.rows();
    if (z2_init_gap.size() != n) {
        throw DimensionMismatch("initial_layer: gap vector has wrong length");
    }
    LayerFunction lf;
    lf.coef_z = ld.T11;
    lf.coef_chi = ld.T21;
    lf.Lambda = -ld.stable_block;   // equals Lambda for Hamiltonian G
    lf.cutoff = underflow_cutoff(ld);
    if (n == 0) {
        lf.coeff = Vector(0);
        ld.c = lf.coeff;
        return lf;
    }
    Eigen::FullPivLU<Matrix> lu(ld.T11);
    if (!lu.isInvertible()) {
        throw NonsingularityError("initial_layer: T11 is singular (assumption (h))");
    }
    lf.coeff = lu.solve(z2_init_gap);
    ld.c = lf.coeff;
    return lf;
}

LayerFunction final_layer(LayerDecomposition& ld, const Matrix& pi12, const Matrix& pi22,
                          const Vector& z1o_Tf, const Vector& z2o_Tf, const Vector& chi2o_Tf) {
    const Index n = ld.Lambda.rows();
    LayerFunction lf;
    lf.coef_z = ld.T12;
    lf.coef_chi = ld.T22;
    lf.Lambda = ld.Lambda;
    lf.cutoff = underflow_cutoff(ld);
    if (n == 0) {
        lf.coeff = Vector(0);
        ld.c1 = lf.coeff;
        return lf;
    }
    const Matrix M = ld.T22 - pi22 * ld.T12;
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible()) {
        throw NonsingularityError("final_layer: T22 - pi22 T12 is singular (assumption (h))");
    }
    const Vector rhs = pi12.transpose() * z1o_Tf + pi22 * z2o_Tf - chi2o_Tf;
    lf.coeff = lu.solve(rhs);
    ld.c1 = lf.coeff;
    return lf;
}

SlowLayerCorrections slow_layer_corrections(const SpLqProblem& p, const LayerDecomposition& ld,
                                            const Vector& c, const Vector& c1) {
    SlowLayerCorrections sc;
    const Index n = p.n;
    const double cutoff = underflow_cutoff(ld);
    if (n == 0) {
        for (auto* lf : {&sc.initial, &sc.final_}) {
            lf->coef_z = lf->coef_chi = Matrix(p.m, 0);
            lf->Lambda = Matrix(0, 0);
            lf->coeff = Vector(0);
            lf->cutoff = cutoff;
        }
        return sc;
    }
    const Matrix Lam_init = -ld.stable_block;
    const Matrix Lam_init_inv = Lam_init.partialPivLu().solve(Matrix::Identity(n, n));
    const Matrix Lam_inv = ld.Lambda.partialPivLu().solve(Matrix::Identity(n, n));
    const Matrix S12 = p.S12();
    const Matrix Q12 = p.Q12();

    // Inner rows: dz1i/dtau = A12 z2i - S12 chi2i, dchi1i/dtau = -A21' chi2i - Q12 z2i.
    // Decaying antiderivative of M e^{-Lambda tau} c is -M Lambda^-1 e^{-Lambda tau} c.
    sc.initial.coef_z = -(p.A12 * ld.T11 - S12 * ld.T21) * Lam_init_inv;
    sc.initial.coef_chi = (p.A21.transpose() * ld.T21 + Q12 * ld.T11) * Lam_init_inv;
    sc.initial.Lambda = Lam_init;
    sc.initial.coeff = c;
    sc.initial.cutoff = cutoff;

    // Final rows: dz1f/dsigma = -A12 z2f + S12 chi2f, dchi1f/dsigma = A21' chi2f + Q12 z2f.
    sc.final_.coef_z = (p.A12 * ld.T12 - S12 * ld.T22) * Lam_inv;
    sc.final_.coef_chi = -(p.A21.transpose() * ld.T22 + Q12 * ld.T12) * Lam_inv;
    sc.final_.Lambda = ld.Lambda;
    sc.final_.coeff = c1;
    sc.final_.cutoff = cutoff;
    return sc;
}

CompositeApproximation::CompositeApproximation(const SpLqProblem& p,
                                               std::shared_ptr<const OuterSolution> outer,
                                               const LayerDecomposition& ld, LayerFunction init,
                                               LayerFunction fin, SlowLayerCorrections slow)
    : epsilon_(p.epsilon), horizon_(p.horizon), m_(p.m), n_(p.n), outer_(std::move(outer)),
      ld_(ld), init_(std::move(init)), fin_(std::move(fin)), slow_(std::move(slow)) {
    rinv_b1t_ = p.R.llt().solve(p.b1.transpose());
    rinv_b2t_ = (p.n == 0) ? Matrix(p.k, 0) : Matrix(p.R.llt().solve(p.b2.transpose()));
}

Vector CompositeApproximation::u0(double t) const {
    const double tau = t / epsilon_;
    const double sigma = (horizon_ - t) / epsilon_;
    Vector chi2 = outer_->chi2_at(t);
    if (n_ > 0) {
        chi2 += init_.chi(tau) + fin_.chi(sigma);
    }
    return -(rinv_b1t_ * outer_->chi1_at(t)) - (rinv_b2t_ * chi2);
}

Vector CompositeApproximation::zhat0(double t) const {
    const double tau = t / epsilon_;
    const double sigma = (horizon_ - t) / epsilon_;
    Vector z(m_ + n_);
    z.head(m_) = outer_->x_at(t);
    if (n_ > 0) {
        z.tail(n_) = outer_->z2_at(t) + init_.z(tau) + fin_.z(sigma);
    }
    return z;
}

Vector CompositeApproximation::zhat0_deriv(double t) const {
    const double tau = t / epsilon_;
    const double sigma = (horizon_ - t) / epsilon_;
    Vector zd(m_ + n_);
    zd.head(m_) = hermite_eval_deriv(outer_->slow.t, outer_->slow.x, outer_->slow.xdot, t);
    if (n_ > 0) {
        zd.tail(n_) = hermite_eval_deriv(outer_->slow.t, outer_->z2, outer_->z2dot, t) +
                      init_.z_deriv(tau) / epsilon_ - fin_.z_deriv(sigma) / epsilon_;
    }
    return zd;
}

Vector CompositeApproximation::chi_composite(double t) const {
    const double tau = t / epsilon_;
    const double sigma = (horizon_ - t) / epsilon_;
    Vector chi(m_ + n_);
    chi.head(m_) = outer_->chi1_at(t);
    if (n_ > 0) {
        chi.tail(n_) = outer_->chi2_at(t) + init_.chi(tau) + fin_.chi(sigma);
    }
    return chi;
}

Vector CompositeApproximation::slow_layer_state(double t) const {
    const double tau = t / epsilon_;
    const double sigma = (horizon_ - t) / epsilon_;
    if (n_ == 0) return Vector::Zero(m_);
    return epsilon_ * (slow_.initial.z(tau) + slow_.final_.z(sigma));
}

CompositeApproximation composite_control(const SpLqProblem& p,
                                         std::shared_ptr<const OuterSolution> outer,
                                         const LayerDecomposition& ld,
                                         const LayerFunction& init, const LayerFunction& fin,
                                         const SlowLayerCorrections& slow) {
    return CompositeApproximation(p, std::move(outer), ld, init, fin, slow);
}

CompositeApproximation build_composite(const SpLqProblem& p, double tol) {
    auto outer = std::make_shared<OuterSolution>(make_outer_solution(p, tol));
    LayerDecomposition ld = block_diagonalize(hamiltonian_fast_matrix(p), p.pi22);
    const double Tf = p.horizon;
    const Vector gap = p.z20() - ((p.n > 0) ? outer->z2_at(0.0) : Vector(0));
    const LayerFunction init = initial_layer(ld, gap);
    const LayerFunction fin = final_layer(ld, p.pi12, p.pi22, outer->x_at(Tf),
                                          (p.n > 0) ? outer->z2_at(Tf) : Vector(0),
                                          (p.n > 0) ? outer->chi2_at(Tf) : Vector(0));
    const SlowLayerCorrections slow = slow_layer_corrections(p, ld, ld.c, ld.c1);
    return composite_control(p, std::move(outer), ld, init, fin, slow);
}

} // namespace spocb
