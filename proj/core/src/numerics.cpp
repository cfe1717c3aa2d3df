#include "spocb/numerics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spocb {

Matrix expm(const Matrix& a) {
    if (a.rows() == 0) {
        return Matrix(0, 0);
    }
    return a.exp();
}

double sym_min_eig(const Matrix& a) {
    if (a.rows() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_positive_definite(const Matrix& a, double tol, double* witness) {
    const double lo = sym_min_eig(a);
    if (witness) *witness = lo;
    return lo > tol;
}

bool is_positive_semidefinite(const Matrix& a, double tol, double* witness) {
    const double lo = sym_min_eig(a);
    if (witness) *witness = lo;
    return lo >= -tol;
}

double condition_number(const Matrix& a) {
    if (a.rows() == 0) {
        return 1.0;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) {
        return std::numeric_limits<double>::infinity();
    }
    const Matrix inv = lu.inverse();
    const double n1 = a.cwiseAbs().colwise().sum().maxCoeff();
    const double n2 = inv.cwiseAbs().colwise().sum().maxCoeff();
    return n1 * n2;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order) {
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int n = static_cast<int>(nodes.size()) - 1;
    const int m = order;
    std::vector<std::vector<double>> c(static_cast<size_t>(n + 1),
                                       std::vector<double>(static_cast<size_t>(m + 1), 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<size_t>(i)] - x0;
        for (int j = 0; j <= i - 1; ++j) {
            const double c3 = nodes[static_cast<size_t>(i)] - nodes[static_cast<size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int kk = mn; kk >= 1; --kk) {
                    c[static_cast<size_t>(i)][static_cast<size_t>(kk)] =
                        c1 * (kk * c[static_cast<size_t>(i - 1)][static_cast<size_t>(kk - 1)] -
                              c5 * c[static_cast<size_t>(i - 1)][static_cast<size_t>(kk)]) / c2;
                }
                c[static_cast<size_t>(i)][0] = -c1 * c5 * c[static_cast<size_t>(i - 1)][0] / c2;
            }
            for (int kk = mn; kk >= 1; --kk) {
                c[static_cast<size_t>(j)][static_cast<size_t>(kk)] =
                    (c4 * c[static_cast<size_t>(j)][static_cast<size_t>(kk)] -
                     kk * c[static_cast<size_t>(j)][static_cast<size_t>(kk - 1)]) / c3;
            }
            c[static_cast<size_t>(j)][0] = c4 * c[static_cast<size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        w[i] = c[i][static_cast<size_t>(m)];
    }
    return w;
}

std::vector<Vector> fd_first_derivative(const std::vector<double>& t,
                                        const std::vector<Vector>& y) {
    const size_t np = t.size();
    if (np < 5) {
        throw GridTooCoarse("fd_first_derivative: need at least 5 grid points");
    }
    std::vector<Vector> d(np);
    const size_t stencil = 5;
    for (size_t i = 0; i < np; ++i) {
        size_t lo = (i >= stencil / 2) ? i - stencil / 2 : 0;
        if (lo + stencil > np) lo = np - stencil;
        std::vector<double> nodes(t.begin() + static_cast<long>(lo),
                                  t.begin() + static_cast<long>(lo + stencil));
        const std::vector<double> w = fd_weights(t[i], nodes, 1);
        Vector acc = Vector::Zero(y[i].size());
        for (size_t j = 0; j < stencil; ++j) {
            acc += w[j] * y[lo + j];
        }
        d[i] = acc;
    }
    return d;
}

double lobatto_quadrature(const std::vector<double>& t, const std::vector<double>& f) {
    const size_t np = t.size();
    if (np < 3 || np % 2 == 0 || f.size() != np) {
        throw GridTooCoarse("lobatto_quadrature: grid lacks step-triple structure");
    }
    const double span = t.back() - t.front();
    double sum = 0.0;
    for (size_t i = 0; i + 2 < np; i += 2) {
        const double h = t[i + 2] - t[i];
        const double mid = 0.5 * (t[i] + t[i + 2]);
        if (std::abs(t[i + 1] - mid) > 1e-9 * std::max(1.0, std::abs(span))) {
            throw GridTooCoarse("lobatto_quadrature: sample is not an interval midpoint");
        }
        sum += h / 6.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    return sum;
}

namespace {

size_t hermite_interval(const std::vector<double>& t, double& tq) {
    tq = std::clamp(tq, t.front(), t.back());
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    size_t i = static_cast<size_t>(std::distance(t.begin(), it));
    if (i > 0) --i;
    if (i >= t.size() - 1) i = t.size() - 2;
    return i;
}

template <typename T>
T hermite_eval_impl(const std::vector<double>& t, const std::vector<T>& y,
                    const std::vector<T>& ydot, double tq) {
    if (t.size() == 1) {
        return y.front();
    }
    const size_t i = hermite_interval(t, tq);
    const double h = t[i + 1] - t[i];
    const double s = (tq - t[i]) / h;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * y[i] + (h10 * h) * ydot[i] + h01 * y[i + 1] + (h11 * h) * ydot[i + 1];
}

} // namespace

Vector hermite_eval(const std::vector<double>& t, const std::vector<Vector>& y,
                    const std::vector<Vector>& ydot, double tq) {
    return hermite_eval_impl(t, y, ydot, tq);
}

Matrix hermite_eval(const std::vector<double>& t, const std::vector<Matrix>& y,
                    const std::vector<Matrix>& ydot, double tq) {
    return hermite_eval_impl(t, y, ydot, tq);
}

Vector hermite_eval_deriv(const std::vector<double>& t, const std::vector<Vector>& y,
                          const std::vector<Vector>& ydot, double tq) {
    if (t.size() == 1) {
        return ydot.front();
    }
    const size_t i = hermite_interval(t, tq);
    const double h = t[i + 1] - t[i];
    const double s = (tq - t[i]) / h;
    const double d00 = (6.0 * s * s - 6.0 * s) / h;
    const double d10 = 3.0 * s * s - 4.0 * s + 1.0;
    const double d01 = (6.0 * s - 6.0 * s * s) / h;
    const double d11 = 3.0 * s * s - 2.0 * s;
    return d00 * y[i] + d10 * ydot[i] + d01 * y[i + 1] + d11 * ydot[i + 1];
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double* se) {
    if (x.size() != y.size() || x.size() < 3) {
        throw TooFewPoints("loglog_slope: need at least 3 points");
    }
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) {
            throw Error("loglog_slope: data must be positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i]; sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double dn = static_cast<double>(n);
    const double sxx_c = sxx - sx * sx / dn;
    const double sxy_c = sxy - sx * sy / dn;
    const double slope = sxy_c / sxx_c;
    if (se) {
        const double intercept = (sy - slope * sx) / dn;
        double ssr = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double r = ly[i] - intercept - slope * lx[i];
            ssr += r * r;
        }
        *se = (n > 2) ? std::sqrt(ssr / (dn - 2.0) / sxx_c) : 0.0;
    }
    return slope;
}

} // namespace spocb
