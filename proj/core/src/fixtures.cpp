#include "spocb/fixtures.hpp"

#include <random>

namespace spocb {

namespace {

ProblemConfig f8_config(double epsilon) {
    ProblemConfig c;
    c.m = 2; c.n = 2; c.k = 1;
    c.epsilon = epsilon;
    c.horizon = 1.0;
    c.A11 = Matrix{{-0.195378, -0.676469}, {1.478265, 0.0}};
    c.A12 = Matrix{{-0.917160, 0.109033}, {0.0, 0.0}};
    c.A21 = Matrix{{-0.051601, 0.0}, {0.013579, 0.0}};
    c.A22 = Matrix{{-0.367954, 0.43804}, {-2.102596, -0.21464}};
    c.b1 = Matrix{{-0.023109}, {-16.945030}};
    c.b2 = Matrix{{-0.048184}, {-3.810954}};
    c.Q = Matrix::Identity(4, 4);
    c.R = Matrix::Identity(1, 1);
    c.pi11 = Matrix::Identity(2, 2);
    c.pi12 = Matrix::Zero(2, 2);
    c.pi22 = Matrix::Identity(2, 2);
    c.z0 = Vector{{-2.0, 3.0, -4.0, 1.0}};
    return c;
}

ProblemConfig scalar_toy_config(double epsilon) {
    ProblemConfig c;
    c.m = 1; c.n = 1; c.k = 1;
    c.epsilon = epsilon;
    c.horizon = 1.0;
    c.A11 = Matrix{{-1.0}};
    c.A12 = Matrix{{0.0}};
    c.A21 = Matrix{{0.0}};
    c.A22 = Matrix{{-2.0}};
    c.b1 = Matrix{{1.0}};
    c.b2 = Matrix{{0.0}};
    c.Q = Matrix::Identity(2, 2);
    c.R = Matrix::Identity(1, 1);
    c.pi11 = Matrix{{1.0}};
    c.pi12 = Matrix{{0.0}};
    c.pi22 = Matrix{{1.0}};
    c.z0 = Vector{{1.0, 1.0}};
    return c;
}

// Synthetic clustered network: 4 clusters of sizes {3, 3, 2, 4}; slow states
// are cluster aggregates, fast states the within-cluster deviations. All data
// is generated from a fixed seed, so instances are identical across runs, and
// the construction keeps A22 symmetric negative definite.
ProblemConfig surrogate_config(double epsilon) {
    const std::vector<int> sizes = {3, 3, 2, 4};
    const Index m = 4;
    Index n = 0, k = 0;
    for (int s : sizes) { n += s - 1; k += s; }

    std::mt19937 rng(20240517u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto rand_mat = [&](Index r, Index c, double scale) {
        Matrix M(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) M(i, j) = scale * uni(rng);
        return M;
    };

    ProblemConfig c;
    c.m = m; c.n = n; c.k = k;
    c.epsilon = epsilon;
    c.horizon = 1.0;

    // Slow block: inter-cluster consensus coupling.
    Matrix L = Matrix::Zero(m, m);
    const double wts[4][4] = {{0, 0.8, 0.5, 0.4}, {0.8, 0, 0.6, 0.3},
                              {0.5, 0.6, 0, 0.7}, {0.4, 0.3, 0.7, 0}};
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
            if (i == j) continue;
            L(i, j) = -wts[i][j];
            L(i, i) += wts[i][j];
        }
    }
    c.A11 = -L - 0.05 * Matrix::Identity(m, m);

    // Fast block: intra-cluster mixing, symmetric and negative definite.
    Matrix W = rand_mat(n, n, 0.4);
    c.A22 = -(W * W.transpose() / static_cast<double>(n) + 1.2 * Matrix::Identity(n, n));
    c.A12 = rand_mat(m, n, 0.25);
    c.A21 = rand_mat(n, m, 0.25);

    // One control per node; slow rows aggregate their cluster, fast rows mix
    // the deviations within it.
    c.b1 = Matrix::Zero(m, k);
    c.b2 = rand_mat(n, k, 0.0);
    Index col = 0, frow = 0;
    for (Index cl = 0; cl < m; ++cl) {
        const int sz = sizes[static_cast<size_t>(cl)];
        for (int j = 0; j < sz; ++j) {
            c.b1(cl, col + j) = 1.0 / sz;
        }
        for (int d = 0; d + 1 < sz; ++d) {
            c.b2(frow + d, col + d) = 0.6;
            c.b2(frow + d, col + d + 1) = -0.6;
        }
        col += sz;
        frow += sz - 1;
    }

    c.Q = Matrix::Identity(m + n, m + n);
    c.R = Matrix::Identity(k, k);
    c.pi11 = Matrix::Identity(m, m);
    c.pi12 = Matrix::Zero(m, n);
    c.pi22 = Matrix::Identity(n, n);

    c.z0 = Vector(m + n);
    for (Index i = 0; i < m; ++i) c.z0[i] = 0.3 + 0.15 * static_cast<double>(i);
    for (Index i = 0; i < n; ++i) c.z0[m + i] = 0.4 * uni(rng);
    return c;
}

ProblemConfig network20_reduced_config() {
    const ReducedProblem rp = network20_reduced();
    const SpLqProblem p = reduced_as_problem(rp);
    ProblemConfig c;
    c.m = p.m; c.n = 0; c.k = p.k;
    c.epsilon = p.epsilon;
    c.horizon = p.horizon;
    c.A11 = p.A11; c.A12 = p.A12; c.A21 = p.A21; c.A22 = p.A22;
    c.b1 = p.b1; c.b2 = p.b2;
    c.Q = p.Q; c.R = p.R;
    c.pi11 = p.pi11; c.pi12 = p.pi12; c.pi22 = p.pi22;
    c.z0 = p.z0;
    return c;
}

} // namespace

SpLqProblem f8_aircraft(double epsilon) { return build_problem(f8_config(epsilon)); }

SpLqProblem scalar_toy(double epsilon) { return build_problem(scalar_toy_config(epsilon)); }

ReducedProblem network20_reduced() {
    ReducedProblem rp;
    rp.m = 4;
    rp.k = 20;
    rp.horizon = 10.0;
    rp.calA = Matrix{{-0.8000, 0.2667, 0.2667, 0.2667},
                     {0.2667, -0.5333, 0.2667, 0.0},
                     {0.3333, 0.3333, -1.0, 0.3333},
                     {0.2222, 0.0, 0.2222, -0.4444}};
    // Aggregation pattern: row weights over the four clusters of sizes 5,5,4,6.
    const double w[4] = {0.2667, 0.2667, 0.3333, 0.2222};
    const int sizes[4] = {5, 5, 4, 6};
    rp.calB = Matrix::Zero(4, 20);
    int col = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < sizes[i]; ++j) {
            rp.calB(i, col + j) = w[i];
        }
        col += sizes[i];
    }
    rp.calQ = Matrix::Identity(4, 4);
    rp.calR = Matrix::Identity(20, 20);
    rp.calC = Matrix::Zero(4, 20);
    rp.pi11_0 = Matrix::Identity(4, 4);
    rp.x0 = Vector{{0.316, 0.959, 0.499, 0.739}};
    return rp;
}

SpLqProblem clustered_surrogate(double epsilon) {
    return build_problem(surrogate_config(epsilon));
}

SpLqProblem reduced_as_problem(const ReducedProblem& rp, double epsilon) {
    ProblemConfig c;
    c.m = rp.m; c.n = 0; c.k = rp.k;
    c.epsilon = epsilon;
    c.horizon = rp.horizon;
    c.A11 = rp.calA;
    c.A12 = Matrix(rp.m, 0);
    c.A21 = Matrix(0, rp.m);
    c.A22 = Matrix(0, 0);
    c.b1 = rp.calB;
    c.b2 = Matrix(0, rp.k);
    c.Q = rp.calQ;
    c.R = rp.calR;
    c.pi11 = rp.pi11_0;
    c.pi12 = Matrix(rp.m, 0);
    c.pi22 = Matrix(0, 0);
    c.z0 = rp.x0;
    return build_problem(c);
}

std::vector<std::string> fixture_names() {
    return {"f8-aircraft", "scalar-toy", "network20-reduced", "clustered-surrogate"};
}

ProblemConfig fixture_config(const std::string& name) {
    if (name == "f8-aircraft") return f8_config(0.0336);
    if (name == "scalar-toy") return scalar_toy_config(0.1);
    if (name == "network20-reduced") return network20_reduced_config();
    if (name == "clustered-surrogate") return surrogate_config(0.25);
    throw SchemaError("unknown example name: " + name +
                      " (known: f8-aircraft, scalar-toy, network20-reduced, clustered-surrogate)");
}

} // namespace spocb
