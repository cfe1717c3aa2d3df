#include "spocb/trajectory.hpp"

#include "spocb/numerics.hpp"

#include <cstdio>
#include <ostream>

namespace spocb {

Vector Trajectory::z_at(double tq) const {
    return hermite_eval(t, z, zdot, tq);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.t.empty()) return;
    const Index nz = traj.z.front().size();
    const Index nu = traj.u.empty() ? 0 : traj.u.front().size();
    os << "t";
    for (Index i = 0; i < nz; ++i) os << ",z_" << (i + 1);
    for (Index i = 0; i < nu; ++i) os << ",u_" << (i + 1);
    for (Index i = 0; i < nz; ++i) os << ",chi_" << (i + 1);
    os << "\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.15g", v);
        os << buf;
    };
    for (size_t s = 0; s < traj.t.size(); ++s) {
        put(traj.t[s]);
        for (Index i = 0; i < nz; ++i) { os << ","; put(traj.z[s][i]); }
        for (Index i = 0; i < nu; ++i) { os << ","; put(traj.u[s][i]); }
        for (Index i = 0; i < nz; ++i) {
            os << ",";
            put(traj.has_costate() ? traj.chi[s][i] : 0.0);
        }
        os << "\n";
    }
}

double primal_dynamics_residual(const SpLqProblem& p, const Trajectory& traj) {
    // Differencing runs on the step endpoints; the interpolated midpoints
    // carry dense-output error that differentiation would amplify.
    std::vector<double> tt;
    std::vector<Vector> zz, uu;
    for (size_t s = 0; s < traj.t.size(); s += 2) {
        tt.push_back(traj.t[s]);
        zz.push_back(traj.z[s]);
        uu.push_back(traj.u[s]);
    }
    const std::vector<Vector> zd = fd_first_derivative(tt, zz);
    const Matrix A = p.A();
    const Matrix b = p.b();
    const Vector ie = p.ieps_diag();
    double worst = 0.0;
    for (size_t s = 0; s < tt.size(); ++s) {
        const Vector r = ie.asDiagonal() * zd[s] - A * zz[s] - b * uu[s];
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace spocb
