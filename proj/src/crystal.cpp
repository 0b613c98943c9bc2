#include "ionspec/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ionspec/diagnostics.hpp"

namespace ionspec {

TrapConfig reference_trap() {
    TrapConfig t;
    t.n_ions = 3;
    t.omega_z = 2 * constants::pi * 2.0e6;
    t.omega_x = 2 * constants::pi * 3.1012e6;
    t.omega_y = 2 * constants::pi * 5.0e6;
    return t;
}

double axial_potential(const Eigen::VectorXd& u) {
    double v = 0.5 * u.squaredNorm();
    for (int i = 0; i < u.size(); ++i)
        for (int j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u[i] - u[j]);
    return v;
}

Eigen::VectorXd axial_gradient(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Eigen::VectorXd g = u;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double d = u[i] - u[j];
            g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
    return g;
}

namespace {

Eigen::MatrixXd axial_hessian(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = 1.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
            h(i, i) += c;
            h(i, j) = -c;
        }
    }
    return h;
}

}  // namespace

Eigen::VectorXd solve_equilibrium(int n_ions) {
    if (n_ions < 1) throw SolverError("crystal", "n_ions must be >= 1");
    const int n = n_ions;
    Eigen::VectorXd u(n);
    if (n == 1) return Eigen::VectorXd::Zero(1);

    const double span = 2.0 * std::pow(n, 0.56);
    for (int i = 0; i < n; ++i) u[i] = -0.5 * span + span * i / (n - 1);

    double residual = 0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd g = axial_gradient(u);
        residual = g.lpNorm<Eigen::Infinity>();
        if (residual < 1e-13) break;
        Eigen::VectorXd step = axial_hessian(u).ldlt().solve(g);
        // Damp so the ordering is preserved and the potential decreases.
        double t = 1.0;
        const double v0 = axial_potential(u);
        for (int k = 0; k < 60; ++k) {
            Eigen::VectorXd trial = u - t * step;
            bool ordered = true;
            for (int i = 1; i < n; ++i) ordered &= trial[i] > trial[i - 1];
            if (ordered && axial_potential(trial) <= v0 + 1e-14 * std::abs(v0)) break;
            t *= 0.5;
        }
        u -= t * step;
        Eigen::VectorXd s = 0.5 * (u - u.reverse());
        u = s;
    }
    residual = axial_gradient(u).lpNorm<Eigen::Infinity>();
    if (!(residual < 1e-12)) {
        std::ostringstream os;
        os << "equilibrium solver did not converge for N=" << n << ", residual " << residual;
        throw SolverError("crystal", os.str());
    }
    if (n % 2 == 1) u[n / 2] = 0.0;
    return u;
}

double length_scale(double mass, double omega_z) {
    using namespace constants;
    double l3 = e_charge * e_charge / (4 * pi * epsilon0 * mass * omega_z * omega_z);
    return std::cbrt(l3);
}

EquilibriumChain equilibrium_chain(const TrapConfig& trap) {
    if (trap.n_ions < 1 || trap.mass <= 0 || trap.omega_x <= 0 || trap.omega_y <= 0 ||
        trap.omega_z <= 0)
        throw SolverError("crystal", "trap frequencies, mass and ion count must be positive");
    return {solve_equilibrium(trap.n_ions), length_scale(trap.mass, trap.omega_z)};
}

Hessians hessians(const Eigen::VectorXd& u, double alpha_x, double alpha_y) {
    Hessians h;
    h.alpha_x = alpha_x;
    h.alpha_y = alpha_y;
    h.vz = axial_hessian(u);
    const auto n = u.size();
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    h.vx = (1.0 / alpha_x + 0.5) * id - 0.5 * h.vz;
    h.vy = (1.0 / alpha_y + 0.5) * id - 0.5 * h.vz;
    return h;
}

NormalModes normal_modes(const Hessians& h) {
    const int n = static_cast<int>(h.vz.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.vz);
    if (es.info() != Eigen::Success) throw SolverError("crystal", "eigen-decomposition failed");

    NormalModes m;
    m.alpha_x = h.alpha_x;
    m.alpha_y = h.alpha_y;
    m.lambda_z = es.eigenvalues();
    m.M = es.eigenvectors();
    for (int k = 1; k < n; ++k)
        if (m.lambda_z[k] - m.lambda_z[k - 1] < 1e-9 * std::max(1.0, m.lambda_z[k]))
            throw DegenerateModesError("crystal", "degenerate axial eigenvalues");
    for (int k = 0; k < n; ++k) {
        Eigen::Index imax = 0;
        m.M.col(k).cwiseAbs().maxCoeff(&imax);
        // Ties (e.g. the uniform COM vector) resolve to the first entry.
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(m.M(i, k)) > std::abs(m.M(imax, k)) - 1e-12) {
                imax = i;
                break;
            }
        if (m.M(imax, k) < 0) m.M.col(k) *= -1.0;
    }
    m.gamma_x = Eigen::VectorXd::Constant(n, 1.0 / h.alpha_x + 0.5) - 0.5 * m.lambda_z;
    m.gamma_y = Eigen::VectorXd::Constant(n, 1.0 / h.alpha_y + 0.5) - 0.5 * m.lambda_z;
    if (m.gamma_x[n - 1] <= 0 || m.gamma_y[n - 1] <= 0) {
        std::ostringstream os;
        os << "chain unstable: transverse zigzag mode n=" << n - 1 << " has gamma_x="
           << m.gamma_x[n - 1] << ", gamma_y=" << m.gamma_y[n - 1];
        throw ChainUnstableError("crystal", os.str());
    }
    return m;
}

double critical_anisotropy(int n_ions) {
    if (n_ions < 3) throw SolverError("crystal", "critical anisotropy needs n_ions >= 3");
    Hessians h = hessians(solve_equilibrium(n_ions), 0.1, 0.1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.vz, Eigen::EigenvaluesOnly);
    return 2.0 / (es.eigenvalues()[n_ions - 1] - 1.0);
}

double Crystal::epsilon() const {
    double z0 = std::sqrt(constants::hbar / (2 * trap.mass * trap.omega_z));
    return z0 / (4 * chain.l_z);
}

double Crystal::omega_axial(int n) const { return trap.omega_z * std::sqrt(modes.lambda_z[n]); }
double Crystal::omega_x(int n) const { return trap.omega_z * std::sqrt(modes.gamma_x[n]); }
double Crystal::omega_y(int n) const { return trap.omega_z * std::sqrt(modes.gamma_y[n]); }

Crystal build_crystal(const TrapConfig& trap) {
    Crystal c;
    c.trap = trap;
    c.chain = equilibrium_chain(trap);
    c.modes = normal_modes(hessians(c.chain.u, trap.alpha_x(), trap.alpha_y()));
    return c;
}

}  // namespace ionspec
