#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ionspec/crystal.hpp"
#include "ionspec/diagnostics.hpp"

using namespace ionspec;
using doctest::Approx;

namespace {

// Central-difference Hessian of the full 3D potential for transverse x at
// the axial equilibrium.
Eigen::MatrixXd fd_transverse_hessian(const Eigen::VectorXd& u, double alpha) {
    const int n = static_cast<int>(u.size());
    auto pot = [&](const Eigen::VectorXd& x) {
        double v = 0;
        for (int i = 0; i < n; ++i) v += 0.5 * u[i] * u[i] + 0.5 * x[i] * x[i] / alpha;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double dz = u[i] - u[j], dx = x[i] - x[j];
                v += 1.0 / std::sqrt(dz * dz + dx * dx);
            }
        return v;
    };
    const double h = 1e-4;
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto at = [&](double si, double sj) {
                Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                x[i] += si;
                x[j] += sj;
                return pot(x);
            };
            H(i, j) = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
        }
    return H;
}

}  // namespace

TEST_CASE("equilibrium positions") {
    CHECK(solve_equilibrium(1)[0] == 0.0);

    Eigen::VectorXd u2 = solve_equilibrium(2);
    CHECK(u2[1] == Approx(std::cbrt(0.25)).epsilon(1e-12));
    CHECK(u2[0] == Approx(-std::cbrt(0.25)).epsilon(1e-12));

    Eigen::VectorXd u3 = solve_equilibrium(3);
    CHECK(u3[2] == Approx(std::cbrt(1.25)).epsilon(1e-12));
    CHECK(u3[1] == 0.0);

    // brute-force 1D minimization oracle for N=2: V(a) = a^2 + 1/(2a)
    double lo = 0.1, hi = 2.0;
    for (int k = 0; k < 200; ++k) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (m1 * m1 + 0.5 / m1 < m2 * m2 + 0.5 / m2) hi = m2; else lo = m1;
    }
    CHECK(u2[1] == Approx(0.5 * (lo + hi)).epsilon(1e-8));

    SUBCASE("gradient and antisymmetry up to N=10") {
        for (int n = 1; n <= 10; ++n) {
            Eigen::VectorXd u = solve_equilibrium(n);
            CHECK(axial_gradient(u).lpNorm<Eigen::Infinity>() < 1e-12);
            CHECK((u + u.reverse()).lpNorm<Eigen::Infinity>() < 1e-12);
            for (int i = 1; i < n; ++i) CHECK(u[i] > u[i - 1]);
        }
    }
    CHECK_THROWS_AS(solve_equilibrium(0), SolverError);
}

TEST_CASE("length scale") {
    const double wz = 2 * constants::pi * 2e6;
    const double l = length_scale(constants::mass_ca40_ion, wz);
    CHECK(l == Approx(2.80273e-6).epsilon(1e-4));
    CHECK(length_scale(constants::mass_ca40_ion, 4 * wz) == Approx(l / std::pow(4.0, 2.0 / 3)).epsilon(1e-13));
    CHECK(length_scale(2 * constants::mass_ca40_ion, wz) == Approx(l / std::cbrt(2.0)).epsilon(1e-13));
}

TEST_CASE("hessians") {
    Hessians h2 = hessians(solve_equilibrium(2), 0.3, 0.2);
    CHECK(h2.vz(0, 0) == Approx(2.0).epsilon(1e-12));
    CHECK(h2.vz(0, 1) == Approx(-1.0).epsilon(1e-12));

    Eigen::VectorXd u = solve_equilibrium(5);
    Hessians h = hessians(u, 0.2, 0.1);
    for (int i = 0; i < 5; ++i) CHECK(h.vz.row(i).sum() == Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd fd = fd_transverse_hessian(u, 0.2);
    CHECK((fd - h.vx).cwiseAbs().maxCoeff() < 1e-6);
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
    CHECK((h.vx - ((1 / 0.2 + 0.5) * id - 0.5 * h.vz)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normal modes") {
    Crystal c = build_crystal(reference_trap());
    const NormalModes& m = c.modes;
    CHECK(m.lambda_z[0] == Approx(1.0).epsilon(1e-12));
    CHECK(m.lambda_z[1] == Approx(3.0).epsilon(1e-12));
    CHECK(m.lambda_z[2] == Approx(5.8).epsilon(1e-12));
    CHECK((m.M.transpose() * m.M - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(m.M(i, 0) == Approx(1 / std::sqrt(3.0)).epsilon(1e-12));
    for (int n = 0; n < 3; ++n) {
        CHECK(m.gamma_x[n] == 1.0 / m.alpha_x + 0.5 - m.lambda_z[n] / 2);
        Eigen::Index imax;
        m.M.col(n).cwiseAbs().maxCoeff(&imax);
        CHECK(m.M(imax, n) > 0);
    }
    CHECK(m.gamma_x[0] > m.gamma_x[2]);
    // Table I: omega_zz / 2 pi = 131.95 kHz +- 0.2 kHz
    CHECK(std::abs(c.omega_x(2) / (2 * constants::pi) - 131.95e3) < 200);

    SUBCASE("diagonalization leakage up to N=10") {
        for (int n = 2; n <= 10; ++n) {
            Hessians h = hessians(solve_equilibrium(n), 0.01, 0.01);
            NormalModes nm = normal_modes(h);
            Eigen::MatrixXd d = nm.M.transpose() * h.vz * nm.M;
            Eigen::MatrixXd off = d;
            off.diagonal().setZero();
            CHECK(off.cwiseAbs().maxCoeff() < 1e-10 * d.diagonal().cwiseAbs().maxCoeff());
            CHECK(nm.lambda_z[0] == Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("instability and critical anisotropy") {
    const double ac = critical_anisotropy(3);
    CHECK(ac == Approx(2.0 / 4.8).epsilon(1e-12));
    // bisection oracle on gamma_N^x(alpha)
    Eigen::VectorXd u = solve_equilibrium(3);
    double lo = 0.1, hi = 1.0;
    for (int k = 0; k < 100; ++k) {
        double mid = 0.5 * (lo + hi);
        Hessians h = hessians(u, mid, 0.1);
        bool stable = true;
        try {
            normal_modes(h);
        } catch (const ChainUnstableError&) {
            stable = false;
        }
        (stable ? lo : hi) = mid;
    }
    CHECK(lo == Approx(ac).epsilon(1e-9));
    CHECK_THROWS_AS(normal_modes(hessians(u, ac * 1.01, 0.1)), ChainUnstableError);
    CHECK_NOTHROW(normal_modes(hessians(u, ac * 0.99, 0.1)));

    // 2 omega_zz = omega_str at alpha = 20/63
    NormalModes m = normal_modes(hessians(u, 20.0 / 63.0, 0.1));
    CHECK(m.gamma_x[2] == Approx(0.75).epsilon(1e-12));
    CHECK(2 * std::sqrt(m.gamma_x[2]) == Approx(std::sqrt(m.lambda_z[1])).epsilon(1e-12));
}
