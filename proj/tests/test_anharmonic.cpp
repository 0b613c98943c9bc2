#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "ionspec/anharmonic.hpp"
#include "ionspec/diagnostics.hpp"
#include "ionspec/fock.hpp"

using namespace ionspec;
using doctest::Approx;

namespace {

constexpr double kHz = 2 * constants::pi * 1e3;

// Exact axial Hessian of the dimensionless potential at arbitrary u.
Eigen::MatrixXd vz_at(const Eigen::VectorXd& u) { return hessians(u, 1.0, 1.0).vz; }

Eigen::VectorXd shifted(Eigen::VectorXd u, int k, double h) {
    u[k] += h;
    return u;
}

// Full 3D potential with transverse x only.
double potential_xz(const Eigen::VectorXd& z, const Eigen::VectorXd& x, double alpha) {
    double v = 0;
    const auto n = z.size();
    for (int i = 0; i < n; ++i) v += 0.5 * z[i] * z[i] + 0.5 * x[i] * x[i] / alpha;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dz = z[i] - z[j], dx = x[i] - x[j];
            v += 1.0 / std::sqrt(dz * dz + dx * dx);
        }
    return v;
}

struct Fixture {
    Crystal crystal = build_crystal(reference_trap());
    ModeTensors t = mode_tensors(c3_tensor(crystal.chain.u), c4_tensor(crystal.chain.u), crystal.modes.M);
    EffectiveParams p = effective_params(crystal, t);
};

const Fixture& fx() {
    static Fixture f;
    return f;
}

void check_rel(double got, double want, double tol) {
    CAPTURE(got);
    CAPTURE(want);
    CHECK(std::abs(got - want) <= tol * std::abs(want));
}

}  // namespace

TEST_CASE("C3 tensor") {
    Eigen::VectorXd u3 = solve_equilibrium(3);
    Tensor3 c = c3_tensor(u3);
    CHECK(c(1, 1, 1) == 0.0);
    CHECK(c(0, 1, 2) == 0.0);

    Eigen::VectorXd u2 = solve_equilibrium(2);
    CHECK(c3_tensor(u2)(1, 1, 1) == Approx(1 / std::pow(1.259921, 4)).epsilon(1e-5));

    for (int n : {3, 4, 5}) {
        Eigen::VectorXd u = solve_equilibrium(n);
        Tensor3 t = c3_tensor(u);
        const double h = 1e-4;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    if (i != k) CHECK(t(i, i, k) == Approx(-t(k, k, i)).epsilon(1e-12));
                    // third derivative oracle: C3 = -d3U/du_i du_j du_k / 6
                    double t3 = (vz_at(shifted(u, k, h))(i, j) - vz_at(shifted(u, k, -h))(i, j)) / (2 * h);
                    CHECK(t(i, j, k) == Approx(-t3 / 6).epsilon(1e-6).scale(1));
                }
    }

    SUBCASE("transverse-transverse-axial derivative on the full potential") {
        Eigen::VectorXd u = solve_equilibrium(3);
        Tensor3 t = c3_tensor(u);
        const double a = 0.3, h = 2e-3;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    auto hx = [&](double dz) {
                        Eigen::VectorXd z = shifted(u, k, dz);
                        auto f = [&](double si, double sj) {
                            Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
                            x[i] += si;
                            x[j] += sj;
                            return potential_xz(z, x, a);
                        };
                        return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
                    };
                    double txxz = (hx(h) - hx(-h)) / (2 * h);
                    CHECK(t(i, j, k) == Approx(txxz / 3).epsilon(1e-4).scale(1));
                }
    }
}

TEST_CASE("C4 tensor") {
    Eigen::VectorXd u2 = solve_equilibrium(2);
    CHECK(c4_tensor(u2)(0, 0, 0, 0) == Approx(1 / std::pow(1.259921, 5)).epsilon(1e-5));

    for (int n : {2, 3, 4, 5}) {
        Eigen::VectorXd u = solve_equilibrium(n);
        Tensor4 c = c4_tensor(u);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0;
                    for (int l = 0; l < n; ++l) s += c(i, j, k, l);
                    CHECK(std::abs(s) < 1e-12);
                }
    }

    Eigen::VectorXd u = solve_equilibrium(3);
    Tensor4 c = c4_tensor(u);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    std::array<int, 4> idx{i, j, k, l};
                    const double ref = c(i, j, k, l);
                    std::sort(idx.begin(), idx.end());
                    do {
                        CHECK(c(idx[0], idx[1], idx[2], idx[3]) == ref);
                    } while (std::next_permutation(idx.begin(), idx.end()));
                }

    // fourth derivative oracle: C4 = d4U / 24
    const double h = 1e-3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    auto v = [&](double dk, double dl) {
                        Eigen::VectorXd w = shifted(shifted(u, k, dk), l, dl);
                        return vz_at(w)(i, j);
                    };
                    double t4 = (v(h, h) - v(h, -h) - v(-h, h) + v(-h, -h)) / (4 * h * h);
                    CHECK(c(i, j, k, l) == Approx(t4 / 24).epsilon(1e-5).scale(1));
                }
}

TEST_CASE("mode tensors") {
    for (int n : {2, 3, 4, 5}) {
        Eigen::VectorXd u = solve_equilibrium(n);
        Hessians h = hessians(u, 0.05, 0.05);
        NormalModes m = normal_modes(h);
        ModeTensors t = mode_tensors(c3_tensor(u), c4_tensor(u), m.M);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                CHECK(std::abs(t.d3(0, a, b)) < 1e-12);
                CHECK(std::abs(t.d3(a, 0, b)) < 1e-12);
                CHECK(std::abs(t.d3(a, b, 0)) < 1e-12);
                for (int c = 0; c < n; ++c) {
                    CHECK(t.d3(a, b, c) == Approx(t.d3(b, a, c)).epsilon(1e-12).scale(1));
                    CHECK(std::abs(t.d4(0, a, b, c)) < 1e-12);
                    CHECK(std::abs(t.d4(a, 0, b, c)) < 1e-12);
                    CHECK(std::abs(t.d4(a, b, 0, c)) < 1e-12);
                    CHECK(std::abs(t.d4(a, b, c, 0)) < 1e-12);
                }
            }
    }
    // Direct contraction in the opposite index order.
    const ModeTensors& t = fx().t;
    const Eigen::MatrixXd& M = fx().crystal.modes.M;
    Tensor3 c3 = c3_tensor(fx().crystal.chain.u);
    double direct = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) direct += c3(j, i, k) * M(j, 2) * M(i, 2) * M(k, 1);
    CHECK(t.d3(2, 2, 1) == Approx(direct).epsilon(1e-12));
    CHECK(std::abs(t.d3(2, 2, 1)) == Approx(1.575407).epsilon(1e-5));
}

TEST_CASE("fourth-order parameters against Tables S1/S2") {
    const KerrParams& k = fx().p.fourth;
    check_rel(0.5 * k.omega_si / kHz, 12.9082, 0.01);
    check_rel(k.delta_zz / kHz, 25.2874, 0.01);
    check_rel(k.omega_d[0][1] / kHz, 0.9582, 0.01);
    check_rel(k.omega_d[1][1] / kHz, 0.1652, 0.01);
    check_rel(k.omega_d[1][2] / kHz, 0.5787, 0.01);
    check_rel(k.omega_d[2][1] / kHz, -0.8741, 0.01);
    check_rel(k.omega_d[2][2] / kHz, -1.8860, 0.01);
    check_rel(k.delta[0][1] / kHz, 0.4791, 0.01);
    check_rel(k.delta[1][1] / kHz, 0.0826, 0.01);
    check_rel(k.delta[1][2] / kHz, 0.2894, 0.01);
    check_rel(k.delta[2][1] / kHz, -0.4371, 0.01);
    check_rel(k.delta[2][2] / kHz, -0.9430, 0.01);
}

TEST_CASE("third-order parameters against Tables S1/S2") {
    const KerrParams& k = fx().p.third;
    check_rel(0.5 * k.omega_si / kHz, -10.3467, 0.01);
    check_rel(k.delta_zz / kHz, -10.0850, 0.01);
    check_rel(k.omega_d[0][1] / kHz, -1.0487, 0.01);
    check_rel(k.omega_d[2][1] / kHz, 1.0551, 0.01);
    check_rel(k.omega_d[2][2] / kHz, 0.5171, 0.01);
    check_rel(k.delta[0][1] / kHz, -0.5008, 0.01);
    check_rel(k.delta[2][1] / kHz, 0.5275, 0.01);
    check_rel(k.delta[2][2] / kHz, 0.2821, 0.01);
    for (int n = 0; n < 3; ++n) {
        CHECK(k.omega_d[1][n] == 0.0);
        CHECK(k.delta[1][n] == 0.0);
    }
}

TEST_CASE("effective parameters") {
    const EffectiveParams& p = fx().p;
    const KerrParams& e = p.effective;
    check_rel(e.delta_zz / kHz, 15.2025, 0.01);
    check_rel(e.omega_si / kHz, 5.12, 0.01);
    check_rel(e.omega_d[0][1] / kHz, -0.0905, 0.05);
    check_rel(e.delta[0][1] / kHz, -0.0217, 0.05);
    check_rel(e.omega_d[2][1] / kHz, 0.1810, 0.01);
    check_rel(e.omega_d[2][2] / kHz, -1.3690, 0.01);
    check_rel(e.delta[2][2] / kHz, -0.6609, 0.01);
    CHECK(e.omega_si == p.third.omega_si + p.fourth.omega_si);
    for (int d = 0; d < 3; ++d)
        for (int n = 0; n < 3; ++n) CHECK(e.omega_d[d][n] == p.third.omega_d[d][n] + p.fourth.omega_d[d][n]);
}

TEST_CASE("perturbative guards") {
    TrapConfig trap = reference_trap();
    trap.omega_x = trap.omega_z / std::sqrt(resonant_alpha);
    Crystal c = build_crystal(trap);
    ModeTensors t = mode_tensors(c3_tensor(c.chain.u), c4_tensor(c.chain.u), c.modes.M);
    CHECK_THROWS_AS(perturbative_third_order(c, t), NearResonanceError);

    trap.omega_x = trap.omega_z / std::sqrt(critical_anisotropy(3) * (1 - 1e-9));
    Crystal soft = build_crystal(trap);
    ModeTensors ts = mode_tensors(c3_tensor(soft.chain.u), c4_tensor(soft.chain.u), soft.modes.M);
    CHECK_THROWS_AS(effective_kerr(soft, ts), PerturbativeRegimeError);
}

TEST_CASE("resonant coupling") {
    TrapConfig trap = reference_trap();
    trap.omega_x = trap.omega_z / std::sqrt(resonant_alpha);
    Crystal c = build_crystal(trap);
    ModeTensors t = mode_tensors(c3_tensor(c.chain.u), c4_tensor(c.chain.u), c.modes.M);
    drain_warnings();
    ResonantCoupling r = resonant_coupling(c, t);
    CHECK(drain_warnings().empty());
    check_rel(std::abs(r.omega_t) / kHz, 5.9, 0.02);
    CHECK(std::abs(r.detuning) < 1e-9 * trap.omega_z);

    TrapConfig t2 = trap;
    t2.omega_z *= 1.7;
    t2.omega_x *= 1.7;
    t2.omega_y *= 1.7;
    Crystal c2 = build_crystal(t2);
    ResonantCoupling r2 = resonant_coupling(c2, mode_tensors(c3_tensor(c2.chain.u), c4_tensor(c2.chain.u), c2.modes.M));
    CHECK(r2.omega_t / r.omega_t == Approx(std::pow(1.7, 7.0 / 6.0)).epsilon(1e-10));

    // away from resonance: warning, not failure
    resonant_coupling(fx().crystal, fx().t);
    CHECK(drain_warnings().size() == 1);
}

TEST_CASE("RWA report") {
    RwaReport r = rwa_report(fx().crystal, fx().t);
    REQUIRE(r.terms.size() % 16 == 0);
    CHECK(!r.terms.empty());
    for (const auto& term : r.terms)
        if (term.secular) CHECK(term.frequency == 0.0);
    // the zigzag self term a^dag^2 a^2 is secular
    bool found = false;
    for (const auto& term : r.terms)
        if (term.id == "xxxx[2,2,2,2]++--") {
            found = true;
            CHECK(term.secular);
            CHECK(6 * term.coefficient == Approx(0.5 * fx().p.fourth.omega_si).epsilon(1e-12));
        }
    CHECK(found);
    CHECK(r.max_ratio > 0);
    CHECK(r.max_ratio < 1e-2);
}

TEST_CASE("resonant manifolds") {
    const double w = 2 * constants::pi * 5.9e3;
    auto m = resonant_manifolds(w, 5);
    REQUIRE(m.size() == 4);
    auto near = [&](double got, double want) { CHECK(std::abs(got - want) <= 1e-10 * w); };
    REQUIRE(m[0].eigenvalues.size() == 2);
    near(m[0].eigenvalues[0], -std::sqrt(2.0) * w);
    near(m[0].eigenvalues[1], std::sqrt(2.0) * w);
    near(m[1].eigenvalues[0], -std::sqrt(6.0) * w);
    near(m[1].eigenvalues[1], std::sqrt(6.0) * w);
    REQUIRE(m[2].eigenvalues.size() == 3);
    near(m[2].eigenvalues[0], -4 * w);
    near(m[2].eigenvalues[1], 0);
    near(m[2].eigenvalues[2], 4 * w);
    near(m[3].eigenvalues[0], -4 * std::sqrt(2.0) * w);
    near(m[3].eigenvalues[1], 0);
    near(m[3].eigenvalues[2], 4 * std::sqrt(2.0) * w);
    CHECK(m[2].basis[0] == std::array<int, 2>{0, 4});
    CHECK_THROWS(resonant_manifolds(w, 1));

    // Dense diagonalization on a register large enough to hold charge <= 5.
    FockRegister reg({8, 4}, {"zz", "str"});
    CMat a = embed(mode_operators(8).a, 0, reg);
    CMat c = embed(mode_operators(4).a, 1, reg);
    CMat term = c.adjoint() * a * a;
    CMat H = w * (term + term.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
    for (const auto& mf : m)
        for (double ev : mf.eigenvalues) {
            double best = 1e300;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                best = std::min(best, std::abs(es.eigenvalues()[i] - ev));
            CHECK(best <= 1e-10 * w);
        }
}
