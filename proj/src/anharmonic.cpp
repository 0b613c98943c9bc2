#include "ionspec/anharmonic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ionspec/diagnostics.hpp"

namespace ionspec {

namespace {

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// Number of distinct orderings of a small multiset.
int permutations(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    int count = 0;
    do {
        ++count;
    } while (std::next_permutation(v.begin(), v.end()));
    return count;
}

}  // namespace

KerrParams::KerrParams(int n) {
    for (int d = 0; d < 3; ++d) {
        omega_d[d].assign(n, 0.0);
        delta[d].assign(n, 0.0);
    }
}

KerrParams operator+(const KerrParams& a, const KerrParams& b) {
    KerrParams r = a;
    r.omega_si += b.omega_si;
    r.delta_zz += b.delta_zz;
    for (int d = 0; d < 3; ++d)
        for (std::size_t n = 0; n < r.omega_d[d].size(); ++n) {
            r.omega_d[d][n] += b.omega_d[d][n];
            r.delta[d][n] += b.delta[d][n];
        }
    return r;
}

Tensor3 c3_tensor(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Tensor3 c(n);
    auto term = [&](int a, int b) {  // sgn(u_a - u_b) / |u_a - u_b|^4
        double d = u[a] - u[b];
        return sgn(d) / std::pow(std::abs(d), 4);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = 0;
                if (i == j && j == k) {
                    for (int p = 0; p < n; ++p)
                        if (p != k) v += term(k, p);
                } else if (i == j) {
                    v = term(k, j);
                } else if (j == k) {
                    v = term(i, k);
                } else if (i == k) {
                    v = term(j, k);
                }
                c(i, j, k) = v;
            }
    return c;
}

Tensor4 c4_tensor(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Tensor4 c(n);
    auto inv5 = [&](int a, int b) { return 1.0 / std::pow(std::abs(u[a] - u[b]), 5); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    std::array<int, 4> idx{i, j, k, l};
                    std::sort(idx.begin(), idx.end());
                    double v = 0;
                    if (idx[0] == idx[3]) {
                        for (int p = 0; p < n; ++p)
                            if (p != idx[0]) v += inv5(idx[0], p);
                    } else if (idx[0] == idx[2] || idx[1] == idx[3]) {
                        // three equal, one different
                        v = -inv5(idx[0], idx[3]);
                    } else if (idx[0] == idx[1] && idx[2] == idx[3]) {
                        v = inv5(idx[0], idx[2]);
                    }
                    c(i, j, k, l) = v;
                }
    return c;
}

ModeTensors mode_tensors(const Tensor3& c3, const Tensor4& c4, const Eigen::MatrixXd& M) {
    const int n = c3.size();
    if (c4.size() != n || M.rows() != n || M.cols() != n)
        throw Error("anharmonic", "tensor and mode-matrix dimensions differ");

    // Contract one position index at a time, fixed loop order.
    Tensor3 a(n), b(n), d3(n);
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0;
                for (int i = 0; i < n; ++i) s += c3(i, j, k) * M(i, p);
                a(p, j, k) = s;
            }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int k = 0; k < n; ++k) {
                double s = 0;
                for (int j = 0; j < n; ++j) s += a(p, j, k) * M(j, q);
                b(p, q, k) = s;
            }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r) {
                double s = 0;
                for (int k = 0; k < n; ++k) s += b(p, q, k) * M(k, r);
                d3(p, q, r) = s;
            }

    Tensor4 x(n), y(n);
    Tensor4 d4(n);
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0;
                    for (int i = 0; i < n; ++i) s += c4(i, j, k, l) * M(i, p);
                    x(p, j, k, l) = s;
                }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0;
                    for (int j = 0; j < n; ++j) s += x(p, j, k, l) * M(j, q);
                    y(p, q, k, l) = s;
                }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int l = 0; l < n; ++l) {
                    double s = 0;
                    for (int k = 0; k < n; ++k) s += y(p, q, k, l) * M(k, r);
                    x(p, q, r, l) = s;
                }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int s4 = 0; s4 < n; ++s4) {
                    double s = 0;
                    for (int l = 0; l < n; ++l) s += x(p, q, r, l) * M(l, s4);
                    d4(p, q, r, s4) = s;
                }
    return {d3, d4};
}

KerrParams effective_kerr(const Crystal& crystal, const ModeTensors& t) {
    const NormalModes& m = crystal.modes;
    const int n = m.size();
    const int zz = m.zigzag();
    const double eps = crystal.epsilon();
    const double wz = crystal.trap.omega_z;
    const double g_zz = m.gamma_x[zz];
    if (n < 2 || g_zz <= 1e-6) {
        std::ostringstream os;
        os << "perturbative regime violated: gamma_zz = " << g_zz;
        throw PerturbativeRegimeError("anharmonic", os.str());
    }

    KerrParams k(n);
    const double e2w = eps * eps * wz;
    k.omega_si = 36 * e2w * t.d4(zz, zz, zz, zz) / g_zz;
    if (std::abs(k.omega_si) > 0.5 * crystal.omega_x(zz)) {
        std::ostringstream os;
        os << "perturbative regime violated: Omega_SI/omega_zz = "
           << k.omega_si / crystal.omega_x(zz);
        throw PerturbativeRegimeError("anharmonic", os.str());
    }
    for (int q = 1; q < n; ++q) {
        if (q != zz)
            k.omega_d[0][q] = 72 * e2w * t.d4(q, q, zz, zz) / std::sqrt(m.gamma_x[q] * g_zz);
        k.omega_d[1][q] = 24 * e2w * t.d4(zz, zz, q, q) / std::sqrt(g_zz * m.gamma_y[q]);
        k.omega_d[2][q] = -96 * e2w * t.d4(zz, zz, q, q) / std::sqrt(g_zz * m.lambda_z[q]);
    }
    k.delta_zz = k.omega_si;
    for (int d = 0; d < 3; ++d)
        for (int q = 1; q < n; ++q) {
            k.delta[d][q] = 0.5 * k.omega_d[d][q];
            k.delta_zz += 0.5 * k.omega_d[d][q];
        }
    return k;
}

KerrParams combine_orders(const KerrParams& third, const KerrParams& fourth) {
    return third + fourth;
}

EffectiveParams effective_params(const Crystal& crystal, const ModeTensors& t) {
    EffectiveParams p;
    p.fourth = effective_kerr(crystal, t);
    p.third = perturbative_third_order(crystal, t);
    p.effective = combine_orders(p.third, p.fourth);
    return p;
}

ResonantCoupling resonant_coupling(const Crystal& crystal, const ModeTensors& t,
                                   double alpha_window) {
    const NormalModes& m = crystal.modes;
    if (m.size() < 2) throw Error("anharmonic", "resonant coupling needs at least 2 ions");
    const int zz = m.zigzag();
    const int str = 1;
    const double wz = crystal.trap.omega_z;
    ResonantCoupling r;
    r.omega_t = 3 * crystal.epsilon() * wz * t.d3(zz, zz, str) /
                std::pow(m.gamma_x[zz] * m.gamma_x[zz] * m.lambda_z[str], 0.25);
    r.detuning = 2 * crystal.omega_x(zz) - crystal.omega_axial(str);
    if (std::abs(m.alpha_x - resonant_alpha) > alpha_window) {
        std::ostringstream os;
        os << "alpha_x = " << m.alpha_x << " is outside the resonance window; detuning "
           << r.detuning / (2 * constants::pi) << " Hz";
        warn("anharmonic", os.str());
    }
    return r;
}

RwaReport rwa_report(const Crystal& crystal, const ModeTensors& t) {
    const NormalModes& m = crystal.modes;
    const int n = m.size();
    const int zz = m.zigzag();
    const double e2w = crystal.epsilon() * crystal.epsilon() * crystal.trap.omega_z;

    struct Slot {
        int dir;
        int index;
    };
    auto gamma = [&](const Slot& s) {
        return s.dir == 0 ? m.gamma_x[s.index]
                          : (s.dir == 1 ? m.gamma_y[s.index] : m.lambda_z[s.index]);
    };
    auto omega = [&](const Slot& s) { return crystal.trap.omega_z * std::sqrt(gamma(s)); };

    RwaReport report;
    auto emit = [&](const std::string& family, double k, const std::array<Slot, 4>& q,
                    double mult) {
        double d4 = t.d4(q[0].index, q[1].index, q[2].index, q[3].index);
        if (std::abs(d4) < 1e-12) return;
        double norm = std::pow(gamma(q[0]) * gamma(q[1]) * gamma(q[2]) * gamma(q[3]), 0.25);
        double c = k * e2w * d4 * mult / norm;
        std::ostringstream base;
        base << family << "[" << q[0].index << "," << q[1].index << "," << q[2].index << ","
             << q[3].index << "]";
        for (int signs = 0; signs < 16; ++signs) {
            std::string pattern;
            double w = 0;
            // net creation count per distinct mode decides secularity exactly
            std::vector<std::pair<int, int>> net;
            for (int s = 0; s < 4; ++s) {
                bool create = (signs >> (3 - s)) & 1;
                pattern += create ? '+' : '-';
                w += (create ? 1.0 : -1.0) * omega(q[s]);
                int key = q[s].dir * n + q[s].index;
                auto it = std::find_if(net.begin(), net.end(),
                                       [&](auto& p) { return p.first == key; });
                if (it == net.end())
                    net.push_back({key, create ? 1 : -1});
                else
                    it->second += create ? 1 : -1;
            }
            bool secular = std::all_of(net.begin(), net.end(), [](auto& p) { return p.second == 0; });
            RwaTerm term{base.str() + pattern, c, secular ? 0.0 : w,
                         secular ? 0.0 : std::abs(c / w), secular};
            if (!secular && term.ratio > report.max_ratio) {
                report.max_ratio = term.ratio;
                report.worst = term.id;
            }
            report.terms.push_back(term);
        }
    };

    for (int a = 1; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c)
                for (int d = c; d < n; ++d) {
                    if (a != zz && b != zz && c != zz && d != zz) continue;
                    emit("xxxx", 3, {Slot{0, a}, Slot{0, b}, Slot{0, c}, Slot{0, d}},
                         permutations({a, b, c, d}));
                }
    for (int a = 1; a < n; ++a)
        for (int b = a; b < n; ++b) {
            if (a != zz && b != zz) continue;
            for (int c = 1; c < n; ++c)
                for (int d = c; d < n; ++d) {
                    double mult = permutations({a, b}) * permutations({c, d});
                    emit("xxyy", 6, {Slot{0, a}, Slot{0, b}, Slot{1, c}, Slot{1, d}}, mult);
                    emit("xxzz", -24, {Slot{0, a}, Slot{0, b}, Slot{2, c}, Slot{2, d}}, mult);
                }
        }
    return report;
}

std::vector<Manifold> resonant_manifolds(double omega_t, int max_quanta) {
    if (max_quanta < 2) throw Error("anharmonic", "max_quanta must be >= 2");
    std::vector<Manifold> out;
    for (int k = 2; k <= max_quanta; ++k) {
        Manifold mf;
        mf.charge = k;
        for (int s = 0; 2 * s <= k; ++s) mf.basis.push_back({s, k - 2 * s});
        const int dim = static_cast<int>(mf.basis.size());
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i + 1 < dim; ++i) {
            int s = mf.basis[i][0];
            int z = mf.basis[i][1];
            // <s+1, z-2| a_str^dag a_zz^2 |s, z>
            double v = omega_t * std::sqrt(double(z) * (z - 1)) * std::sqrt(s + 1.0);
            h(i + 1, i) = v;
            h(i, i + 1) = v;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        for (int i = 0; i < dim; ++i) mf.eigenvalues.push_back(es.eigenvalues()[i]);
        out.push_back(std::move(mf));
    }
    return out;
}

}  // namespace ionspec
