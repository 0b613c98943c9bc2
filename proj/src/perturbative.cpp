// Second-order energy shifts from the cubic x-x-z couplings of the zigzag mode.

#include <cmath>
#include <map>
#include <sstream>

#include "ionspec/anharmonic.hpp"
#include "ionspec/diagnostics.hpp"

namespace ionspec {

namespace {

struct Term {
    int m1, m2, m3;  // indices into the involved-mode list
    double g;        // rad/s
};

using Occupation = std::vector<int>;

// Applies (a + a^dag) of mode m to every component of `state`.
std::map<Occupation, double> apply_x(const std::map<Occupation, double>& state, int m) {
    std::map<Occupation, double> out;
    for (const auto& [occ, amp] : state) {
        if (occ[m] > 0) {
            Occupation o = occ;
            o[m] -= 1;
            out[o] += amp * std::sqrt(double(occ[m]));
        }
        Occupation o = occ;
        o[m] += 1;
        out[o] += amp * std::sqrt(double(occ[m] + 1));
    }
    return out;
}

}  // namespace

KerrParams perturbative_third_order(const Crystal& crystal, const ModeTensors& t, int max_n) {
    const NormalModes& m = crystal.modes;
    const int n = m.size();
    if (n < 2) return KerrParams(n);
    const int zz = m.zigzag();
    const double wz = crystal.trap.omega_z;
    const double pref = 3 * crystal.epsilon() * wz;

    // Involved modes: x modes 1..n-1 then z modes 1..n-1.
    std::vector<double> freq;
    std::vector<double> stiff;
    for (int q = 1; q < n; ++q) {
        stiff.push_back(m.gamma_x[q]);
        freq.push_back(crystal.omega_x(q));
    }
    for (int q = 1; q < n; ++q) {
        stiff.push_back(m.lambda_z[q]);
        freq.push_back(crystal.omega_axial(q));
    }
    const int nm = static_cast<int>(freq.size());
    const int izz = zz - 1;
    auto zslot = [&](int q) { return (n - 1) + (q - 1); };

    std::vector<Term> terms;
    for (int a = 1; a < n; ++a)
        for (int b = 1; b < n; ++b) {
            if (a != zz && b != zz) continue;
            for (int p = 1; p < n; ++p) {
                double d = t.d3(a, b, p);
                if (std::abs(d) < 1e-14) continue;
                double g = pref * d / std::pow(m.gamma_x[a] * m.gamma_x[b] * m.lambda_z[p], 0.25);
                terms.push_back({a - 1, b - 1, zslot(p), g});
            }
        }

    auto energy = [&](const Occupation& o) {
        double e = 0;
        for (int i = 0; i < nm; ++i) e += freq[i] * o[i];
        return e;
    };

    // Features: 1, n_i, n_i n_j (i <= j).
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < nm; ++i)
        for (int j = i; j < nm; ++j) pairs.push_back({i, j});
    const int nfeat = 1 + nm + static_cast<int>(pairs.size());

    int nstates = 1;
    for (int i = 0; i < nm; ++i) nstates *= (max_n + 1);
    Eigen::MatrixXd A(nstates, nfeat);
    Eigen::VectorXd y(nstates);

    const double guard = 1e-3 * wz;
    for (int s = 0; s < nstates; ++s) {
        Occupation occ(nm);
        int r = s;
        for (int i = 0; i < nm; ++i) {
            occ[i] = r % (max_n + 1);
            r /= (max_n + 1);
        }
        // Amplitudes per target state, summed over all terms so that
        // interfering paths are combined before squaring.
        std::map<Occupation, double> coupled;
        for (const Term& term : terms) {
            std::map<Occupation, double> st{{occ, 1.0}};
            st = apply_x(apply_x(apply_x(st, term.m3), term.m2), term.m1);
            for (const auto& [o, amp] : st) coupled[o] += term.g * amp;
        }
        const double e0 = energy(occ);
        double de = 0;
        for (const auto& [o, amp] : coupled) {
            if (o == occ || amp == 0.0) continue;
            double gap = e0 - energy(o);
            if (std::abs(gap) < guard) {
                std::ostringstream os;
                os << "near-resonant denominator " << gap / (2 * constants::pi)
                   << " Hz in third-order shifts; use the resonant treatment";
                throw NearResonanceError("anharmonic", os.str());
            }
            de += amp * amp / gap;
        }
        y[s] = de;
        A(s, 0) = 1;
        for (int i = 0; i < nm; ++i) A(s, 1 + i) = occ[i];
        for (std::size_t k = 0; k < pairs.size(); ++k)
            A(s, 1 + nm + static_cast<int>(k)) = double(occ[pairs[k].first]) * occ[pairs[k].second];
    }

    Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    double resid = (A * c - y).lpNorm<Eigen::Infinity>();
    if (resid > 1e-6 * std::max(1.0, y.lpNorm<Eigen::Infinity>()))
        warn("anharmonic", "third-order shifts deviate from the Kerr form");

    auto lin = [&](int i) { return c[1 + i]; };
    auto quad = [&](int i, int j) {
        if (i > j) std::swap(i, j);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (pairs[k].first == i && pairs[k].second == j) return c[1 + nm + static_cast<int>(k)];
        return 0.0;
    };

    KerrParams k(n);
    k.omega_si = 2 * quad(izz, izz);
    k.delta_zz = lin(izz);
    for (int q = 1; q < n; ++q) {
        if (q != zz) {
            k.omega_d[0][q] = quad(izz, q - 1);
            k.delta[0][q] = lin(q - 1);
        }
        k.omega_d[2][q] = quad(izz, zslot(q));
        k.delta[2][q] = lin(zslot(q));
    }
    return k;
}

}  // namespace ionspec
