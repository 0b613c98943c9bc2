#include "ionspec/protocol.hpp"

#include <cmath>
#include <sstream>

#include "ionspec/crystal.hpp"
#include "ionspec/diagnostics.hpp"

namespace ionspec {

namespace {

constexpr double kRealTol = 1e-10;

int steps_for(double t, double dt) {
    double r = t / dt;
    double k = std::round(r);
    if (std::abs(r - k) > 1e-6) {
        std::ostringstream os;
        os << "time " << t << " s is not a multiple of the propagator step " << dt << " s";
        throw Error("protocol", os.str());
    }
    return static_cast<int>(k);
}

CMat pulse(const PulseSequence& seq, const FockRegister& reg, int k, double phi) {
    cplx alpha = std::polar(seq.amplitude[k], phi);
    return embed(displacement(alpha, reg.dims[seq.target]), seq.target, reg);
}

}  // namespace

double PulseSequence::phase(int k, int j) const {
    return 2 * constants::pi * j / n_phi.at(k - 2);
}

void PulseSequence::validate(const FockRegister& reg) const {
    if (target < 0 || target >= reg.modes()) throw Error("protocol", "target slot out of range");
    for (int k = 0; k < 3; ++k) {
        if (n_phi[k] < 1) throw Error("protocol", "phase counts must be >= 1");
        if (n_phi[k] < std::abs(q[k]) + 2)
            warn("protocol", "phase count below |q|+2 aliases higher orders onto the signature");
    }
}

int grid_points(double t_max, double dt) {
    if (!(dt > 0) || t_max < 0) throw Error("protocol", "invalid time grid");
    return static_cast<int>(std::floor(t_max / dt + 1e-9)) + 1;
}

double run_once(const Propagator& prop, const FockRegister& reg, const PulseSequence& seq,
                const CMat& rho0, double t1, double t3, const std::array<double, 3>& phases) {
    seq.validate(reg);
    const int s1 = steps_for(t1, prop.dt());
    const int s3 = steps_for(t3, prop.dt());
    CMat d1 = pulse(seq, reg, 0, 0.0);
    CMat d2 = pulse(seq, reg, 1, phases[0]);
    CMat d3 = pulse(seq, reg, 2, phases[1]);
    CMat d4 = pulse(seq, reg, 3, phases[2]);
    CMat n = embed(mode_operators(reg.dims[seq.target]).n, seq.target, reg);

    CMat rho = d1 * rho0 * d1.adjoint();
    rho = evolve(rho, prop, s1);
    CMat w = d3 * d2;
    rho = w * rho * w.adjoint();
    rho = evolve(rho, prop, s3);
    rho = d4 * rho * d4.adjoint();
    cplx s = (n * rho).trace();
    if (std::abs(s.imag()) > kRealTol) {
        std::ostringstream os;
        os << "imaginary residual " << s.imag() << " in measured population";
        throw NumericalConsistencyError("protocol", os.str());
    }
    return s.real();
}

cplx phase_cycle(const std::vector<double>& raw, const std::array<int, 3>& n_phi,
                 const std::array<int, 3>& q) {
    const int total = n_phi[0] * n_phi[1] * n_phi[2];
    if (static_cast<int>(raw.size()) != total)
        throw Error("protocol", "raw signal count does not match the phase grid");
    cplx s = 0;
    for (int j2 = 0; j2 < n_phi[0]; ++j2)
        for (int j3 = 0; j3 < n_phi[1]; ++j3)
            for (int j4 = 0; j4 < n_phi[2]; ++j4) {
                double ph = 2 * constants::pi *
                            (double(q[0] * j2) / n_phi[0] + double(q[1] * j3) / n_phi[1] +
                             double(q[2] * j4) / n_phi[2]);
                s += raw[(j2 * n_phi[1] + j3) * n_phi[2] + j4] * std::polar(1.0, -ph);
            }
    return s / double(total);
}

SignalGrid scan(const Propagator& prop, const FockRegister& reg, const PulseSequence& seq,
                const CMat& rho0, int points, const ScanOptions& opts) {
    seq.validate(reg);
    if (points < 1) throw Error("protocol", "grid needs at least one point");
    const int d = prop.dim();
    const int G = points;
    const Eigen::Index d2 = Eigen::Index(d) * d;
    const int n2 = seq.n_phi[0], n3 = seq.n_phi[1], n4 = seq.n_phi[2];

    const double bytes = double(d2) * sizeof(cplx) * G * (2.0 + n4) +
                         double(n2) * n3 * G * G * sizeof(cplx);
    if (bytes > double(opts.memory_budget)) {
        std::ostringstream os;
        os << "scan cache needs " << bytes / 1e9 << " GB, budget is "
           << double(opts.memory_budget) / 1e9 << " GB";
        throw SizeError("protocol", os.str());
    }

    // States after pulse 1 at every t1, stored as columns vec(rho).
    CMat d1 = pulse(seq, reg, 0, 0.0);
    CMat forward(d2, G);
    {
        CMat rho = d1 * rho0 * d1.adjoint();
        for (int i = 0; i < G; ++i) {
            if (i > 0) rho = evolve(rho, prop, 1);
            forward.col(i) = Eigen::Map<const CVec>(rho.data(), d2);
        }
    }

    // Heisenberg-evolved measurement after pulse 4 for every t3 and phi4,
    // stored as columns vec(O^T) so that tr(O rho) is a plain dot product.
    const CMat n = embed(mode_operators(reg.dims[seq.target]).n, seq.target, reg);
    std::vector<CMat> observables(n4, CMat(d2, G));
    parallel_for(n4, opts.threads, [&](std::size_t j4) {
        CMat d4 = pulse(seq, reg, 3, seq.phase(4, int(j4)));
        CMat o = d4.adjoint() * n * d4;
        for (int j = 0; j < G; ++j) {
            if (j > 0) o = prop.apply_adjoint(o);
            o = 0.5 * (o + o.adjoint()).eval();
            CMat ot = o.transpose();
            observables[j4].col(j) = Eigen::Map<const CVec>(ot.data(), d2);
        }
    });

    // One work item per (phi2, phi3); contributions summed in fixed order.
    std::vector<CMat> partial(std::size_t(n2) * n3);
    parallel_for(partial.size(), opts.threads, [&](std::size_t item) {
        const int j2 = int(item) / n3;
        const int j3 = int(item) % n3;
        CMat w = pulse(seq, reg, 2, seq.phase(3, j3)) * pulse(seq, reg, 1, seq.phase(2, j2));
        CMat moved(d2, G);
        for (int i = 0; i < G; ++i) {
            Eigen::Map<const CMat> rho(forward.col(i).data(), d, d);
            CMat r = w * rho * w.adjoint();
            moved.col(i) = Eigen::Map<const CVec>(r.data(), d2);
        }
        CMat acc = CMat::Zero(G, G);
        for (int j4 = 0; j4 < n4; ++j4) {
            CMat raw = moved.transpose() * observables[j4];
            double imag = raw.imag().cwiseAbs().maxCoeff();
            if (imag > kRealTol) {
                std::ostringstream os;
                os << "imaginary residual " << imag << " in raw signal";
                throw NumericalConsistencyError("protocol", os.str());
            }
            double ph = 2 * constants::pi *
                        (double(seq.q[0] * j2) / n2 + double(seq.q[1] * j3) / n3 +
                         double(seq.q[2] * j4) / n4);
            acc += raw.real().cast<cplx>() * std::polar(1.0, -ph);
        }
        partial[item] = std::move(acc);
    });

    SignalGrid g;
    g.dt = prop.dt();
    g.t1 = Eigen::VectorXd::LinSpaced(G, 0.0, (G - 1) * prop.dt());
    g.t3 = g.t1;
    g.values = CMat::Zero(G, G);
    for (const CMat& p : partial) g.values += p;
    g.values /= double(seq.total_phases());
    return g;
}

SignalGrid scan_mixture(const std::vector<MixtureBranch>& branches, const PulseSequence& seq,
                        double dt, int points, const ScanOptions& opts) {
    if (branches.empty()) throw Error("protocol", "mixture needs at least one branch");
    std::vector<CMat> parts(branches.size());
    ScanOptions inner = opts;
    inner.threads = 1;
    parallel_for(branches.size(), opts.threads, [&](std::size_t b) {
        const MixtureBranch& br = branches[b];
        Propagator prop = build_propagator(br.model, dt);
        parts[b] = br.weight * scan(prop, br.model.reg, seq, br.rho0, points, inner).values;
    });
    SignalGrid g;
    g.dt = dt;
    g.t1 = Eigen::VectorXd::LinSpaced(points, 0.0, (points - 1) * dt);
    g.t3 = g.t1;
    g.values = CMat::Zero(points, points);
    for (const CMat& p : parts) g.values += p;
    return g;
}

}  // namespace ionspec
