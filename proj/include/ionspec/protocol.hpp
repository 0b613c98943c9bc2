#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ionspec/dynamics.hpp"

namespace ionspec {

struct PulseSequence {
    std::array<double, 4> amplitude{0.25, 0.25, 0.25, 0.25};  // |alpha_k|
    std::array<int, 3> n_phi{4, 4, 4};                         // pulses 2..4
    std::array<int, 3> q{1, -1, -1};                           // signature (q2, q3, q4)
    int target = 0;                                            // displaced and measured slot

    int total_phases() const { return n_phi[0] * n_phi[1] * n_phi[2]; }
    // Phase of pulse k (2..4) at grid index j: 2 pi j / N.
    double phase(int k, int j) const;
    void validate(const FockRegister& reg) const;
};

struct SignalGrid {
    Eigen::VectorXd t1, t3;  // s
    CMat values;             // rows t1, cols t3
    double dt = 0;
};

// Number of grid points per axis: floor(t_max/dt) + 1.
int grid_points(double t_max, double dt);

// Single measurement n_target after D4 E(t3) D3 D2 E(t1) D1 rho0. Times must be
// integer multiples of prop.dt().
double run_once(const Propagator& prop, const FockRegister& reg, const PulseSequence& seq,
                const CMat& rho0, double t1, double t3, const std::array<double, 3>& phases);

// Discrete Fourier extraction over a uniform phase grid.
// raw is indexed ((j2 * N3) + j3) * N4 + j4.
cplx phase_cycle(const std::vector<double>& raw, const std::array<int, 3>& n_phi,
                 const std::array<int, 3>& q);

struct ScanOptions {
    int threads = 1;
    std::size_t memory_budget = std::size_t(2) << 30;  // cached states, bytes
};

// Phase-cycled signal on a points x points grid with step prop.dt().
SignalGrid scan(const Propagator& prop, const FockRegister& reg, const PulseSequence& seq,
                const CMat& rho0, int points, const ScanOptions& opts = {});

struct MixtureBranch {
    double weight = 0;
    LindbladModel model;
    CMat rho0;
};

// Weighted sum of independent scans, one per branch. Used for thermal
// averaging over static spectator occupations.
SignalGrid scan_mixture(const std::vector<MixtureBranch>& branches, const PulseSequence& seq,
                        double dt, int points, const ScanOptions& opts = {});

}  // namespace ionspec
