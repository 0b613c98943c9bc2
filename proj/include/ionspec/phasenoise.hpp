#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ionspec {

struct WienerPhaseModel {
    double c = 0;            // diffusion constant, rad^2/s
    std::uint64_t seed = 1;
};

// Diffusion constant giving a 2 pi standard deviation after 10 s.
inline constexpr double reference_diffusion = 4 * 3.14159265358979323846 * 3.14159265358979323846 / 10;

// Second-order signal loss for signature p = (p2, p3, p4); pulse 1 at 0,
// pulses 2-3 at t1, pulse 4 at t1 + t3.
double contrast_loss(const std::array<int, 3>& p, double t1, double t3, double c);

// Rows are paths, columns the requested times. Path k draws from its own
// generator seeded from (seed, k), so results do not depend on threading.
Eigen::MatrixXd sample_paths(const WienerPhaseModel& model, const std::vector<double>& times,
                             int n_paths, int threads = 1);

// Monte Carlo estimate of 1 - Re <exp(i sum_k p_k phi_k)>.
double monte_carlo_loss(const WienerPhaseModel& model, const std::array<int, 3>& p, double t1,
                        double t3, int n_paths, int threads = 1);

}  // namespace ionspec
