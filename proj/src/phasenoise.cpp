#include "ionspec/phasenoise.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ionspec/diagnostics.hpp"

namespace ionspec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double contrast_loss(const std::array<int, 3>& p, double t1, double t3, double c) {
    if (c < 0) throw Error("phasenoise", "diffusion constant must be >= 0");
    if (c * (t1 + t3) > 0.1) {
        std::ostringstream os;
        os << "c (t1 + t3) = " << c * (t1 + t3) << " is outside the small-fluctuation regime";
        warn("phasenoise", os.str());
    }
    const double s = p[0] + p[1] + p[2];
    return 0.5 * c * (s * s * t1 + double(p[2]) * p[2] * t3);
}

Eigen::MatrixXd sample_paths(const WienerPhaseModel& model, const std::vector<double>& times,
                             int n_paths, int threads) {
    for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k] < times[k - 1]) throw Error("phasenoise", "times must be ascending");
    if (!times.empty() && times[0] < 0) throw Error("phasenoise", "times must be >= 0");
    const int nt = static_cast<int>(times.size());
    Eigen::MatrixXd out(n_paths, nt);
    parallel_for(std::size_t(n_paths), threads, [&](std::size_t k) {
        std::mt19937_64 rng(splitmix64(model.seed ^ splitmix64(k)));
        std::normal_distribution<double> normal(0.0, 1.0);
        double x = 0, t = 0;
        for (int j = 0; j < nt; ++j) {
            x += std::sqrt(model.c * (times[j] - t)) * normal(rng);
            t = times[j];
            out(static_cast<Eigen::Index>(k), j) = x;
        }
    });
    return out;
}

double monte_carlo_loss(const WienerPhaseModel& model, const std::array<int, 3>& p, double t1,
                        double t3, int n_paths, int threads) {
    Eigen::MatrixXd x = sample_paths(model, {t1, t1 + t3}, n_paths, threads);
    // Pulse 1 sits at t = 0 where the path is pinned to zero.
    double acc = 0;
    for (int k = 0; k < n_paths; ++k) {
        double phase = (p[0] + p[1]) * x(k, 0) + p[2] * x(k, 1);
        acc += std::cos(phase);
    }
    return 1.0 - acc / n_paths;
}

}  // namespace ionspec
