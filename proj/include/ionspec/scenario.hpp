#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ionspec/anharmonic.hpp"
#include "ionspec/config.hpp"
#include "ionspec/protocol.hpp"
#include "ionspec/spectrum.hpp"

namespace ionspec {

// Diagonal zigzag Hamiltonian of the Kerr scenario, rad/s:
//   E = omega_si/2 n(n-1) + (delta + chi_y n_y + chi_z n_z) n
struct KerrModel {
    double omega_si = 0;
    double delta = 0;
    double chi_y = 0;  // cross-Kerr with the y zigzag mode
    double chi_z = 0;  // cross-Kerr with the Egyptian mode

    static KerrModel from(const KerrParams& p, int n_ions);
};

// Thermal spectator branches (n_y, n_z), each a single-mode zigzag model.
std::vector<MixtureBranch> kerr_branches(const KerrModel& k, const std::vector<int>& dims,
                                         const std::vector<double>& nbar, double heating_zz);
// The same physics on the full three-mode register.
LindbladModel kerr_dense_model(const KerrModel& k, const FockRegister& reg,
                               const std::vector<double>& heating);

// Omega_T (a_zz^2 c^dag + h.c.) - detuning n_str on (zz, stretch), with heating.
LindbladModel resonance_model(double omega_t, double detuning, const FockRegister& reg,
                              const std::vector<double>& heating);

CMat thermal_product(const std::vector<int>& dims, const std::vector<double>& nbar);

struct ScenarioResult {
    RunConfig config;
    nlohmann::json derived;
    std::optional<SignalGrid> grid;
    std::optional<Spectrum2D> display;   // zero padded
    std::optional<Spectrum2D> raw;       // one bin per grid point
    std::optional<Spectrum1D> proj1, proj3;
    std::vector<Peak> peaks;             // found on the raw spectrum
    std::vector<std::pair<std::string, std::string>> csv;  // file name, content
    double omega_zz = 0;
    double omega_si = 0;
    double omega_t = 0;
    double carrier = 0;
};

ScenarioResult run_scenario(const RunConfig& cfg, int threads = 1);

// Writes all artifacts into dir and returns the file names written.
std::vector<std::string> write_artifacts(const ScenarioResult& r, const std::string& dir);

std::string sha256_file(const std::string& path);

// Table rows in Hz; columns follow the mode naming x1..., zz, y1..., z1...
std::string shifts_csv(const EffectiveParams& p, int n_ions);
std::string dephasing_csv(const EffectiveParams& p, int n_ions);

}  // namespace ionspec
