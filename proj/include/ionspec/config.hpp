#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ionspec/crystal.hpp"
#include "ionspec/spectrum.hpp"

namespace ionspec {

// Frequencies are given in Hz (cycles), times in seconds, heating in quanta/ms.
struct RunConfig {
    std::string scenario = "kerr";  // kerr | resonance | tables | noise-table

    int n_ions = 3;
    double mass_kg = 0;
    double freq_x_hz = 0;                // ignored when alpha_x is set
    std::optional<double> alpha_x;       // (omega_z / omega_x)^2
    double freq_y_hz = 0;
    double freq_z_hz = 0;

    std::vector<int> truncation;
    std::vector<double> initial_nbar;
    std::vector<double> heating_per_ms;

    double pulse_alpha = 0.25;
    std::array<int, 3> n_phi{4, 4, 4};
    std::array<int, 3> signature{1, -1, -1};

    double t_max = 0;  // s, before grid scaling
    double dt = 0;     // s
    double grid_scale = 1;

    std::uint64_t seed = 1;
    std::string output_dir = "out";

    std::string window = "none";  // none | cosine
    bool notch_carrier = false;
    bool phase_noise = false;  // attenuate the grid by 1 - loss(t1, t3)
    bool fast_path = true;
    int zero_pad = 4;
    double peak_threshold = 0.1;

    double noise_diffusion = 0;  // rad^2/s
    double noise_t1 = 2.5e-3;
    double noise_t3 = 2.5e-3;
    int noise_paths = 100000;

    // Points per axis after grid scaling.
    int points() const;
    TrapConfig trap() const;
    Window window_kind() const;
};

RunConfig default_config(const std::string& scenario);

// Overlays `doc` onto the defaults of its scenario (or `scenario` when the
// document does not name one). Unknown keys and wrong types are rejected.
RunConfig config_from_json(const nlohmann::json& doc, const std::string& scenario = "");
nlohmann::json config_to_json(const RunConfig& cfg);

void validate(const RunConfig& cfg);

}  // namespace ionspec
