#include "ionspec/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "ionspec/anharmonic.hpp"
#include "ionspec/crystal.hpp"
#include "ionspec/diagnostics.hpp"
#include "ionspec/phasenoise.hpp"
#include "ionspec/protocol.hpp"

namespace ionspec {

using nlohmann::json;

int RunConfig::points() const { return grid_points(t_max * grid_scale, dt); }

TrapConfig RunConfig::trap() const {
    TrapConfig t;
    t.n_ions = n_ions;
    t.mass = mass_kg;
    t.omega_z = 2 * constants::pi * freq_z_hz;
    t.omega_y = 2 * constants::pi * freq_y_hz;
    t.omega_x = alpha_x ? t.omega_z / std::sqrt(*alpha_x) : 2 * constants::pi * freq_x_hz;
    return t;
}

Window RunConfig::window_kind() const { return window == "cosine" ? Window::Cosine : Window::None; }

RunConfig default_config(const std::string& scenario) {
    RunConfig c;
    c.scenario = scenario;
    c.mass_kg = constants::mass_ca40_ion;
    c.freq_x_hz = 3.1012e6;
    c.freq_y_hz = 5.0e6;
    c.freq_z_hz = 2.0e6;
    c.noise_diffusion = reference_diffusion;
    if (scenario == "kerr" || scenario == "tables" || scenario == "noise-table") {
        // zigzag (x), zigzag (y), Egyptian (z)
        c.truncation = {9, 15, 15};
        c.initial_nbar = {1.0, 4.0, 4.0};
        c.heating_per_ms = {0.0, 0.0, 0.0};
        c.t_max = 2e-3;
        c.dt = 25.3e-6;
    } else if (scenario == "resonance") {
        // zigzag (x), stretch (z)
        c.alpha_x = resonant_alpha;
        c.truncation = {9, 6};
        c.initial_nbar = {0.7, 0.2};
        c.heating_per_ms = {0.2, 0.1};
        c.t_max = 2e-3;
        c.dt = 10.6e-6;
    } else {
        throw ConfigError("cli", "unknown scenario '" + scenario + "'");
    }
    return c;
}

namespace {

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
    if (!obj.is_object()) throw ConfigError("cli", where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("cli", "unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("cli", where + "." + key + ": " + e.what());
    }
}

}  // namespace

RunConfig config_from_json(const json& doc, const std::string& scenario) {
    check_keys(doc, "config",
               {"scenario", "trap", "truncation", "initial_nbar", "heating_quanta_per_ms", "pulse",
                "time", "seed", "output_dir", "flags", "noise"});
    std::string sc = scenario;
    read(doc, "scenario", sc, "config");
    if (sc.empty()) sc = "kerr";
    RunConfig c = default_config(sc);

    if (doc.contains("trap")) {
        const json& t = doc["trap"];
        check_keys(t, "trap",
                   {"n_ions", "mass_kg", "freq_x_hz", "alpha_x", "freq_y_hz", "freq_z_hz"});
        read(t, "n_ions", c.n_ions, "trap");
        read(t, "mass_kg", c.mass_kg, "trap");
        read(t, "freq_y_hz", c.freq_y_hz, "trap");
        read(t, "freq_z_hz", c.freq_z_hz, "trap");
        if (t.contains("freq_x_hz") && t.contains("alpha_x") && !t["alpha_x"].is_null())
            throw ConfigError("cli", "trap: give either freq_x_hz or alpha_x, not both");
        if (t.contains("freq_x_hz")) {
            read(t, "freq_x_hz", c.freq_x_hz, "trap");
            c.alpha_x.reset();
        }
        if (t.contains("alpha_x")) {
            if (t["alpha_x"].is_null())
                c.alpha_x.reset();
            else {
                double a = 0;
                read(t, "alpha_x", a, "trap");
                c.alpha_x = a;
            }
        }
    }
    read(doc, "truncation", c.truncation, "config");
    read(doc, "initial_nbar", c.initial_nbar, "config");
    read(doc, "heating_quanta_per_ms", c.heating_per_ms, "config");
    if (doc.contains("pulse")) {
        const json& p = doc["pulse"];
        check_keys(p, "pulse", {"alpha", "n_phi", "signature"});
        read(p, "alpha", c.pulse_alpha, "pulse");
        read(p, "n_phi", c.n_phi, "pulse");
        read(p, "signature", c.signature, "pulse");
    }
    if (doc.contains("time")) {
        const json& t = doc["time"];
        check_keys(t, "time", {"t_max_s", "dt_s", "grid_scale"});
        read(t, "t_max_s", c.t_max, "time");
        read(t, "dt_s", c.dt, "time");
        read(t, "grid_scale", c.grid_scale, "time");
    }
    read(doc, "seed", c.seed, "config");
    read(doc, "output_dir", c.output_dir, "config");
    if (doc.contains("flags")) {
        const json& f = doc["flags"];
        check_keys(f, "flags",
                   {"window", "notch_carrier", "phase_noise", "fast_path", "zero_pad", "peak_threshold"});
        read(f, "window", c.window, "flags");
        read(f, "notch_carrier", c.notch_carrier, "flags");
        read(f, "phase_noise", c.phase_noise, "flags");
        read(f, "fast_path", c.fast_path, "flags");
        read(f, "zero_pad", c.zero_pad, "flags");
        read(f, "peak_threshold", c.peak_threshold, "flags");
    }
    if (doc.contains("noise")) {
        const json& n = doc["noise"];
        check_keys(n, "noise", {"diffusion", "t1_s", "t3_s", "paths"});
        read(n, "diffusion", c.noise_diffusion, "noise");
        read(n, "t1_s", c.noise_t1, "noise");
        read(n, "t3_s", c.noise_t3, "noise");
        read(n, "paths", c.noise_paths, "noise");
    }
    validate(c);
    return c;
}

json config_to_json(const RunConfig& c) {
    json trap = {{"n_ions", c.n_ions},
                 {"mass_kg", c.mass_kg},
                 {"freq_y_hz", c.freq_y_hz},
                 {"freq_z_hz", c.freq_z_hz}};
    if (c.alpha_x)
        trap["alpha_x"] = *c.alpha_x;
    else
        trap["freq_x_hz"] = c.freq_x_hz;
    return {{"scenario", c.scenario},
            {"trap", trap},
            {"truncation", c.truncation},
            {"initial_nbar", c.initial_nbar},
            {"heating_quanta_per_ms", c.heating_per_ms},
            {"pulse", {{"alpha", c.pulse_alpha}, {"n_phi", c.n_phi}, {"signature", c.signature}}},
            {"time", {{"t_max_s", c.t_max}, {"dt_s", c.dt}, {"grid_scale", c.grid_scale}}},
            {"seed", c.seed},
            {"output_dir", c.output_dir},
            {"flags",
             {{"window", c.window},
              {"notch_carrier", c.notch_carrier},
              {"phase_noise", c.phase_noise},
              {"fast_path", c.fast_path},
              {"zero_pad", c.zero_pad},
              {"peak_threshold", c.peak_threshold}}},
            {"noise",
             {{"diffusion", c.noise_diffusion},
              {"t1_s", c.noise_t1},
              {"t3_s", c.noise_t3},
              {"paths", c.noise_paths}}}};
}

void validate(const RunConfig& c) {
    auto fail = [](const std::string& m) { throw ConfigError("cli", m); };
    if (c.n_ions < 1) fail("n_ions must be >= 1");
    if (c.mass_kg <= 0 || c.freq_y_hz <= 0 || c.freq_z_hz <= 0) fail("trap values must be positive");
    if (c.alpha_x ? *c.alpha_x <= 0 : c.freq_x_hz <= 0) fail("x confinement must be positive");
    const std::size_t modes = c.truncation.size();
    if (c.initial_nbar.size() != modes || c.heating_per_ms.size() != modes)
        fail("truncation, initial_nbar and heating_quanta_per_ms need one entry per mode");
    for (int d : c.truncation)
        if (d < 2) fail("truncation dimensions must be >= 2");
    for (double n : c.initial_nbar)
        if (n < 0) fail("initial_nbar must be >= 0");
    for (double h : c.heating_per_ms)
        if (h < 0) fail("heating rates must be >= 0");
    if (c.pulse_alpha < 0) fail("pulse alpha must be >= 0");
    for (int n : c.n_phi)
        if (n < 1) fail("n_phi entries must be >= 1");
    if (!(c.dt > 0) || !(c.t_max > 0)) fail("t_max_s and dt_s must be positive");
    if (!(c.grid_scale > 0)) fail("grid_scale must be positive");
    if (c.window != "none" && c.window != "cosine") fail("window must be 'none' or 'cosine'");
    if (c.zero_pad < 1) fail("zero_pad must be >= 1");
    if (!(c.peak_threshold > 0 && c.peak_threshold < 1)) fail("peak_threshold must be in (0,1)");
    if (c.noise_diffusion < 0 || c.noise_paths < 1) fail("invalid noise settings");
    if (c.scenario == "kerr" && modes != 3) fail("kerr scenario needs 3 modes (zz, y zigzag, Egyptian)");
    if (c.scenario == "resonance" && modes != 2) fail("resonance scenario needs 2 modes (zz, stretch)");
}

}  // namespace ionspec
