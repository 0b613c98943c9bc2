#include "ionspec/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "ionspec/diagnostics.hpp"
#include "ionspec/matrix_io.hpp"
#include "ionspec/phasenoise.hpp"

namespace ionspec {

using nlohmann::json;

namespace {

constexpr double two_pi = 2 * constants::pi;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double hz(double w) { return w / two_pi; }

std::vector<std::string> mode_columns(int n, bool dephasing) {
    std::vector<std::string> c;
    for (int q = 1; q < n - 1; ++q) c.push_back("x" + std::to_string(q));
    c.push_back(dephasing ? "si_half" : "zz");
    for (int q = 1; q < n; ++q) c.push_back("y" + std::to_string(q));
    for (int q = 1; q < n; ++q) c.push_back("z" + std::to_string(q));
    return c;
}

std::vector<double> row(const KerrParams& k, int n, bool dephasing) {
    const auto& src = dephasing ? k.omega_d : k.delta;
    std::vector<double> r;
    for (int q = 1; q < n - 1; ++q) r.push_back(hz(src[0][q]));
    r.push_back(hz(dephasing ? 0.5 * k.omega_si : k.delta_zz));
    for (int q = 1; q < n; ++q) r.push_back(hz(src[1][q]));
    for (int q = 1; q < n; ++q) r.push_back(hz(src[2][q]));
    return r;
}

std::string table_csv(const EffectiveParams& p, int n, bool dephasing) {
    std::ostringstream os;
    os << "order";
    for (const auto& c : mode_columns(n, dephasing)) os << "," << c << "_hz";
    os << "\n";
    const std::pair<const char*, const KerrParams*> rows[] = {
        {"third", &p.third}, {"fourth", &p.fourth}, {"effective", &p.effective}};
    for (const auto& [name, k] : rows) {
        os << name;
        for (double v : row(*k, n, dephasing)) os << "," << num(v);
        os << "\n";
    }
    return os.str();
}

json kerr_json(const KerrParams& k) {
    json d = json::object();
    const char* dirs[] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        std::vector<double> od, de;
        for (double v : k.omega_d[a]) od.push_back(hz(v));
        for (double v : k.delta[a]) de.push_back(hz(v));
        d[std::string("omega_d_") + dirs[a] + "_hz"] = od;
        d[std::string("delta_") + dirs[a] + "_hz"] = de;
    }
    d["omega_si_hz"] = hz(k.omega_si);
    d["delta_zz_hz"] = hz(k.delta_zz);
    return d;
}

json crystal_json(const Crystal& c) {
    const NormalModes& m = c.modes;
    std::vector<double> u(c.chain.u.data(), c.chain.u.data() + c.chain.u.size());
    std::vector<double> lz(m.lambda_z.data(), m.lambda_z.data() + m.size());
    std::vector<double> gx(m.gamma_x.data(), m.gamma_x.data() + m.size());
    std::vector<double> gy(m.gamma_y.data(), m.gamma_y.data() + m.size());
    return {{"positions", u},       {"l_z_m", c.chain.l_z}, {"epsilon", c.epsilon()},
            {"lambda_z", lz},       {"gamma_x", gx},        {"gamma_y", gy},
            {"alpha_x", m.alpha_x}, {"alpha_y", m.alpha_y},
            {"omega_zz_hz", hz(c.omega_x(m.zigzag()))}};
}

std::string tensors_csv(const ModeTensors& t) {
    std::ostringstream os;
    os << "tensor,i,j,k,l,value\n";
    const int n = t.d3.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) os << "D3," << i << "," << j << "," << k << ",," << num(t.d3(i, j, k)) << "\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    os << "D4," << i << "," << j << "," << k << "," << l << "," << num(t.d4(i, j, k, l)) << "\n";
    return os.str();
}

std::string modes_csv(const Crystal& c) {
    std::ostringstream os;
    os << "n,u,lambda_z,gamma_x,gamma_y,freq_z_hz,freq_x_hz,freq_y_hz\n";
    for (int n = 0; n < c.modes.size(); ++n)
        os << n << "," << num(c.chain.u[n]) << "," << num(c.modes.lambda_z[n]) << ","
           << num(c.modes.gamma_x[n]) << "," << num(c.modes.gamma_y[n]) << ","
           << num(hz(c.omega_axial(n))) << "," << num(hz(c.omega_x(n))) << ","
           << num(hz(c.omega_y(n))) << "\n";
    return os.str();
}

std::string rwa_csv(const RwaReport& r) {
    std::ostringstream os;
    os << "term,coefficient_hz,frequency_hz,ratio,secular\n";
    for (const auto& t : r.terms)
        os << t.id << "," << num(hz(t.coefficient)) << "," << num(hz(t.frequency)) << ","
           << num(t.ratio) << "," << (t.secular ? 1 : 0) << "\n";
    return os.str();
}

PulseSequence sequence(const RunConfig& cfg) {
    PulseSequence s;
    s.amplitude = {cfg.pulse_alpha, cfg.pulse_alpha, cfg.pulse_alpha, cfg.pulse_alpha};
    s.n_phi = cfg.n_phi;
    s.q = cfg.signature;
    s.target = 0;
    return s;
}

std::vector<double> per_second(const std::vector<double>& per_ms) {
    std::vector<double> r;
    for (double v : per_ms) r.push_back(v * 1e3);
    return r;
}

void label_resonance(std::vector<Peak>& peaks, double carrier, double omega_t, double bin) {
    const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
    const double t = std::abs(omega_t);
    struct Ref {
        const char* name;
        double w1, w3;
    };
    const Ref refs[] = {{"a", 0, 0},
                        {"b", 0, r2 * t},
                        {"b'", 0, -r2 * t},
                        {"c", (r6 - r2) * t, (r6 - r2) * t},
                        {"c'", -(r6 - r2) * t, -(r6 - r2) * t},
                        {"d", r2 * t, r2 * t},
                        {"d'", -r2 * t, -r2 * t},
                        {"f", (r6 + r2) * t, (r6 + r2) * t},
                        {"f'", -(r6 + r2) * t, -(r6 + r2) * t}};
    for (Peak& p : peaks) {
        double best = bin;
        for (const Ref& r : refs) {
            double e = std::max(std::abs(p.omega1 - carrier - r.w1), std::abs(p.omega3 - carrier - r.w3));
            if (e <= best) {
                best = e;
                p.label = r.name;
            }
        }
    }
}

void label_kerr(std::vector<Peak>& peaks, int n, double omega_si, double bin) {
    const int ridge = static_cast<int>(std::lround(-omega_si / bin));
    for (Peak& p : peaks) {
        int off = ((p.i3 - p.i1 + n / 2) % n + n) % n - n / 2;
        if (std::abs(off) <= 1)
            p.label = "diagonal";
        else if (std::abs(off - ridge) <= 1)
            p.label = "ridge";
    }
}

void finish_spectra(ScenarioResult& r, const RunConfig& cfg) {
    SignalGrid& g = *r.grid;
    if (cfg.phase_noise)
        for (Eigen::Index i = 0; i < g.values.rows(); ++i)
            for (Eigen::Index j = 0; j < g.values.cols(); ++j)
                g.values(i, j) *= 1.0 - contrast_loss(cfg.signature, g.t1[i], g.t3[j], cfg.noise_diffusion);
    FftOptions opts;
    opts.window = cfg.window_kind();
    opts.carrier_offset = r.carrier;
    opts.notch_carrier = cfg.notch_carrier;
    opts.zero_pad = 1;
    r.raw = fft2(g, opts);
    opts.zero_pad = cfg.zero_pad;
    r.display = fft2(g, opts);
    r.proj1 = project_1d(g, Axis::Omega1, opts);
    r.proj3 = project_1d(g, Axis::Omega3, opts);
    r.peaks = find_peaks(*r.raw, cfg.peak_threshold);

    std::ostringstream sp;
    sp << "freq1_hz,freq3_hz,magnitude\n";
    Eigen::MatrixXd mag = r.display->magnitude();
    for (Eigen::Index i = 0; i < mag.rows(); ++i)
        for (Eigen::Index j = 0; j < mag.cols(); ++j)
            sp << num(hz(r.display->omega1[i])) << "," << num(hz(r.display->omega3[j])) << ","
               << num(mag(i, j)) << "\n";
    r.csv.push_back({"spectrum.csv", sp.str()});
    auto proj = [&](const Spectrum1D& s) {
        std::ostringstream os;
        os << "freq_hz,magnitude\n";
        for (Eigen::Index i = 0; i < s.values.size(); ++i)
            os << num(hz(s.omega[i])) << "," << num(std::abs(s.values[i])) << "\n";
        return os.str();
    };
    r.csv.push_back({"projection_omega1.csv", proj(*r.proj1)});
    r.csv.push_back({"projection_omega3.csv", proj(*r.proj3)});
}

std::string peaks_csv(const std::vector<Peak>& peaks) {
    std::ostringstream os;
    os << "freq1_hz,freq3_hz,magnitude,i1,i3,label\n";
    for (const Peak& p : peaks)
        os << num(hz(p.omega1)) << "," << num(hz(p.omega3)) << "," << num(p.magnitude) << ","
           << p.i1 << "," << p.i3 << "," << p.label << "\n";
    return os.str();
}

void run_tables(ScenarioResult& r, const Crystal& c, const ModeTensors& t) {
    EffectiveParams p = effective_params(c, t);
    r.omega_zz = c.omega_x(c.modes.zigzag());
    r.omega_si = p.effective.omega_si;
    RwaReport rwa = rwa_report(c, t);
    r.derived["params"] = {{"third", kerr_json(p.third)},
                           {"fourth", kerr_json(p.fourth)},
                           {"effective", kerr_json(p.effective)}};
    r.derived["rwa_max_ratio"] = rwa.max_ratio;
    r.derived["rwa_worst_term"] = rwa.worst;
    r.csv.push_back({"params_shifts.csv", shifts_csv(p, c.trap.n_ions)});
    r.csv.push_back({"params_dephasing.csv", dephasing_csv(p, c.trap.n_ions)});
    r.csv.push_back({"modes.csv", modes_csv(c)});
    r.csv.push_back({"mode_tensors.csv", tensors_csv(t)});
    r.csv.push_back({"rwa.csv", rwa_csv(rwa)});
}

void run_kerr(ScenarioResult& r, const RunConfig& cfg, int threads) {
    Crystal c = build_crystal(cfg.trap());
    ModeTensors t = mode_tensors(c3_tensor(c.chain.u), c4_tensor(c.chain.u), c.modes.M);
    run_tables(r, c, t);
    EffectiveParams p = effective_params(c, t);
    KerrModel k = KerrModel::from(p.effective, c.trap.n_ions);
    r.carrier = -r.omega_zz;

    const int G = cfg.points();
    PulseSequence seq = sequence(cfg);
    ScanOptions so;
    so.threads = threads;
    std::vector<double> heat = per_second(cfg.heating_per_ms);
    if (cfg.fast_path) {
        if (heat[1] != 0 || heat[2] != 0)
            throw ConfigError("cli", "the diagonal fast path needs static spectators (no heating)");
        auto br = kerr_branches(k, cfg.truncation, cfg.initial_nbar, heat[0]);
        r.grid = scan_mixture(br, seq, cfg.dt, G, so);
    } else {
        FockRegister reg(cfg.truncation, {"zz", "y_zz", "egyptian"});
        LindbladModel m = kerr_dense_model(k, reg, heat);
        Propagator prop = build_propagator(m, cfg.dt);
        r.grid = scan(prop, reg, seq, thermal_product(cfg.truncation, cfg.initial_nbar), G, so);
    }
    bool dissipative = heat[0] != 0 || heat[1] != 0 || heat[2] != 0;
    r.derived["dissipation"] = dissipative ? "infinite-temperature heating" : "dissipation-free";
    r.derived["evolution_path"] = cfg.fast_path ? "diagonal spectator average" : "dense register";
    r.derived["kerr_model_hz"] = {{"omega_si", hz(k.omega_si)},
                                  {"delta", hz(k.delta)},
                                  {"chi_y", hz(k.chi_y)},
                                  {"chi_z", hz(k.chi_z)}};
    finish_spectra(r, cfg);
    label_kerr(r.peaks, static_cast<int>(r.raw->values.rows()), k.omega_si, r.raw->bin_width);
}

void run_resonance(ScenarioResult& r, const RunConfig& cfg, int threads) {
    Crystal c = build_crystal(cfg.trap());
    ModeTensors t = mode_tensors(c3_tensor(c.chain.u), c4_tensor(c.chain.u), c.modes.M);
    ResonantCoupling rc = resonant_coupling(c, t);
    r.omega_zz = c.omega_x(c.modes.zigzag());
    r.omega_t = rc.omega_t;
    r.carrier = -r.omega_zz;
    r.derived["omega_t_hz"] = hz(rc.omega_t);
    r.derived["detuning_hz"] = hz(rc.detuning);
    r.derived["fourth_order"] = kerr_json(effective_kerr(c, t));
    try {
        r.derived["third_order"] = kerr_json(perturbative_third_order(c, t));
    } catch (const NearResonanceError& e) {
        r.derived["third_order"] = std::string("not perturbative: ") + e.what();
    }

    FockRegister reg(cfg.truncation, {"zz", "stretch"});
    std::vector<double> heat = per_second(cfg.heating_per_ms);
    LindbladModel m = resonance_model(rc.omega_t, rc.detuning, reg, heat);
    r.derived["dissipation"] = m.dissipative() ? "infinite-temperature heating" : "dissipation-free";
    Propagator prop = build_propagator(m, cfg.dt);
    ScanOptions so;
    so.threads = threads;
    r.grid = scan(prop, reg, sequence(cfg), thermal_product(cfg.truncation, cfg.initial_nbar),
                  cfg.points(), so);
    finish_spectra(r, cfg);
    label_resonance(r.peaks, r.carrier, rc.omega_t, r.raw->bin_width);
}

void run_noise(ScenarioResult& r, const RunConfig& cfg, int threads) {
    const std::array<int, 3> rows[] = {{1, -1, -1}, {1, -2, -1}, {1, -1, -2}, {2, -2, 1}, {-1, -1, -1}};
    WienerPhaseModel model{cfg.noise_diffusion, cfg.seed};
    std::ostringstream os;
    os << "p2,p3,p4,loss_percent,loss_monte_carlo_percent\n";
    for (const auto& p : rows) {
        double a = contrast_loss(p, cfg.noise_t1, cfg.noise_t3, cfg.noise_diffusion);
        double mc = monte_carlo_loss(model, p, cfg.noise_t1, cfg.noise_t3, cfg.noise_paths, threads);
        os << p[0] << "," << p[1] << "," << p[2] << "," << num(100 * a) << "," << num(100 * mc) << "\n";
    }
    r.csv.push_back({"noise_table.csv", os.str()});
    r.derived["pulse_timing"] = "pulse 1 at 0, pulses 2-3 at t1, pulse 4 at t1+t3";
}

}  // namespace

KerrModel KerrModel::from(const KerrParams& p, int n_ions) {
    const int zz = n_ions - 1;
    return {p.omega_si, p.delta_zz, p.omega_d[1][zz], p.omega_d[2][zz]};
}

std::vector<MixtureBranch> kerr_branches(const KerrModel& k, const std::vector<int>& dims,
                                         const std::vector<double>& nbar, double heating_zz) {
    ThermalState ty = thermal_state(nbar[1], dims[1]);
    ThermalState tz = thermal_state(nbar[2], dims[2]);
    CMat rho0 = thermal_state(nbar[0], dims[0]).rho;
    FockRegister reg({dims[0]}, {"zz"});
    std::vector<MixtureBranch> out;
    for (int ny = 0; ny < dims[1]; ++ny)
        for (int nz = 0; nz < dims[2]; ++nz) {
            MixtureBranch b;
            b.weight = ty.rho(ny, ny).real() * tz.rho(nz, nz).real();
            b.model.reg = reg;
            b.model.H = CMat::Zero(dims[0], dims[0]);
            for (int n = 0; n < dims[0]; ++n)
                b.model.H(n, n) = 0.5 * k.omega_si * n * (n - 1) + (k.delta + k.chi_y * ny + k.chi_z * nz) * n;
            b.model.collapse = heating_dissipator(0, heating_zz, reg);
            b.rho0 = rho0;
            out.push_back(std::move(b));
        }
    return out;
}

LindbladModel kerr_dense_model(const KerrModel& k, const FockRegister& reg,
                               const std::vector<double>& heating) {
    LindbladModel m;
    m.reg = reg;
    const int d = reg.total();
    m.H = CMat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        int nz = i % reg.dims[2];
        int ny = (i / reg.dims[2]) % reg.dims[1];
        int n = i / (reg.dims[2] * reg.dims[1]);
        m.H(i, i) = 0.5 * k.omega_si * n * (n - 1) + (k.delta + k.chi_y * ny + k.chi_z * nz) * n;
    }
    for (int s = 0; s < reg.modes(); ++s)
        for (auto& c : heating_dissipator(s, heating.at(s), reg)) m.collapse.push_back(std::move(c));
    return m;
}

LindbladModel resonance_model(double omega_t, double detuning, const FockRegister& reg,
                              const std::vector<double>& heating) {
    LindbladModel m;
    m.reg = reg;
    CMat a = embed(mode_operators(reg.dims[0]).a, 0, reg);
    ModeOperators cs = mode_operators(reg.dims[1]);
    CMat c = embed(cs.a, 1, reg);
    CMat n = embed(cs.n, 1, reg);
    CMat term = c.adjoint() * a * a;
    m.H = omega_t * (term + term.adjoint()) - detuning * n;
    for (int s = 0; s < reg.modes(); ++s)
        for (auto& op : heating_dissipator(s, heating.at(s), reg)) m.collapse.push_back(std::move(op));
    return m;
}

CMat thermal_product(const std::vector<int>& dims, const std::vector<double>& nbar) {
    std::vector<CMat> f;
    for (std::size_t i = 0; i < dims.size(); ++i) f.push_back(thermal_state(nbar[i], dims[i]).rho);
    return product_state(f);
}

std::string shifts_csv(const EffectiveParams& p, int n_ions) { return table_csv(p, n_ions, false); }
std::string dephasing_csv(const EffectiveParams& p, int n_ions) { return table_csv(p, n_ions, true); }

ScenarioResult run_scenario(const RunConfig& cfg, int threads) {
    validate(cfg);
    ScenarioResult r;
    r.config = cfg;
    r.derived = json::object();
    if (cfg.scenario == "tables") {
        Crystal c = build_crystal(cfg.trap());
        ModeTensors t = mode_tensors(c3_tensor(c.chain.u), c4_tensor(c.chain.u), c.modes.M);
        r.derived["crystal"] = crystal_json(c);
        run_tables(r, c, t);
    } else if (cfg.scenario == "kerr") {
        r.derived["crystal"] = crystal_json(build_crystal(cfg.trap()));
        run_kerr(r, cfg, threads);
    } else if (cfg.scenario == "resonance") {
        r.derived["crystal"] = crystal_json(build_crystal(cfg.trap()));
        run_resonance(r, cfg, threads);
    } else if (cfg.scenario == "noise-table") {
        run_noise(r, cfg, threads);
    } else {
        throw ConfigError("cli", "unknown scenario '" + cfg.scenario + "'");
    }
    if (r.grid) {
        r.derived["grid_points"] = r.grid->values.rows();
        r.derived["bin_width_hz"] = hz(r.raw->bin_width);
        r.derived["carrier_hz"] = hz(r.carrier);
        r.csv.push_back({"peaks.csv", peaks_csv(r.peaks)});
    }
    return r;
}

std::vector<std::string> write_artifacts(const ScenarioResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> files;
    for (const auto& [name, content] : r.csv) {
        std::ofstream os(fs::path(dir) / name, std::ios::binary);
        if (!os) throw Error("cli", "cannot write " + name);
        os << content;
        files.push_back(name);
    }
    if (r.grid) {
        write_matrix((fs::path(dir) / "signal.bin").string(), r.grid->values);
        write_matrix((fs::path(dir) / "spectrum.bin").string(), r.display->values);
        files.push_back("signal.bin");
        files.push_back("spectrum.bin");
    }
    return files;
}

std::string sha256_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cli", "cannot read " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char b[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

}  // namespace ionspec
