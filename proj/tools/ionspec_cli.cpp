// Scenario runner: ion crystal 2D spectra, parameter tables and phase-noise table.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionspec/diagnostics.hpp"
#include "ionspec/scenario.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Two-dimensional spectroscopy of ion Coulomb crystals"};
    std::string config_path, scenario, out_dir;
    double grid_scale = 0;
    int threads = 1;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--scenario", scenario, "kerr | resonance | tables | noise-table")
        ->check(CLI::IsMember({"kerr", "resonance", "tables", "noise-table"}));
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--grid-scale", grid_scale, "scales t_max and the grid size; dt is kept")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    CLI11_PARSE(app, argc, argv);

    const auto start = std::chrono::steady_clock::now();
    json manifest = {{"tool", "ionspec"}, {"version", IONSPEC_VERSION}, {"status", "failed"}};
    std::string dir = out_dir.empty() ? "out" : out_dir;
    int code = 0;

    try {
        json doc = json::object();
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            try {
                doc = json::parse(is);
            } catch (const json::exception& e) {
                throw ionspec::ConfigError("cli", std::string("cannot parse config: ") + e.what());
            }
        }
        if (!scenario.empty() && doc.contains("scenario") && doc["scenario"] != scenario)
            throw ionspec::ConfigError("cli", "--scenario conflicts with the config file");
        ionspec::RunConfig cfg = ionspec::config_from_json(doc, scenario);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (grid_scale > 0) cfg.grid_scale = grid_scale;
        if (*seed_opt) cfg.seed = seed;
        ionspec::validate(cfg);
        dir = cfg.output_dir;
        manifest["config"] = ionspec::config_to_json(cfg);

        ionspec::ScenarioResult r = ionspec::run_scenario(cfg, threads);
        manifest["derived"] = r.derived;
        json sums = json::object();
        for (const auto& f : ionspec::write_artifacts(r, dir))
            sums[f] = ionspec::sha256_file((fs::path(dir) / f).string());
        manifest["outputs"] = sums;
        manifest["status"] = "ok";
    } catch (const ionspec::Error& e) {
        manifest["error"] = {{"module", e.module()}, {"message", e.what()}};
        std::cerr << "error: " << e.what() << "\n";
        code = dynamic_cast<const ionspec::ConfigError*>(&e) ? 2 : 1;
    } catch (const std::exception& e) {
        manifest["error"] = {{"module", "unknown"}, {"message", e.what()}};
        std::cerr << "error: " << e.what() << "\n";
        code = 1;
    }

    json warnings = json::array();
    for (const auto& w : ionspec::drain_warnings())
        warnings.push_back({{"module", w.module}, {"message", w.message}});
    manifest["warnings"] = warnings;
    manifest["threads"] = threads;
    manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        fs::create_directories(dir);
        std::ofstream(fs::path(dir) / "manifest.json") << manifest.dump(2) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: cannot write manifest: " << e.what() << "\n";
        return code ? code : 1;
    }
    if (code == 0) std::cout << "wrote " << (fs::path(dir) / "manifest.json").string() << "\n";
    return code;
}
