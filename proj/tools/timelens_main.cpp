// timelens CLI: config-driven runs of the bandwidth-manipulation simulator,
// plus the calibration and loss-budget calculators.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "timelens/presets.hpp"
#include "timelens/timelens.hpp"

namespace {

int run_command(const std::string& config, const timelens::RunOptions& options) {
    timelens::verify_sign_convention();
    timelens::Scenario scenario;
    if (const char* text = timelens::find_preset(config)) {
        scenario = timelens::parse_scenario_text(text, config);
    } else {
        scenario = timelens::parse_scenario(config);
    }
    const timelens::RunReport report = timelens::run(scenario, options);
    std::cout << timelens::format_report(report);
    return 0;
}

int presets_list() {
    for (const timelens::PresetDef& p : timelens::presets()) std::cout << p.name << "\n";
    return 0;
}

int presets_show(const std::string& name) {
    const char* text = timelens::find_preset(name);
    if (!text) throw timelens::ConfigError("no preset named '" + name + "'");
    std::cout << text;
    return 0;
}

int calibrate_shear(double dlambda_nm, double lambda0_nm, double frf_ghz,
                    const std::string& catalog_path) {
    using namespace timelens;
    const double a =
        modulation_depth_from_shift(dlambda_nm, Wavelength{lambda0_nm}, frf_ghz * 1e-3);
    const double k = chirp_factor(frf_ghz * 1e-3, a);
    const double phi = collimation_gdd(k);
    double beta2 = kDefaultBeta2Ps2PerKm;
    if (!catalog_path.empty())
        beta2 = ComponentCatalog::load(catalog_path).get("fiber.hi780.beta2_ps2_per_km");
    std::printf("modulation depth A      %.4f rad\n", a);
    std::printf("chirp rate K            %.6f ps^-2\n", k);
    std::printf("collimation GDD         %.4f ps^2\n", phi);
    std::printf("fiber length (beta2 %.1f ps^2/km)  %.1f m\n", beta2,
                fiber_length_for_gdd(phi, beta2));
    return 0;
}

int budget_command(const std::string& catalog_path, const std::string& chain_path) {
    using namespace timelens;
    const ComponentCatalog catalog = ComponentCatalog::load(catalog_path);
    const LossBudget budget = parse_budget(chain_path, catalog);
    const double fiber_db = budget.fiber_length_m / 1000.0 * budget.fiber_loss_db_per_km;
    const double conn_db = budget.connector_interfaces * budget.connector_loss_db;
    std::printf("fiber       %.1f m at %.2f dB/km -> %.4f dB (x%.4f)\n", budget.fiber_length_m,
                budget.fiber_loss_db_per_km, fiber_db, std::pow(10.0, -fiber_db / 10.0));
    for (const auto& [label, t] : budget.device_transmissions)
        std::printf("device      %-24s x%.4f\n", label.c_str(), t);
    std::printf("connectors  %d at %.2f dB -> %.4f dB (x%.4f)\n", budget.connector_interfaces,
                budget.connector_loss_db, conn_db, std::pow(10.0, -conn_db / 10.0));
    std::printf("total transmission  %.4f\n", total_transmission(budget));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-lens bandwidth manipulation simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_points;
    bool plot = false;
    app.add_option("--out-dir", out_dir, "directory for CSV/report artifacts");
    app.add_option("--seed", seed, "override jitter and measurement seeds");
    app.add_option("--grid-points", grid_points, "override grid sample count (power of two)");
    app.add_flag("--plot", plot, "write an SVG overlay of the spectra");

    auto* run_cmd = app.add_subcommand("run", "run a scenario file or preset");
    std::string config;
    bool ideal_lens = false, no_jitter = false;
    run_cmd->add_option("config", config, "scenario file path or preset name")->required();
    run_cmd->add_flag("--ideal-lens", ideal_lens,
                      "replace sinusoidal lenses by their quadratic chirp rate");
    run_cmd->add_flag("--no-jitter", no_jitter, "skip the Monte Carlo channel");

    auto* presets_cmd = app.add_subcommand("presets", "list or show shipped presets");
    auto* list_cmd = presets_cmd->add_subcommand("list", "list preset names");
    auto* show_cmd = presets_cmd->add_subcommand("show", "print a preset scenario file");
    std::string preset_name;
    show_cmd->add_option("name", preset_name, "preset name")->required();
    presets_cmd->require_subcommand(1);

    auto* calibrate_cmd = app.add_subcommand("calibrate", "hardware calibration helpers");
    auto* shear_cmd = calibrate_cmd->add_subcommand(
        "shear", "modulation depth from a measured spectral shear");
    double dlambda = 0.0, lambda0 = 830.0, frf = 10.0;
    std::string catalog_path;
    shear_cmd->add_option("--dlambda", dlambda, "measured wavelength shift (nm)")->required();
    shear_cmd->add_option("--lambda0", lambda0, "center wavelength (nm)")->required();
    shear_cmd->add_option("--frf", frf, "drive frequency (GHz)")->required();
    shear_cmd->add_option("--catalog", catalog_path, "component catalog for the fiber lookup");
    calibrate_cmd->require_subcommand(1);

    auto* budget_cmd = app.add_subcommand("budget", "transmission budget from a catalog");
    std::string budget_catalog, budget_chain;
    budget_cmd->add_option("catalog", budget_catalog, "component catalog file")->required();
    budget_cmd->add_option("chain", budget_chain, "budget chain JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run_cmd) {
            timelens::RunOptions options;
            options.out_dir = out_dir;
            options.seed = seed;
            options.grid_points = grid_points;
            options.plot = plot;
            options.ideal_lens = ideal_lens;
            options.no_jitter = no_jitter;
            return run_command(config, options);
        }
        if (*list_cmd) return presets_list();
        if (*show_cmd) return presets_show(preset_name);
        if (*shear_cmd) return calibrate_shear(dlambda, lambda0, frf, catalog_path);
        if (*budget_cmd) return budget_command(budget_catalog, budget_chain);
    } catch (const timelens::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const timelens::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const timelens::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
