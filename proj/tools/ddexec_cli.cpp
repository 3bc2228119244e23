// ddexec: optimal execution scenarios from the command line.
//
//   ddexec run <config|preset> [--out DIR] [--seed N] [--paths N] [--no-plot]
//   ddexec validate <config>
//   ddexec presets
//
// Exit codes: 0 ok, 1 usage, 2 config error, 3 numerical error, 4 IO error.
// DDEXEC_THREADS overrides the Monte Carlo worker count.

#include "ddexec/ddexec.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

void print_summary(const ddexec::ScenarioResult& result, const ddexec::OutputFiles& files) {
    const auto& setup = result.comparison.setup;
    std::cout << "scenario " << result.comparison.scenario_id << " seed " << result.comparison.seed << '\n';
    std::cout << "  lambda_tilde " << setup.lambda_tilde << "  lambda_check " << setup.lambda_check
              << "  lambda_sae " << setup.risk.lambda_sae << '\n';
    for (const auto& s : result.summaries) {
        std::cout << "  " << ddexec::to_string(s.combination) << ": objective " << s.objective << ", min holdings "
                  << s.min_holdings << ", max |x - vwap|/X " << s.max_vwap_deviation;
        if (s.mc_objective)
            std::cout << ", MC objective " << s.mc_objective->mean << " +/- " << s.mc_objective->std_error;
        std::cout << '\n';
    }
    std::cout << "wrote " << files.trajectories.string() << ", " << files.summary.string();
    if (files.plot) std::cout << ", " << files.plot->string();
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal trade execution under displaced-diffusion dynamics"};
    app.require_subcommand(1);

    std::string run_target;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    bool no_plot = false;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario file or preset (fig1..fig4)");
    run_cmd->add_option("config", run_target, "Config file or preset name")->required();
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--seed", seed, "Seed of the common Brownian path");
    run_cmd->add_option("--paths", paths, "Monte Carlo paths for summary statistics (0 disables)");
    run_cmd->add_flag("--no-plot", no_plot, "Skip the SVG plot");

    std::string validate_target;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config file");
    validate_cmd->add_option("config", validate_target, "Config file")->required();

    auto* presets_cmd = app.add_subcommand("presets", "List built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (presets_cmd->parsed()) {
            for (const auto& p : ddexec::all_presets()) std::cout << "[" << p.name << "]\n" << ddexec::write_config(p) << '\n';
            return kOk;
        }
        if (validate_cmd->parsed()) {
            const auto cfg = ddexec::load_config(validate_target);
            std::cout << validate_target << ": ok (" << cfg.combinations.size() << " combinations)\n";
            return kOk;
        }

        auto cfg = ddexec::load_config_or_preset(run_target);
        if (out_dir) cfg.output_dir = *out_dir;
        if (seed) cfg.seed = *seed;
        if (paths) cfg.mc_paths = *paths;
        if (no_plot) cfg.plot = false;
        ddexec::validate(cfg);

        const auto result = ddexec::run_scenario(cfg);
        const auto files = ddexec::emit_outputs(result, cfg);
        print_summary(result, files);
        return kOk;
    } catch (const ddexec::ConfigError& e) {
        std::cerr << "ddexec: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ddexec::IoError& e) {
        std::cerr << "ddexec: io error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "ddexec: numerical error: " << e.what() << '\n';
        return kNumerical;
    }
}
