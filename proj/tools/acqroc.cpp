// acqroc: acquisition ROC analysis, Monte Carlo, and cross-checks.
//
// Precedence: command-line flags override the config file, which overrides
// built-in defaults.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "acqroc/commands.hpp"
#include "acqroc/config.hpp"

using namespace acqroc::harness;

int main(int argc, char** argv)
{
    CLI::App app{"GNSS acquisition detection/false-alarm analysis over Doppler bin width"};
    app.set_version_flag("--version", "acqroc 1.0.0");

    std::string command;
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> svg;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<std::string> fidelity;
    std::optional<std::string> order;
    int threads = 0;
    bool mc = false;

    app.add_option("command", command, "cell-probs | roc | simulate | validate")
        ->required()
        ->check(CLI::IsMember({"cell-probs", "roc", "simulate", "validate"}));
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--out", out, "output file (default: stdout)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--fidelity", fidelity, "metric | waveform")
        ->check(CLI::IsMember({"metric", "waveform"}));
    app.add_option("--order", order, "code-first | doppler-first")
        ->check(CLI::IsMember({"code-first", "doppler-first"}));
    app.add_option("--threads", threads, "worker threads (0: OpenMP default)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--mc", mc, "attach Monte Carlo columns to cell-probs / roc");
    app.add_option("--svg", svg, "also write a line chart");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
        if (seed)
            cfg.seed = *seed;
        if (trials)
            cfg.trials = *trials;
        if (fidelity)
            cfg.fidelity = parse_fidelity(*fidelity);
        if (order)
            cfg.order = parse_order(*order);
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    RunOptions opts;
    opts.out = out;
    opts.svg = svg;
    opts.with_mc = mc;
    opts.threads = threads;
    try {
        return run_command(command, cfg, opts, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidationFailure;
    }
}
