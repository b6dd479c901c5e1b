#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "acqroc/analytic.hpp"
#include "acqroc/simulator.hpp"

namespace acqroc::harness {

/// Malformed or invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thresholds either listed explicitly or spaced so that the cell false
/// alarm probability exp(-beta) is log-uniform on [min_pfa, max_pfa].
struct BetaGridSpec {
    double min_pfa = 1e-9;
    double max_pfa = 0.5;
    int points = 60;
    std::vector<double> explicit_betas;

    /// Increasing thresholds.
    std::vector<double> betas() const;
};

/// One experiment recipe.
///
/// JSON schema (all keys optional except cn0_dbhz and tper_ms; unknown keys
/// are rejected):
///
///     cn0_dbhz       number            carrier-to-noise density, dB-Hz
///     tper_ms        number            coherent integration period, ms
///     fdmax_hz       number            maximum Doppler (default 5000)
///     bin_widths_hz  number[]          default [200, 500, 700, 1000]
///     m              integer           acceptance half-width for all widths (default 0)
///     m_by_width     {"<width>": int}  per-width override of m
///     beta_grid      {min_pfa, max_pfa, points} or number[] of thresholds
///     trials         integer           Monte Carlo trials (default 100000)
///     seed           integer           master seed (default 20120901)
///     fidelity       "metric" | "waveform"
///     order          "code-first" | "doppler-first"
///     lmax           integer           signal-bin truncation (default 2)
struct ExperimentConfig {
    analytic::SignalParams params;
    double f_dmax_hz = 5000.0;
    std::vector<double> bin_widths_hz = {200.0, 500.0, 700.0, 1000.0};
    int m = 0;
    std::map<double, int> m_by_width;
    BetaGridSpec beta_grid;
    long trials = 100'000;
    std::uint64_t seed = 20120901;
    sim::Fidelity fidelity = sim::Fidelity::MetricLevel;
    analytic::SearchOrder order = analytic::SearchOrder::CodePhaseFirst;
    int l_max = 2;

    int accept_half_width(double width_hz) const;
    analytic::DopplerGrid grid(double width_hz) const;
    sim::SimConfig sim_config(double width_hz) const;

    /// Throws ConfigError naming the violated invariant.
    void validate() const;
};

/// Parses and validates a configuration document. `source` names the
/// document in diagnostics.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

sim::Fidelity parse_fidelity(const std::string& text);
analytic::SearchOrder parse_order(const std::string& text);

}  // namespace acqroc::harness
