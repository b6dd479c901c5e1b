#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "acqroc/analytic.hpp"
#include "acqroc/prncode.hpp"

namespace acqroc::sim {

using analytic::DopplerGrid;
using analytic::SearchOrder;
using analytic::SearchPolicy;
using analytic::SignalParams;

/// Engine driving every random draw. Each trial owns an engine seeded from
/// (master seed, run stream, trial index), so results do not depend on how
/// trials are distributed over threads.
using Rng = std::mt19937_64;

/// Independent substream for one trial of one run.
Rng trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

enum class Fidelity { MetricLevel, Waveform };

/// Sampling and code setup for the waveform-level chain.
///
/// Complex-baseband mode (f_if == 0) samples at the chip rate, so one code
/// period holds exactly N = 1023 samples. Real-IF mode (f_if > 0) samples a
/// real signal at f_s and averages groups of f_s / 1.023 MHz samples down to
/// the chip rate before correlating.
struct WaveformConfig {
    double f_s = 1.023e6;
    double f_if = 0.0;
    int prn_signal = 1;
    /// Replica for detection runs.
    int prn_search = 1;
    /// Replica for false-alarm runs; must differ from prn_signal.
    int prn_false_alarm = 5;
    bool noise_enabled = true;
    /// Leave the signal out of bins further than l_max from the correct bin.
    bool confine_signal = true;

    /// Throws std::invalid_argument unless the samples per period map onto
    /// whole code chips (N = 1023 at baseband, a multiple of 1023 at IF).
    void validate(double t_per) const;
    int samples_per_period(double t_per) const;
    int decimation(double t_per) const;

    /// Real-IF validation mode: 4.092 MHz sampling, IF at f_s / 4.
    static WaveformConfig real_if();
};

struct SimConfig {
    long trials = 100'000;
    std::uint64_t seed = 1;
    Fidelity fidelity = Fidelity::MetricLevel;
    SignalParams params;
    DopplerGrid grid{500.0, 5000.0, 1e-3};
    SearchPolicy policy;
    int l_max = 2;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

enum class Outcome { Detection, FalseStop, NoStop };

struct TrialOutcome {
    bool stopped = false;
    std::optional<int> stop_bin;
    std::optional<int> stop_phase;
    int correct_bin = 0;
    int correct_phase = 0;
    Outcome classified = Outcome::NoStop;
};

/// |X|^2 for a cell of non-centrality L: the mean has magnitude sqrt(L/2)
/// and a uniform phase, the noise is complex Gaussian with variance 1/2 per
/// component. 2|X|^2 is then chi-square with 2 dof and non-centrality L.
double draw_metric(double l_param, Rng& rng);

/// Running maxima of the visit-ordered metric sequence. For any threshold
/// beta the serial search stops at the first record whose value exceeds
/// beta, so the records fix the outcome for every threshold at once.
struct SearchTrace {
    struct Record {
        std::uint32_t visit;
        double value;
    };

    int num_bins = 0;
    int num_phases = 0;
    SearchOrder order = SearchOrder::CodePhaseFirst;
    int correct_bin = 0;
    int correct_phase = 0;
    std::vector<Record> records;
    std::uint32_t visited = 0;

    /// Incorporates the next visited cell's metric.
    void push(double value);
    /// Outcome of the search at threshold beta with acceptance half-width m.
    /// When signal_present is false every stop is a (false-alarm) FalseStop.
    TrialOutcome outcome(double beta, int m, bool signal_present = true) const;
    /// Record at which the search stops for beta, or nullptr.
    const Record* stop_record(double beta) const;
};

/// Metric-level trial: correct phase, bin and residual Doppler are drawn
/// uniformly; cells at the correct phase within l_max bins get the realized
/// L_max sinc^2((s W + delta) T); everything else is noise.
SearchTrace metric_trial_trace(const SimConfig& config, bool signal_present, Rng& rng);
TrialOutcome run_metric_trial(const SimConfig& config, Rng& rng);

/// One Doppler bin of the waveform chain: synthesize a fresh code period,
/// downconvert with the bin center, despread at every code phase, average,
/// and square. residual_hz is bin center minus true Doppler.
struct BinScenario {
    int correct_phase = 0;
    double residual_hz = 0.0;
    double carrier_phase = 0.0;
    /// Bin center; only the real-IF path depends on it (double-frequency term).
    double bin_center_hz = 0.0;
    bool with_signal = true;
};

std::vector<double> waveform_bin_metrics(const WaveformConfig& waveform,
                                         const SignalParams& params, const BinScenario& scenario,
                                         const prn::CaCode& signal_code,
                                         const prn::CaCode& search_code, Rng& rng);

/// Waveform-level trial. Detection runs despread with prn_search, false-alarm
/// runs with prn_false_alarm (the PRN 1 signal is still transmitted).
SearchTrace waveform_trial_trace(const SimConfig& config, const WaveformConfig& waveform,
                                 bool signal_present, Rng& rng);
TrialOutcome run_waveform_trial(const SimConfig& config, const WaveformConfig& waveform,
                                Rng& rng);

/// Despreading kernel: out[m] = |(1/N) sum_n r[n] code[(n - m) mod N]|^2.
void correlate_all_phases(std::span<const std::complex<double>> samples,
                          std::span<const std::int8_t> code, std::span<double> out);
void correlate_all_phases_serial(std::span<const std::complex<double>> samples,
                                 std::span<const std::int8_t> code, std::span<double> out);

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval; z = 1.959964 gives 95 %.
Interval wilson_interval(long successes, long trials, double z = 1.959963984540054);

/// Aggregated counts of one Monte Carlo sweep.
struct SweepResult {
    std::vector<double> betas;
    std::vector<int> m_values;
    long trials = 0;
    int num_bins = 0;
    /// detections[b][i]: detection-run trials that stopped at an accepted
    /// cell for betas[b] and m_values[i].
    std::vector<std::vector<long>> detections;
    /// False-alarm-run trials that stopped anywhere, per beta.
    std::vector<long> false_alarms;
    /// Detection-run stops at the correct phase by signed bin offset
    /// (index offset + num_bins - 1), per beta.
    std::vector<std::vector<long>> stop_offsets;
    std::vector<long> wrong_phase_stops;
    std::vector<long> no_stops;

    bool operator==(const SweepResult&) const = default;
};

/// Runs `trials` detection trials and `trials` false-alarm trials and
/// evaluates every threshold and acceptance half-width on the recorded
/// traces. threads <= 0 uses the OpenMP default.
SweepResult monte_carlo_sweep(const SimConfig& config, const WaveformConfig& waveform,
                              std::span<const double> betas, std::span<const int> m_values,
                              int threads = 0);
/// Single-threaded reference with identical results.
SweepResult monte_carlo_sweep_serial(const SimConfig& config, const WaveformConfig& waveform,
                                     std::span<const double> betas,
                                     std::span<const int> m_values);

struct MonteCarloResult {
    double p_det_hat = 0.0;
    double p_fa_hat = 0.0;
    Interval det_ci;
    Interval fa_ci;
    long trials = 0;
    long detections = 0;
    long false_alarms = 0;
    /// Stops at the correct phase per signed bin offset, index offset + K - 1.
    std::vector<long> stop_offsets;
};

/// Cell-level Monte Carlo for a fixed non-centrality: number of draw_metric
/// samples out of `draws` that exceed each threshold.
std::vector<long> metric_exceedance_counts(double l_param, std::span<const double> betas,
                                           long draws, std::uint64_t seed, std::uint64_t stream,
                                           int threads = 0);

/// Cell-level Monte Carlo for the offset-l bin: each draw takes a residual
/// Doppler uniform on [(2l-1) W/2, (2l+1) W/2] and the realized
/// L = L_max sinc^2(df T) before drawing the metric.
std::vector<long> cell_exceedance_counts(const SignalParams& params, const DopplerGrid& grid,
                                         int l, std::span<const double> betas, long draws,
                                         std::uint64_t seed, std::uint64_t stream,
                                         int threads = 0);

/// Waveform-level counterpart of cell_exceedance_counts: each draw
/// synthesizes one bin with a residual in the offset-l range and reads the
/// correct-phase metric.
std::vector<long> waveform_cell_exceedance_counts(const SignalParams& params,
                                                  const DopplerGrid& grid,
                                                  const WaveformConfig& waveform, int l,
                                                  std::span<const double> betas, long draws,
                                                  std::uint64_t seed, std::uint64_t stream,
                                                  int threads = 0);

/// Monte Carlo estimate at the configured threshold and acceptance width.
MonteCarloResult monte_carlo(const SimConfig& config, const WaveformConfig& waveform = {},
                             int threads = 0);

}  // namespace acqroc::sim
