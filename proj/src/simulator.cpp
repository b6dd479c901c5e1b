#include "acqroc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace acqroc::sim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kChipRate = 1.023e6;

// Samplers are created once per trial so that the normal distribution's
// cached second variate stays within one trial's stream.
class MetricSampler {
public:
    double signal(double l_param, Rng& rng)
    {
        const double amplitude = std::sqrt(0.5 * l_param);
        const double phase = phase_(rng);
        const double re = amplitude * std::cos(phase) + noise_(rng);
        const double im = amplitude * std::sin(phase) + noise_(rng);
        return re * re + im * im;
    }

    // |n|^2 with unit total variance is Exp(1).
    double noise(Rng& rng) { return exponential_(rng); }

    // Appends `count` noise cells to the trace, sampling only their records.
    // Above the running maximum v each draw is a new record with probability
    // exp(-v), the wait is geometric and the overshoot is again Exp(1).
    void noise_run(SearchTrace& trace, std::uint32_t count, Rng& rng)
    {
        const std::uint32_t end = trace.visited + count;
        if (count > 0 && trace.records.empty())
            trace.push(noise(rng));
        while (trace.visited < end) {
            const double v = trace.records.back().value;
            const double log_q = std::log1p(-std::exp(-v));
            const double u = 1.0 - unit_(rng);  // (0, 1]
            const double wait = log_q < 0.0 ? std::floor(std::log(u) / log_q) : HUGE_VAL;
            if (wait >= static_cast<double>(end - trace.visited)) {
                trace.visited = end;
                break;
            }
            trace.visited += static_cast<std::uint32_t>(wait);
            trace.push(v + noise(rng));
        }
    }

private:
    std::uniform_real_distribution<double> phase_{0.0, kTwoPi};
    std::normal_distribution<double> noise_{0.0, std::numbers::sqrt2 / 2.0};
    std::exponential_distribution<double> exponential_{1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct Placement {
    int bin;
    int phase;
    double delta_hz;  // correct-bin center minus true Doppler
};

Placement draw_placement(int num_bins, int num_phases, double bin_width, Rng& rng)
{
    Placement p;
    p.phase = std::uniform_int_distribution<int>(0, num_phases - 1)(rng);
    p.bin = std::uniform_int_distribution<int>(0, num_bins - 1)(rng);
    p.delta_hz = std::uniform_real_distribution<double>(-0.5 * bin_width, 0.5 * bin_width)(rng);
    return p;
}

template <class CellValue>
void walk(SearchTrace& trace, CellValue&& value)
{
    const int k = trace.num_bins;
    const int n = trace.num_phases;
    if (trace.order == SearchOrder::CodePhaseFirst) {
        for (int b = 0; b < k; ++b)
            for (int p = 0; p < n; ++p)
                trace.push(value(b, p));
    } else {
        for (int p = 0; p < n; ++p)
            for (int b = 0; b < k; ++b)
                trace.push(value(b, p));
    }
}

}  // namespace

Rng trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial)
{
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(trial), hi(trial)};
    return Rng(seq);
}

void WaveformConfig::validate(double t_per) const
{
    if (!(f_s > 0.0))
        throw std::invalid_argument("sampling frequency must be positive");
    if (!(f_if >= 0.0) || f_if >= 0.5 * f_s)
        throw std::invalid_argument("IF must lie in [0, f_s/2)");
    for (int prn : {prn_signal, prn_search, prn_false_alarm})
        if (prn < 1 || prn > prn::kNumPrns)
            throw std::invalid_argument("PRN outside [1, 32]");
    if (prn_false_alarm == prn_signal)
        throw std::invalid_argument("false-alarm replica must differ from the signal PRN");
    const int n = samples_per_period(t_per);
    if (f_if == 0.0) {
        if (n != prn::kCodeLength)
            throw std::invalid_argument(
                "averaging correlation at baseband needs N = 1023 samples per period, got " +
                std::to_string(n));
    } else if (n % prn::kCodeLength != 0) {
        throw std::invalid_argument("samples per period (" + std::to_string(n) +
                                    ") is not a whole number of chips");
    }
}

int WaveformConfig::samples_per_period(double t_per) const
{
    return static_cast<int>(std::lround(t_per * f_s));
}

int WaveformConfig::decimation(double t_per) const
{
    return samples_per_period(t_per) / prn::kCodeLength;
}

WaveformConfig WaveformConfig::real_if()
{
    WaveformConfig w;
    w.f_s = 4.0 * kChipRate;
    w.f_if = kChipRate;
    return w;
}

void SimConfig::validate() const
{
    if (trials < 1)
        throw std::invalid_argument("trials must be at least 1");
    params.validate();
    if (std::abs(grid.t_per() - params.t_per) > 1e-12 * params.t_per)
        throw std::invalid_argument("Doppler grid and signal use different T_per");
    policy.validate(grid.num_bins());
    if (l_max < 0 || l_max > 50)
        throw std::invalid_argument("l_max must lie in [0, 50]");
}

double draw_metric(double l_param, Rng& rng)
{
    if (!(l_param >= 0.0))
        throw std::invalid_argument("non-centrality must be non-negative");
    MetricSampler sampler;
    return sampler.signal(l_param, rng);
}

void SearchTrace::push(double value)
{
    if (records.empty() || value > records.back().value)
        records.push_back({visited, value});
    ++visited;
}

const SearchTrace::Record* SearchTrace::stop_record(double beta) const
{
    // Record values increase strictly, so the first crossing is a bisection.
    const auto it = std::upper_bound(records.begin(), records.end(), beta,
                                     [](double b, const Record& r) { return b < r.value; });
    return it == records.end() ? nullptr : &*it;
}

TrialOutcome SearchTrace::outcome(double beta, int m, bool signal_present) const
{
    TrialOutcome out;
    out.correct_bin = correct_bin;
    out.correct_phase = correct_phase;
    const Record* rec = stop_record(beta);
    if (rec == nullptr) {
        out.classified = Outcome::NoStop;
        return out;
    }
    int bin;
    int phase;
    if (order == SearchOrder::CodePhaseFirst) {
        bin = static_cast<int>(rec->visit / static_cast<std::uint32_t>(num_phases));
        phase = static_cast<int>(rec->visit % static_cast<std::uint32_t>(num_phases));
    } else {
        phase = static_cast<int>(rec->visit / static_cast<std::uint32_t>(num_bins));
        bin = static_cast<int>(rec->visit % static_cast<std::uint32_t>(num_bins));
    }
    out.stopped = true;
    out.stop_bin = bin;
    out.stop_phase = phase;
    const bool accepted =
        signal_present && phase == correct_phase && std::abs(bin - correct_bin) <= m;
    out.classified = accepted ? Outcome::Detection : Outcome::FalseStop;
    return out;
}

SearchTrace metric_trial_trace(const SimConfig& config, bool signal_present, Rng& rng)
{
    const int k = config.grid.num_bins();
    const int n = prn::kCodeLength;
    const double w = config.grid.bin_width_hz();
    const double t = config.params.t_per;
    const double l_peak = analytic::l_max_param(config.params);
    const int l_max = config.l_max;

    const Placement place = draw_placement(k, n, w, rng);
    std::vector<double> l_by_offset(2 * static_cast<std::size_t>(l_max) + 1, 0.0);
    if (signal_present) {
        for (int s = -l_max; s <= l_max; ++s) {
            const double g = numerics::sinc((s * w + place.delta_hz) * t);
            l_by_offset[static_cast<std::size_t>(s + l_max)] = l_peak * g * g;
        }
    }

    SearchTrace trace;
    trace.num_bins = k;
    trace.num_phases = n;
    trace.order = config.policy.order;
    trace.correct_bin = place.bin;
    trace.correct_phase = place.phase;

    // Signal cells in visit order; both orders visit them by increasing bin.
    const auto visit_of = [&](int b) -> std::uint32_t {
        return config.policy.order == SearchOrder::CodePhaseFirst
                   ? static_cast<std::uint32_t>(b * n + place.phase)
                   : static_cast<std::uint32_t>(place.phase * k + b);
    };
    MetricSampler sampler;
    if (signal_present) {
        for (int b = std::max(0, place.bin - l_max); b <= std::min(k - 1, place.bin + l_max); ++b) {
            sampler.noise_run(trace, visit_of(b) - trace.visited, rng);
            trace.push(sampler.signal(l_by_offset[static_cast<std::size_t>(b - place.bin + l_max)], rng));
        }
    }
    sampler.noise_run(trace, static_cast<std::uint32_t>(k * n) - trace.visited, rng);
    return trace;
}

TrialOutcome run_metric_trial(const SimConfig& config, Rng& rng)
{
    return metric_trial_trace(config, true, rng)
        .outcome(config.policy.threshold, config.policy.accept_half_width);
}

// Unit audit for the synthesized waveform. The decision metric is normalized
// to unit noise power, sigma_n'^2 = N0 / (2 T_per) := 1, i.e. N0 = 2 T_per.
// Per-sample noise then has variance sigma_eta^2 = N0 f_s / 2 = N (real IF),
// or N/2 per component for complex baseband, and averaging N samples leaves
// 1/2 per component. The carrier power is C = (C/N0) N0 = 2 T_per C/N0 =
// L_max, so the real IF amplitude is sqrt(2C) and the baseband amplitude
// after downconversion is sqrt(C/2) = sqrt(L_max/2). A noiseless correct
// cell therefore gives 2|X|^2 = L_max times the squared Dirichlet kernel.
std::vector<double> waveform_bin_metrics(const WaveformConfig& waveform,
                                         const SignalParams& params, const BinScenario& scenario,
                                         const prn::CaCode& signal_code,
                                         const prn::CaCode& search_code, Rng& rng)
{
    const int n_code = prn::kCodeLength;
    const int n_samples = waveform.samples_per_period(params.t_per);
    const int decim = waveform.decimation(params.t_per);
    const double c_power = analytic::l_max_param(params);
    const double d_theta = kTwoPi * scenario.residual_hz / waveform.f_s;
    const int m = scenario.correct_phase;

    const auto chip = [&](int sample) {
        int i = sample / decim - m;
        if (i < 0)
            i += n_code;
        return static_cast<double>(signal_code[i]);
    };

    std::vector<std::complex<double>> chips(static_cast<std::size_t>(n_code));
    if (waveform.f_if == 0.0) {
        const double amplitude = scenario.with_signal ? std::sqrt(0.5 * c_power) : 0.0;
        std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * n_samples));
        for (int i = 0; i < n_code; ++i) {
            std::complex<double> v =
                amplitude * chip(i) * std::polar(1.0, d_theta * i + scenario.carrier_phase);
            if (waveform.noise_enabled) {
                const double re = noise(rng);
                const double im = noise(rng);
                v += std::complex<double>(re, im);
            }
            chips[static_cast<std::size_t>(i)] = v;
        }
    } else {
        const double amplitude = scenario.with_signal ? std::sqrt(2.0 * c_power) : 0.0;
        const double theta_if = kTwoPi * waveform.f_if / waveform.f_s;
        const double theta_bin = kTwoPi * scenario.bin_center_hz / waveform.f_s;
        const double theta_d = theta_bin - d_theta;
        std::normal_distribution<double> noise(0.0, std::sqrt(static_cast<double>(n_samples)));
        for (int i = 0; i < n_code; ++i) {
            std::complex<double> acc = 0.0;
            for (int s = 0; s < decim; ++s) {
                const int idx = i * decim + s;
                double r_if =
                    amplitude * chip(idx) * std::cos((theta_if + theta_d) * idx - scenario.carrier_phase);
                if (waveform.noise_enabled)
                    r_if += noise(rng);
                acc += r_if * std::polar(1.0, (theta_bin + theta_if) * idx);
            }
            chips[static_cast<std::size_t>(i)] = acc / static_cast<double>(decim);
        }
    }

    std::vector<double> metrics(static_cast<std::size_t>(n_code));
    correlate_all_phases(chips, search_code.chips(), metrics);
    return metrics;
}

SearchTrace waveform_trial_trace(const SimConfig& config, const WaveformConfig& waveform,
                                 bool signal_present, Rng& rng)
{
    const int k = config.grid.num_bins();
    const int n = prn::kCodeLength;
    const double w = config.grid.bin_width_hz();
    const prn::CaCode signal_code(waveform.prn_signal);
    const prn::CaCode search_code(signal_present ? waveform.prn_search : waveform.prn_false_alarm);

    const Placement place = draw_placement(k, n, w, rng);
    const double carrier_phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);

    std::vector<std::vector<double>> metrics(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) {
        BinScenario scenario;
        scenario.correct_phase = place.phase;
        scenario.residual_hz = (b - place.bin) * w + place.delta_hz;
        scenario.carrier_phase = carrier_phase;
        scenario.bin_center_hz = config.grid.bin_center_hz(b);
        scenario.with_signal =
            !waveform.confine_signal || std::abs(b - place.bin) <= config.l_max;
        metrics[static_cast<std::size_t>(b)] =
            waveform_bin_metrics(waveform, config.params, scenario, signal_code, search_code, rng);
    }

    SearchTrace trace;
    trace.num_bins = k;
    trace.num_phases = n;
    trace.order = config.policy.order;
    trace.correct_bin = place.bin;
    trace.correct_phase = place.phase;
    walk(trace, [&](int b, int p) {
        return metrics[static_cast<std::size_t>(b)][static_cast<std::size_t>(p)];
    });
    return trace;
}

TrialOutcome run_waveform_trial(const SimConfig& config, const WaveformConfig& waveform,
                                Rng& rng)
{
    waveform.validate(config.params.t_per);
    return waveform_trial_trace(config, waveform, true, rng)
        .outcome(config.policy.threshold, config.policy.accept_half_width);
}

void correlate_all_phases_serial(std::span<const std::complex<double>> samples,
                                 std::span<const std::int8_t> code, std::span<double> out)
{
    const std::size_t n = samples.size();
    if (code.size() != n || out.size() != n)
        throw std::invalid_argument("correlate_all_phases: length mismatch");
    for (std::size_t m = 0; m < n; ++m) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i >= m ? i - m : i + n - m;
            re += samples[i].real() * code[j];
            im += samples[i].imag() * code[j];
        }
        re /= static_cast<double>(n);
        im /= static_cast<double>(n);
        out[m] = re * re + im * im;
    }
}

void correlate_all_phases(std::span<const std::complex<double>> samples,
                          std::span<const std::int8_t> code, std::span<double> out)
{
    const long n = static_cast<long>(samples.size());
    if (static_cast<long>(code.size()) != n || static_cast<long>(out.size()) != n)
        throw std::invalid_argument("correlate_all_phases: length mismatch");

    std::vector<double> re_in(static_cast<std::size_t>(n));
    std::vector<double> im_in(static_cast<std::size_t>(n));
    // Doubled code so every lag reads one contiguous window.
    std::vector<double> code2(2 * static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        re_in[static_cast<std::size_t>(i)] = samples[static_cast<std::size_t>(i)].real();
        im_in[static_cast<std::size_t>(i)] = samples[static_cast<std::size_t>(i)].imag();
        code2[static_cast<std::size_t>(i)] = code[static_cast<std::size_t>(i)];
        code2[static_cast<std::size_t>(i + n)] = code[static_cast<std::size_t>(i)];
    }

#pragma omp parallel for schedule(static)
    for (long m = 0; m < n; ++m) {
        // code[(i - m) mod N] = code2[i - m + N]
        const double* c = code2.data() + (n - m);
        double re = 0.0;
        double im = 0.0;
        for (long i = 0; i < n; ++i) {
            re += re_in[static_cast<std::size_t>(i)] * c[i];
            im += im_in[static_cast<std::size_t>(i)] * c[i];
        }
        re /= static_cast<double>(n);
        im /= static_cast<double>(n);
        out[static_cast<std::size_t>(m)] = re * re + im * im;
    }
}

Interval wilson_interval(long successes, long trials, double z)
{
    if (trials <= 0 || successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: need 0 <= successes <= trials, trials > 0");
    const double n = static_cast<double>(trials);
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // The bounds touch 0 and 1 exactly at the extreme counts.
    return {successes == 0 ? 0.0 : std::max(0.0, center - half),
            successes == trials ? 1.0 : std::min(1.0, center + half)};
}

namespace {

SweepResult empty_sweep(const SimConfig& config, std::span<const double> betas,
                        std::span<const int> m_values)
{
    SweepResult r;
    r.betas.assign(betas.begin(), betas.end());
    r.m_values.assign(m_values.begin(), m_values.end());
    r.trials = config.trials;
    r.num_bins = config.grid.num_bins();
    const std::size_t nb = betas.size();
    r.detections.assign(nb, std::vector<long>(m_values.size(), 0));
    r.false_alarms.assign(nb, 0);
    r.stop_offsets.assign(nb, std::vector<long>(2 * static_cast<std::size_t>(r.num_bins) - 1, 0));
    r.wrong_phase_stops.assign(nb, 0);
    r.no_stops.assign(nb, 0);
    return r;
}

void check_sweep_inputs(const SimConfig& config, const WaveformConfig& waveform,
                        std::span<const double> betas, std::span<const int> m_values)
{
    config.validate();
    if (config.fidelity == Fidelity::Waveform)
        waveform.validate(config.params.t_per);
    if (betas.empty() || m_values.empty())
        throw std::invalid_argument("sweep needs at least one threshold and one M");
    for (double b : betas)
        if (!(b >= 0.0))
            throw std::invalid_argument("thresholds must be non-negative");
    for (int m : m_values)
        if (m < 0 || m >= config.grid.num_bins())
            throw std::invalid_argument("M must lie in [0, K)");
}

constexpr std::uint64_t kDetectionStream = 0;
constexpr std::uint64_t kFalseAlarmStream = 1;

// One trial of either run, folded into `acc`. Trial index t in [0, 2*trials):
// the first half are detection trials, the second half false-alarm trials.
void run_sweep_trial(const SimConfig& config, const WaveformConfig& waveform, long t,
                     SweepResult& acc)
{
    const bool detection_run = t < config.trials;
    const long index = detection_run ? t : t - config.trials;
    Rng rng = trial_rng(config.seed, detection_run ? kDetectionStream : kFalseAlarmStream,
                        static_cast<std::uint64_t>(index));
    const SearchTrace trace = config.fidelity == Fidelity::MetricLevel
                                  ? metric_trial_trace(config, detection_run, rng)
                                  : waveform_trial_trace(config, waveform, detection_run, rng);

    const int k = acc.num_bins;
    for (std::size_t b = 0; b < acc.betas.size(); ++b) {
        const SearchTrace::Record* rec = trace.stop_record(acc.betas[b]);
        if (!detection_run) {
            if (rec != nullptr)
                ++acc.false_alarms[b];
            continue;
        }
        if (rec == nullptr) {
            ++acc.no_stops[b];
            continue;
        }
        const TrialOutcome out = trace.outcome(acc.betas[b], 0);
        if (*out.stop_phase != trace.correct_phase) {
            ++acc.wrong_phase_stops[b];
            continue;
        }
        const int offset = *out.stop_bin - trace.correct_bin;
        ++acc.stop_offsets[b][static_cast<std::size_t>(offset + k - 1)];
        for (std::size_t i = 0; i < acc.m_values.size(); ++i)
            if (std::abs(offset) <= acc.m_values[i])
                ++acc.detections[b][i];
    }
}

void merge_into(SweepResult& into, const SweepResult& from)
{
    for (std::size_t b = 0; b < into.betas.size(); ++b) {
        for (std::size_t i = 0; i < into.m_values.size(); ++i)
            into.detections[b][i] += from.detections[b][i];
        into.false_alarms[b] += from.false_alarms[b];
        for (std::size_t o = 0; o < into.stop_offsets[b].size(); ++o)
            into.stop_offsets[b][o] += from.stop_offsets[b][o];
        into.wrong_phase_stops[b] += from.wrong_phase_stops[b];
        into.no_stops[b] += from.no_stops[b];
    }
}

}  // namespace

SweepResult monte_carlo_sweep_serial(const SimConfig& config, const WaveformConfig& waveform,
                                     std::span<const double> betas,
                                     std::span<const int> m_values)
{
    check_sweep_inputs(config, waveform, betas, m_values);
    SweepResult result = empty_sweep(config, betas, m_values);
    for (long t = 0; t < 2 * config.trials; ++t)
        run_sweep_trial(config, waveform, t, result);
    return result;
}

SweepResult monte_carlo_sweep(const SimConfig& config, const WaveformConfig& waveform,
                              std::span<const double> betas, std::span<const int> m_values,
                              int threads)
{
    check_sweep_inputs(config, waveform, betas, m_values);
    SweepResult result = empty_sweep(config, betas, m_values);
    const long total = 2 * config.trials;

#ifdef _OPENMP
    const int team = threads > 0 ? threads : omp_get_max_threads();
#else
    const int team = 1;
    (void)threads;
#endif

#pragma omp parallel num_threads(team)
    {
        SweepResult local = empty_sweep(config, betas, m_values);
#pragma omp for schedule(dynamic, 8)
        for (long t = 0; t < total; ++t)
            run_sweep_trial(config, waveform, t, local);
#pragma omp critical(acqroc_sweep_merge)
        merge_into(result, local);
    }
    return result;
}

MonteCarloResult monte_carlo(const SimConfig& config, const WaveformConfig& waveform, int threads)
{
    const double beta = config.policy.threshold;
    const int m = config.policy.accept_half_width;
    const SweepResult sweep = monte_carlo_sweep(config, waveform, std::span(&beta, 1),
                                                std::span(&m, 1), threads);
    MonteCarloResult r;
    r.trials = sweep.trials;
    r.detections = sweep.detections[0][0];
    r.false_alarms = sweep.false_alarms[0];
    r.p_det_hat = static_cast<double>(r.detections) / static_cast<double>(r.trials);
    r.p_fa_hat = static_cast<double>(r.false_alarms) / static_cast<double>(r.trials);
    r.det_ci = wilson_interval(r.detections, r.trials);
    r.fa_ci = wilson_interval(r.false_alarms, r.trials);
    r.stop_offsets = sweep.stop_offsets[0];
    return r;
}

}  // namespace acqroc::sim

namespace acqroc::sim {

namespace {

constexpr long kDrawsPerChunk = 4096;

// Draws are split into fixed chunks, each with its own substream, and
// thresholds are applied to the sorted samples of a chunk.
template <class DrawMetric>
std::vector<long> exceedance_counts(std::span<const double> betas, long draws,
                                    std::uint64_t seed, std::uint64_t stream, int threads,
                                    DrawMetric draw)
{
    if (draws < 1)
        throw std::invalid_argument("draws must be at least 1");
    const long chunks = (draws + kDrawsPerChunk - 1) / kDrawsPerChunk;
    std::vector<long> counts(betas.size(), 0);

#ifdef _OPENMP
    const int team = threads > 0 ? threads : omp_get_max_threads();
#else
    const int team = 1;
    (void)threads;
#endif

#pragma omp parallel num_threads(team)
    {
        std::vector<long> local(betas.size(), 0);
        std::vector<double> samples;
#pragma omp for schedule(dynamic, 1)
        for (long c = 0; c < chunks; ++c) {
            Rng rng = trial_rng(seed, stream, static_cast<std::uint64_t>(c));
            MetricSampler sampler;
            const long count = std::min(kDrawsPerChunk, draws - c * kDrawsPerChunk);
            samples.resize(static_cast<std::size_t>(count));
            for (auto& s : samples)
                s = draw(sampler, rng);
            std::sort(samples.begin(), samples.end());
            for (std::size_t b = 0; b < betas.size(); ++b) {
                const auto it = std::upper_bound(samples.begin(), samples.end(), betas[b]);
                local[b] += samples.end() - it;
            }
        }
#pragma omp critical(acqroc_exceedance_merge)
        for (std::size_t b = 0; b < betas.size(); ++b)
            counts[b] += local[b];
    }
    return counts;
}

}  // namespace

std::vector<long> metric_exceedance_counts(double l_param, std::span<const double> betas,
                                           long draws, std::uint64_t seed, std::uint64_t stream,
                                           int threads)
{
    if (!(l_param >= 0.0))
        throw std::invalid_argument("non-centrality must be non-negative");
    return exceedance_counts(betas, draws, seed, stream, threads,
                             [l_param](MetricSampler& sampler, Rng& rng) {
                                 return sampler.signal(l_param, rng);
                             });
}

std::vector<long> cell_exceedance_counts(const SignalParams& params, const DopplerGrid& grid,
                                         int l, std::span<const double> betas, long draws,
                                         std::uint64_t seed, std::uint64_t stream, int threads)
{
    if (l < 0)
        throw std::invalid_argument("bin offset must be non-negative");
    const double w = grid.bin_width_hz();
    const double t = params.t_per;
    const double l_peak = analytic::l_max_param(params);
    const double lower = (2.0 * l - 1.0) * 0.5 * w;
    const double upper = (2.0 * l + 1.0) * 0.5 * w;
    return exceedance_counts(betas, draws, seed, stream, threads,
                             [=](MetricSampler& sampler, Rng& rng) {
                                 const double df =
                                     std::uniform_real_distribution<double>(lower, upper)(rng);
                                 const double g = numerics::sinc(df * t);
                                 return sampler.signal(l_peak * g * g, rng);
                             });
}

std::vector<long> waveform_cell_exceedance_counts(const SignalParams& params,
                                                  const DopplerGrid& grid,
                                                  const WaveformConfig& waveform, int l,
                                                  std::span<const double> betas, long draws,
                                                  std::uint64_t seed, std::uint64_t stream,
                                                  int threads)
{
    if (l < 0)
        throw std::invalid_argument("bin offset must be non-negative");
    waveform.validate(params.t_per);
    const double w = grid.bin_width_hz();
    const double lower = (2.0 * l - 1.0) * 0.5 * w;
    const double upper = (2.0 * l + 1.0) * 0.5 * w;
    const prn::CaCode signal_code(waveform.prn_signal);
    const prn::CaCode search_code(waveform.prn_search);
    const int center_bin = grid.num_bins() / 2;
    return exceedance_counts(
        betas, draws, seed, stream, threads, [&](MetricSampler&, Rng& rng) {
            BinScenario scenario;
            scenario.correct_phase =
                std::uniform_int_distribution<int>(0, prn::kCodeLength - 1)(rng);
            scenario.residual_hz = std::uniform_real_distribution<double>(lower, upper)(rng);
            scenario.carrier_phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
            scenario.bin_center_hz = grid.bin_center_hz(center_bin);
            const std::vector<double> metrics = waveform_bin_metrics(
                waveform, params, scenario, signal_code, search_code, rng);
            return metrics[static_cast<std::size_t>(scenario.correct_phase)];
        });
}

}  // namespace acqroc::sim
