#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "acqroc/simulator.hpp"

using namespace acqroc;
using namespace acqroc::sim;

namespace {

double dirichlet2(double x, int n)
{
    if (std::abs(x - std::round(x * n) / n) < 1e-15 && std::abs(std::sin(M_PI * x / n)) < 1e-15)
        return 1.0;
    const double num = std::sin(M_PI * x);
    const double den = n * std::sin(M_PI * x / n);
    return num * num / (den * den);
}

SimConfig paper_config(double width, int m, long trials)
{
    SimConfig c;
    c.trials = trials;
    c.seed = 99;
    c.params = {40.0, 1e-3};
    c.grid = DopplerGrid(width, 5000.0, 1e-3);
    c.policy = {SearchOrder::CodePhaseFirst, m, 0.0};
    return c;
}

double noiseless_ratio(const WaveformConfig& base, double df_t)
{
    WaveformConfig w = base;
    w.noise_enabled = false;
    const SignalParams p{40.0, 1e-3};
    BinScenario s;
    s.correct_phase = 417;
    s.residual_hz = df_t / p.t_per;
    s.carrier_phase = 0.83;
    s.bin_center_hz = 1500.0;
    const prn::CaCode code(1);
    Rng rng = trial_rng(1, 2, 3);
    const auto metrics = waveform_bin_metrics(w, p, s, code, code, rng);
    return 2.0 * metrics[417] / analytic::l_max_param(p);
}

}  // namespace

TEST_CASE("trial substreams")
{
    Rng a = trial_rng(5, 0, 10), b = trial_rng(5, 0, 10), c = trial_rng(5, 1, 10),
        d = trial_rng(5, 0, 11);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

TEST_CASE("metric draws")
{
    const double betas[] = {std::log(2.0)};
    const long n = 1'000'000;
    const auto hits = metric_exceedance_counts(0.0, betas, n, 3, 0);
    CHECK(std::abs(hits[0] / double(n) - 0.5) < 0.002);

    Rng rng = trial_rng(3, 1, 0);
    double sum = 0.0;
    for (long i = 0; i < n; ++i)
        sum += draw_metric(0.0, rng);
    CHECK(std::abs(sum / n - 1.0) < 0.01);

    const double ten[] = {10.0};
    const auto h20 = metric_exceedance_counts(20.0, ten, 100'000, 3, 2);
    CHECK(std::abs(h20[0] / 1e5 - analytic::cell_pdet(20.0, 10.0)) < 0.01);
    CHECK(std::abs(h20[0] / 1e5 - 0.545) < 0.01);

    Rng r2 = trial_rng(3, 3, 0);
    double mean = 0.0;
    for (int i = 0; i < 200'000; ++i)
        mean += draw_metric(6.0, r2);
    // E|X|^2 = 1 + L/2 in these units.
    CHECK(mean / 200'000 == doctest::Approx(4.0).epsilon(0.01));
    CHECK_THROWS_AS(draw_metric(-1.0, r2), std::invalid_argument);
}

TEST_CASE("exceedance counts do not depend on the thread count")
{
    const double betas[] = {1.0, 4.0, 9.0};
    const auto a = metric_exceedance_counts(5.0, betas, 50'000, 11, 4, 1);
    const auto b = metric_exceedance_counts(5.0, betas, 50'000, 11, 4, 3);
    CHECK(a == b);
    const SignalParams p{40.0, 1e-3};
    const DopplerGrid g(500, 5000, 1e-3);
    CHECK(cell_exceedance_counts(p, g, 1, betas, 20'000, 1, 2, 1) ==
          cell_exceedance_counts(p, g, 1, betas, 20'000, 1, 2, 4));
}

TEST_CASE("search trace matches a direct scan")
{
    Rng rng = trial_rng(1, 9, 0);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> values(300);
    for (auto& v : values)
        v = e(rng) * 2.0;
    SearchTrace t;
    t.num_bins = 20;
    t.num_phases = 15;
    t.correct_bin = 3;
    t.correct_phase = 7;
    for (double v : values)
        t.push(v);
    for (double beta : {0.0, 0.5, 2.0, 5.0, 8.0, 11.0, 100.0}) {
        int first = -1;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] > beta) {
                first = static_cast<int>(i);
                break;
            }
        const TrialOutcome o = t.outcome(beta, 1);
        CAPTURE(beta);
        if (first < 0) {
            CHECK(o.classified == Outcome::NoStop);
        } else {
            REQUIRE(o.stopped);
            CHECK(*o.stop_bin == first / 15);
            CHECK(*o.stop_phase == first % 15);
            const bool acc = *o.stop_phase == 7 && std::abs(*o.stop_bin - 3) <= 1;
            CHECK((o.classified == Outcome::Detection) == acc);
        }
    }
}

TEST_CASE("noise-only trials follow the geometric stop law")
{
    // Stop visit index for a noise-only search is geometric with p = exp(-beta).
    SimConfig c = paper_config(1000, 0, 1);
    const int cells = c.grid.num_bins() * prn::kCodeLength;
    const double beta = 9.0, p = std::exp(-beta);
    const int trials = 20'000;
    std::vector<int> quart(5, 0);
    for (int t = 0; t < trials; ++t) {
        Rng rng = trial_rng(4, 1, static_cast<std::uint64_t>(t));
        const SearchTrace tr = metric_trial_trace(c, false, rng);
        CHECK(tr.visited == static_cast<std::uint32_t>(cells));
        const auto* rec = tr.stop_record(beta);
        quart[rec ? rec->visit * 4 / cells : 4]++;
    }
    for (int q = 0; q < 5; ++q) {
        const double lo = q < 4 ? std::pow(1 - p, q * cells / 4.0) : std::pow(1 - p, cells);
        const double hi = q < 4 ? std::pow(1 - p, (q + 1) * cells / 4.0) : 0.0;
        const double prob = lo - hi;
        const double sigma = std::sqrt(prob * (1 - prob) / trials);
        CAPTURE(q);
        CHECK(std::abs(quart[q] / double(trials) - prob) <= 4 * sigma);
    }
}

TEST_CASE("threshold extremes")
{
    SimConfig c = paper_config(500, 0, 1);
    Rng rng = trial_rng(1, 0, 0);
    const SearchTrace tr = metric_trial_trace(c, true, rng);
    const TrialOutcome first = tr.outcome(0.0, 0);
    REQUIRE(first.stopped);
    CHECK(*first.stop_bin == 0);
    CHECK(*first.stop_phase == 0);
    CHECK(tr.outcome(1e6, 0).classified == Outcome::NoStop);

    const double zero = 0.0;
    const int m0 = 0;
    c.trials = 1;
    const SweepResult r = monte_carlo_sweep(c, {}, std::span(&zero, 1), std::span(&m0, 1));
    CHECK((r.detections[0][0] == 0 || r.detections[0][0] == 1));
    CHECK(r.false_alarms[0] == 1);
}

TEST_CASE("sweep is identical across thread counts and the serial reference")
{
    SimConfig c = paper_config(700, 1, 600);
    const std::vector<double> betas = {2.0, 8.0, 12.0, 15.0};
    const std::vector<int> ms = {0, 1, 2};
    const SweepResult ref = monte_carlo_sweep_serial(c, {}, betas, ms);
    for (int threads : {1, 2, 3, 8})
        CHECK(monte_carlo_sweep(c, {}, betas, ms, threads) == ref);
    c.policy.order = SearchOrder::DopplerFirst;
    CHECK(monte_carlo_sweep(c, {}, betas, ms, 4) == monte_carlo_sweep_serial(c, {}, betas, ms));
}

TEST_CASE("false alarms agree with the global false-alarm probability")
{
    SimConfig c = paper_config(500, 0, 100'000);
    const double beta = -std::log(0.02 / (20.0 * 1023));
    const int m0 = 0;
    const SweepResult r = monte_carlo_sweep(c, {}, std::span(&beta, 1), std::span(&m0, 1));
    const double p = analytic::global_pfa(std::exp(-beta), 1023, 20);
    const double sigma = std::sqrt(p * (1 - p) / 1e5);
    CHECK(std::abs(r.false_alarms[0] / 1e5 - p) <= 3 * sigma);
}

TEST_CASE("paper configuration W=500 Hz, M=0, 1e5 trials")
{
    SimConfig c = paper_config(500, 0, 100'000);
    std::vector<double> betas;
    for (int i = 0; i < 60; ++i)
        betas.push_back(-std::log(0.5) + i * (std::log(0.5) - std::log(1e-9)) / 59.0);
    const int m0 = 0;
    const SweepResult r = monte_carlo_sweep(c, {}, betas, std::span(&m0, 1));
    int outside = 0;
    for (std::size_t b = 0; b < betas.size(); ++b) {
        const auto cells = analytic::CellDetectionTable::from_profile(
            analytic::NonCentralityProfile::expected(c.params, c.grid, 2), betas[b]);
        const double cf = analytic::global_pdet_code_first(cells, 0, 1023, 20);
        const double exact = analytic::global_pdet_marginalized(
            c.params, c.grid, {SearchOrder::CodePhaseFirst, 0, betas[b]}, 1023, 2);
        const double ph = r.detections[b][0] / 1e5;
        const double sigma = std::sqrt(exact * (1 - exact) / 1e5) + 0.5 / 1e5;
        CAPTURE(betas[b]);
        // 60 strongly correlated thresholds: 4 sigma keeps the family-wise
        // false-failure rate small.
        CHECK(std::abs(ph - exact) <= 4 * sigma);
        outside += std::abs(ph - cf) > 3 * sigma;
    }
    MESSAGE("expected-L model outside 3 sigma at " << outside << " of 60 thresholds");
}

TEST_CASE("noiseless waveform reproduces the Dirichlet kernel")
{
    for (double x : {0.0, 0.25, 0.5, 1.0}) {
        CAPTURE(x);
        const double d = dirichlet2(x, 1023);
        CHECK(std::abs(noiseless_ratio({}, x) - d) < 1e-6);
        const double s = std::sin(M_PI * x) / (M_PI * x);
        CHECK(std::abs(d - (x == 0.0 ? 1.0 : s * s)) < 1e-5);
    }
    CHECK(std::abs(noiseless_ratio({}, 0.0) - 1.0) < 1e-9);
    CHECK(noiseless_ratio({}, 1.0) < 1e-6);
    const double s5 = std::pow(std::sin(M_PI * 0.5) / (M_PI * 0.5), 2);
    CHECK(std::abs(noiseless_ratio({}, 0.5) - s5) < 1e-3);
}

TEST_CASE("real-IF validation mode")
{
    const WaveformConfig w = WaveformConfig::real_if();
    CHECK_NOTHROW(w.validate(1e-3));
    CHECK(w.decimation(1e-3) == 4);
    for (double x : {0.0, 0.25, 0.5})
        CHECK(std::abs(noiseless_ratio(w, x) - dirichlet2(x, 1023)) < 2e-3);
}

TEST_CASE("waveform noise normalization")
{
    // Signal-free bins: |X|^2 is Exp(1) at every code phase.
    const SignalParams p{40.0, 1e-3};
    const prn::CaCode c1(1), c5(5);
    BinScenario s;
    s.with_signal = false;
    double sum = 0.0;
    long n = 0;
    for (int t = 0; t < 40; ++t) {
        Rng rng = trial_rng(2, 0, static_cast<std::uint64_t>(t));
        for (double v : waveform_bin_metrics({}, p, s, c1, c5, rng)) {
            sum += v;
            ++n;
        }
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));

    const SimConfig c = paper_config(1000, 0, 30);
    const std::vector<double> betas = {12.0, 16.0};
    const std::vector<int> ms = {0};
    CHECK(monte_carlo_sweep(SimConfig{c.trials, c.seed, Fidelity::Waveform, c.params, c.grid,
                                      c.policy, 2},
                            {}, betas, ms, 1) ==
          monte_carlo_sweep(SimConfig{c.trials, c.seed, Fidelity::Waveform, c.params, c.grid,
                                      c.policy, 2},
                            {}, betas, ms, 4));
}

TEST_CASE("correlation kernels")
{
    const prn::CaCode code(3);
    std::vector<std::complex<double>> x(1023);
    Rng rng = trial_rng(8, 0, 0);
    std::normal_distribution<double> g;
    for (auto& v : x)
        v = {g(rng), g(rng)};
    std::vector<double> a(1023), b(1023);
    correlate_all_phases(x, code.chips(), a);
    correlate_all_phases_serial(x, code.chips(), b);
    for (int i = 0; i < 1023; ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

    for (int i = 0; i < 1023; ++i)
        x[i] = code[(i - 100 + 1023) % 1023];
    correlate_all_phases(x, code.chips(), a);
    CHECK(a[100] == doctest::Approx(1.0));
    CHECK(a[101] == doctest::Approx(std::pow(prn::circular_correlation(code.chips(), code.chips(), 1), 2)));
    std::vector<double> short_out(10);
    CHECK_THROWS_AS(correlate_all_phases(x, code.chips(), short_out), std::invalid_argument);
}

TEST_CASE("Wilson interval")
{
    const Interval i = wilson_interval(5, 10);
    CHECK(i.low == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(i.high == doctest::Approx(0.7634).epsilon(1e-3));
    const Interval z = wilson_interval(0, 100);
    CHECK(z.low == 0.0);
    CHECK(z.high > 0.0);
    const Interval f = wilson_interval(100, 100);
    CHECK(f.high == 1.0);
    CHECK(f.low < 1.0);
    CHECK_THROWS_AS(wilson_interval(3, 2), std::invalid_argument);
}

TEST_CASE("configuration validation")
{
    SimConfig c = paper_config(500, 0, 10);
    CHECK_NOTHROW(c.validate());
    c.policy.accept_half_width = 20;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    WaveformConfig w;
    w.f_s = 2e6;
    CHECK_THROWS_AS(w.validate(1e-3), std::invalid_argument);
    WaveformConfig same;
    same.prn_false_alarm = 1;
    CHECK_THROWS_AS(same.validate(1e-3), std::invalid_argument);
}
