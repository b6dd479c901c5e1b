// OpenMP kernels against their serial references.

#include <complex>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "acqroc/prncode.hpp"
#include "acqroc/simulator.hpp"

using namespace acqroc;

namespace {

sim::SimConfig sweep_config(double width_hz, sim::Fidelity fidelity, long trials)
{
    sim::SimConfig c;
    c.trials = trials;
    c.seed = 7;
    c.fidelity = fidelity;
    c.params.cn0_dbhz = 40.0;
    c.params.t_per = 1e-3;
    c.grid = analytic::DopplerGrid(width_hz, 5000.0, 1e-3);
    c.policy = {analytic::SearchOrder::CodePhaseFirst, 0, 0.0};
    c.l_max = 2;
    return c;
}

std::vector<double> bench_betas()
{
    std::vector<double> b;
    for (int i = 0; i < 60; ++i)
        b.push_back(0.7 + 0.33 * i);
    return b;
}

const std::vector<int> kMs = {0, 1};

void BM_SweepMetric(benchmark::State& state)
{
    const auto c = sweep_config(static_cast<double>(state.range(0)), sim::Fidelity::MetricLevel, 2000);
    const auto betas = bench_betas();
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::monte_carlo_sweep(c, {}, betas, kMs));
    state.SetItemsProcessed(state.iterations() * 2 * c.trials);
}

void BM_SweepMetricSerial(benchmark::State& state)
{
    const auto c = sweep_config(static_cast<double>(state.range(0)), sim::Fidelity::MetricLevel, 2000);
    const auto betas = bench_betas();
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::monte_carlo_sweep_serial(c, {}, betas, kMs));
    state.SetItemsProcessed(state.iterations() * 2 * c.trials);
}

void BM_SweepWaveform(benchmark::State& state)
{
    const auto c = sweep_config(1000.0, sim::Fidelity::Waveform, 2);
    const auto betas = bench_betas();
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::monte_carlo_sweep(c, {}, betas, kMs));
    state.SetItemsProcessed(state.iterations() * 2 * c.trials);
}

void BM_SweepWaveformSerial(benchmark::State& state)
{
    const auto c = sweep_config(1000.0, sim::Fidelity::Waveform, 2);
    const auto betas = bench_betas();
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::monte_carlo_sweep_serial(c, {}, betas, kMs));
    state.SetItemsProcessed(state.iterations() * 2 * c.trials);
}

struct CorrelationInput {
    std::vector<std::complex<double>> samples;
    prn::CaCode code{1};

    CorrelationInput() : samples(prn::CaCode::size())
    {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g;
        for (auto& s : samples)
            s = {g(rng), g(rng)};
    }
};

void BM_Correlate(benchmark::State& state)
{
    const CorrelationInput in;
    std::vector<double> out(in.samples.size());
    for (auto _ : state) {
        sim::correlate_all_phases(in.samples, in.code.chips(), out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}

void BM_CorrelateSerial(benchmark::State& state)
{
    const CorrelationInput in;
    std::vector<double> out(in.samples.size());
    for (auto _ : state) {
        sim::correlate_all_phases_serial(in.samples, in.code.chips(), out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}

}  // namespace

BENCHMARK(BM_SweepMetric)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepMetricSerial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepWaveform)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepWaveformSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Correlate)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CorrelateSerial)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
