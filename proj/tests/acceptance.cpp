// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "acqroc/analytic.hpp"
#include "acqroc/commands.hpp"
#include "acqroc/oracle.hpp"
#include "acqroc/simulator.hpp"

using namespace acqroc;
using analytic::CellDetectionTable;
using analytic::DopplerGrid;
using analytic::NonCentralityProfile;
using analytic::SearchOrder;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kPhases = 1023;
const analytic::SignalParams kPaper{40.0, 1e-3};
const std::vector<double> kWidths = {200.0, 500.0, 700.0, 1000.0};

struct Verdict {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v)
{
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}

std::vector<double> default_betas() { return harness::BetaGridSpec{}.betas(); }

Verdict oracle_equivalence()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20120901);
    std::uniform_int_distribution<int> kd(1, 5), nd(1, 6), md(0, 2), sd(0, 2);
    std::uniform_real_distribution<double> ld(0.0, 30.0), lp(std::log(1e-6), std::log(0.9));
    double worst_cf = 0.0, worst_df = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int k = kd(rng), n = nd(rng), m = std::min(md(rng), k - 1);
        std::vector<double> prof(static_cast<std::size_t>(sd(rng)) + 1);
        for (auto& v : prof)
            v = ld(rng);
        const double beta = -lp(rng);
        const auto cells = CellDetectionTable::from_profile(NonCentralityProfile(prof), beta);
        worst_cf = std::max(worst_cf,
                            std::abs(analytic::global_pdet_code_first(cells, m, n, k) -
                                     oracle::averaged_detection(cells, k, n, m,
                                                                SearchOrder::CodePhaseFirst)));
        worst_df = std::max(worst_df,
                            std::abs(analytic::global_pdet_doppler_first(cells, m, n, k) -
                                     oracle::averaged_detection(cells, k, n, m,
                                                                SearchOrder::DopplerFirst)));
    }
    const double secs = seconds_since(t0);
    return {worst_cf <= 1e-12 && worst_df <= 1e-12 && secs < 10.0,
            "max dev code-first " + num(worst_cf) + ", doppler-first " + num(worst_df) + ", " +
                num(secs) + " s"};
}

Verdict reduction_identity()
{
    double worst = 0.0;
    for (double w : kWidths) {
        const int k = DopplerGrid(w, 5000, 1e-3).num_bins();
        for (double beta : default_betas()) {
            const double lmax = analytic::l_max_param(kPaper);
            const auto cells =
                CellDetectionTable::from_profile(NonCentralityProfile::single_signal(lmax), beta);
            const double naive = analytic::global_pdet_naive(lmax, beta, kPhases, k);
            worst = std::max(worst, std::abs(analytic::global_pdet_code_first(cells, 0, kPhases, k) - naive));
            worst = std::max(worst, std::abs(analytic::global_pdet_doppler_first(cells, 0, kPhases, k) - naive));
        }
    }
    return {worst <= 1e-12, "max dev " + num(worst)};
}

Verdict cell_statistics()
{
    const auto t0 = Clock::now();
    const long draws = 100'000;
    int bad = 0;
    double worst_z = 0.0;
    std::uint64_t stream = 1000;
    for (const auto& pt : harness::cell_check_grid()) {
        const double beta = pt.beta;
        const auto hits =
            sim::metric_exceedance_counts(pt.l_param, std::span(&beta, 1), draws, 20120901, stream++);
        const double p = analytic::cell_pdet(pt.l_param, beta);
        const double sigma = std::sqrt(p * (1 - p) / draws);
        const double dev = std::abs(hits[0] / double(draws) - p);
        if (dev > 3 * sigma)
            ++bad;
        if (sigma > 0)
            worst_z = std::max(worst_z, dev / sigma);
    }
    const double secs = seconds_since(t0);
    return {bad == 0 && secs < 30.0,
            std::to_string(harness::cell_check_grid().size()) + " points, " +
                std::to_string(bad) + " outside 3 sigma, max z " + num(worst_z) + ", " +
                num(secs) + " s"};
}

Verdict global_agreement()
{
    const auto t0 = Clock::now();
    const long trials = 10'000;
    const double z = 3.0;
    const std::vector<double> betas = default_betas();
    const std::vector<int> ms = {0, 1};
    std::string detail;
    bool ok = true;
    for (std::size_t wi = 0; wi < kWidths.size(); ++wi) {
        sim::SimConfig c;
        c.trials = trials;
        c.seed = 20120901 + wi;
        c.params = kPaper;
        c.grid = DopplerGrid(kWidths[wi], 5000, 1e-3);
        c.policy = {SearchOrder::CodePhaseFirst, 0, 0.0};
        c.l_max = 2;
        const auto sweep = sim::monte_carlo_sweep(c, {}, betas, ms);
        const int k = c.grid.num_bins();
        const double wt = c.grid.relative_width();
        const auto profile = NonCentralityProfile::expected(kPaper, c.grid, 2);
        for (std::size_t mi = 0; mi < ms.size(); ++mi) {
            const int m = ms[mi];
            const bool exempt = (std::abs(wt - 0.5) < 1e-9 || std::abs(wt - 0.7) < 1e-9) && m >= 1;
            int fa_out = 0, det_out = 0;
            for (std::size_t b = 0; b < betas.size(); ++b) {
                const auto fa_ci = sim::wilson_interval(sweep.false_alarms[b], trials, z);
                const double pfa = analytic::global_pfa(std::exp(-betas[b]), kPhases, k);
                if (pfa < fa_ci.low || pfa > fa_ci.high)
                    ++fa_out;
                const auto det_ci = sim::wilson_interval(sweep.detections[b][mi], trials, z);
                const auto cells = CellDetectionTable::from_profile(profile, betas[b]);
                double model = analytic::global_pdet_code_first(cells, m, kPhases, k);
                if (exempt)
                    model = analytic::global_pdet_marginalized(
                        kPaper, c.grid, {SearchOrder::CodePhaseFirst, m, betas[b]}, kPhases, 2);
                if (model < det_ci.low || model > det_ci.high)
                    ++det_out;
            }
            if (fa_out + det_out > 0) {
                ok = false;
                detail += " W=" + num(kWidths[wi]) + "/M=" + std::to_string(m) + ": P_FA out " +
                          std::to_string(fa_out) + ", P_DET out " + std::to_string(det_out) +
                          (exempt ? " (exact variant);" : ";");
            }
        }
    }
    const double secs = seconds_since(t0);
    ok = ok && secs <= 600.0;
    return {ok, (detail.empty() ? std::string("all widths and thresholds inside bounds;")
                                : detail.substr(1)) +
                    " " + num(secs) + " s"};
}

Verdict waveform_fidelity()
{
    double worst = 0.0, worst_sinc = 0.0;
    const prn::CaCode code(1);
    sim::WaveformConfig w;
    w.noise_enabled = false;
    for (double x : {0.0, 0.25, 0.5, 1.0}) {
        sim::BinScenario s;
        s.correct_phase = 211;
        s.residual_hz = x / kPaper.t_per;
        s.carrier_phase = 1.1;
        sim::Rng rng = sim::trial_rng(1, 0, 0);
        const auto metrics = sim::waveform_bin_metrics(w, kPaper, s, code, code, rng);
        const double ratio = 2.0 * metrics[211] / analytic::l_max_param(kPaper);
        double dirichlet = 1.0;
        if (x != 0.0) {
            const double num = std::sin(M_PI * x), den = kPhases * std::sin(M_PI * x / kPhases);
            dirichlet = num * num / (den * den);
        }
        const double sinc = x == 0.0 ? 1.0 : std::pow(std::sin(M_PI * x) / (M_PI * x), 2);
        worst = std::max(worst, std::abs(ratio - dirichlet));
        worst_sinc = std::max(worst_sinc, std::abs(dirichlet - sinc));
    }
    return {worst <= 1e-6 && worst_sinc < 1e-5,
            "max |2|X|^2/L_max - Dirichlet| " + num(worst) + ", max |Dirichlet - sinc^2| " +
                num(worst_sinc)};
}

Verdict energy_identity()
{
    bool ok = true;
    std::string detail;
    for (double wt : {0.2, 0.5, 0.7, 1.0}) {
        const auto prof = NonCentralityProfile::expected(kPaper, DopplerGrid(wt * 1000, 5000, 1e-3), 50);
        double sum = prof.at(0);
        for (int l = 1; l <= 50; ++l)
            sum += 2 * prof.at(l);
        const double r = wt * sum / analytic::l_max_param(kPaper);
        ok = ok && r >= 0.99 && r <= 1.0;
        detail += " W*T=" + num(wt) + ": " + std::to_string(r);
    }
    return {ok, detail.substr(1)};
}

// P_DET interpolated linearly in log P_FA.
double pdet_at(const analytic::RocCurve& c, double pfa)
{
    const auto& p = c.points;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const double a = p[i - 1].p_fa_global, b = p[i].p_fa_global;
        if ((a >= pfa && b <= pfa) && a > b) {
            const double t = (std::log(pfa) - std::log(a)) / (std::log(b) - std::log(a));
            return p[i - 1].p_det_code_first + t * (p[i].p_det_code_first - p[i - 1].p_det_code_first);
        }
    }
    return NAN;
}

Verdict orderings()
{
    std::string detail;
    bool ok = true;

    // (a) M = 0, beta with global P_FA closest to 1e-2.
    std::vector<double> at;
    for (double w : kWidths) {
        const auto curve = analytic::roc_curve(kPaper, DopplerGrid(w, 5000, 1e-3),
                                               SearchOrder::CodePhaseFirst, 0, default_betas());
        std::size_t best = 0;
        for (std::size_t i = 0; i < curve.points.size(); ++i)
            if (std::abs(std::log(curve.points[i].p_fa_global / 1e-2)) <
                std::abs(std::log(curve.points[best].p_fa_global / 1e-2)))
                best = i;
        at.push_back(curve.points[best].p_det_code_first);
    }
    const bool a = std::min(at[1], at[2]) > std::max(at[0], at[3]);
    ok = ok && a;
    detail += "(a) " + std::string(a ? "ok" : "violated") + " P_DET " + num(at[0]) + "/" +
              num(at[1]) + "/" + num(at[2]) + "/" + num(at[3]);

    harness::BetaGridSpec fine;
    fine.points = 400;
    const auto betas = fine.betas();
    const auto best_is_200 = [&](const std::vector<std::pair<double, int>>& setup) {
        std::vector<analytic::RocCurve> curves;
        for (auto [w, m] : setup)
            curves.push_back(analytic::roc_curve(kPaper, DopplerGrid(w, 5000, 1e-3),
                                                 SearchOrder::CodePhaseFirst, m, betas));
        for (int i = 0; i <= 40; ++i) {
            const double pfa = std::pow(10.0, -3.0 + 2.0 * i / 40.0);
            const double ref = pdet_at(curves[0], pfa);
            for (std::size_t c = 1; c < curves.size(); ++c)
                if (!(ref >= pdet_at(curves[c], pfa)))
                    return false;
        }
        return true;
    };
    const bool b = best_is_200({{200, 1}, {500, 1}, {700, 1}, {1000, 1}});
    const bool c = best_is_200({{200, 2}, {500, 1}, {700, 0}});
    ok = ok && b && c;
    detail += "; (b) " + std::string(b ? "ok" : "violated") + "; (c) " + (c ? "ok" : "violated");
    return {ok, detail};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism()
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("acqroc_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    struct Case {
        std::string config;
        std::string flags;
    };
    const std::vector<Case> cases = {
        {R"({"cn0_dbhz": 40, "tper_ms": 1, "trials": 3000, "m": 1})", ""},
        {R"({"cn0_dbhz": 40, "tper_ms": 1, "trials": 2000, "order": "doppler-first"})", " --seed 77"},
        {R"({"cn0_dbhz": 40, "tper_ms": 1, "trials": 6, "bin_widths_hz": [1000], "fidelity": "waveform"})", ""},
    };
    bool ok = true;
    int runs = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const fs::path cfg = dir / ("c" + std::to_string(i) + ".json");
        std::ofstream(cfg) << cases[i].config;
        std::string first;
        for (int threads : {1, 2, 4}) {
            const fs::path out = dir / ("o" + std::to_string(i) + "_" + std::to_string(threads) + ".csv");
            const std::string cmd = std::string(ACQROC_CLI) + " simulate --config " + cfg.string() +
                                    cases[i].flags + " --threads " + std::to_string(threads) +
                                    " --out " + out.string();
            if (std::system(cmd.c_str()) != 0) {
                ok = false;
                continue;
            }
            ++runs;
            const std::string bytes = slurp(out);
            if (first.empty())
                first = bytes;
            else
                ok = ok && bytes == first;
        }
    }
    fs::remove_all(dir);
    return {ok, std::to_string(runs) + " runs over 3 configs and 1/2/4 threads"};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"reduction identity", reduction_identity},
        {"cell-statistics agreement", cell_statistics},
        {"global-probability agreement", global_agreement},
        {"waveform-chain fidelity", waveform_fidelity},
        {"energy identity", energy_identity},
        {"qualitative orderings", orderings},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " ("
                  << criteria[i].first << "): " << v.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
