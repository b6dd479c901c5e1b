#include "acqroc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "acqroc/oracle.hpp"

namespace acqroc::harness {

namespace {

using analytic::CellDetectionTable;
using analytic::DopplerGrid;
using analytic::NonCentralityProfile;
using analytic::SearchOrder;
using analytic::SearchPolicy;

constexpr int kCodePhases = prn::kCodeLength;
constexpr int kCellOffsets = 3;  // l = 0, 1, 2 in the cell tables

// Distinct substreams per width so curves of different widths are independent.
std::uint64_t width_seed(std::uint64_t seed, std::size_t width_index)
{
    return seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(width_index);
}

std::string fixed(double v, int digits = 3)
{
    std::ostringstream o;
    o << std::setprecision(digits) << v;
    return o.str();
}

void emit(const std::string& content, const RunOptions& opts, std::ostream& out)
{
    if (opts.out)
        write_atomic(*opts.out, content);
    else
        out << content;
}

}  // namespace

const std::vector<std::string>& cell_probs_columns()
{
    static const std::vector<std::string> cols = {
        "width_hz",       "rel_width",   "offset_l",    "beta",     "p_fa_cell",
        "p_det_reference", "p_det_expected", "p_det_exact", "p_det_mc", "ci_low",
        "ci_high",        "trials"};
    return cols;
}

const std::vector<std::string>& roc_columns()
{
    static const std::vector<std::string> cols = {
        "width_hz",          "rel_width",         "num_bins",          "m",
        "beta",              "p_fa_cell",         "p_det_cell_l0",     "p_det_cell_l1",
        "p_det_cell_l2",     "p_det_cell_l0_exact", "p_det_cell_l1_exact", "p_det_cell_l2_exact",
        "p_fa_global",       "p_det_naive",       "p_det_code_first",  "p_det_doppler_first",
        "p_det_approx",      "p_det_exact",       "p_det_mc",          "p_fa_mc",
        "ci_low",            "ci_high",           "trials"};
    return cols;
}

CsvTable cell_probs_table(const ExperimentConfig& cfg, bool with_mc, int threads)
{
    CsvTable table(cell_probs_columns());
    const std::vector<double> betas = cfg.beta_grid.betas();
    const double l_peak = analytic::l_max_param(cfg.params);

    for (std::size_t wi = 0; wi < cfg.bin_widths_hz.size(); ++wi) {
        const double width = cfg.bin_widths_hz[wi];
        const DopplerGrid grid = cfg.grid(width);
        for (int l = 0; l < kCellOffsets; ++l) {
            const double l_expected = analytic::expected_noncentrality(cfg.params, grid, l);
            std::vector<long> hits;
            if (with_mc) {
                const std::uint64_t seed = width_seed(cfg.seed, wi);
                const auto stream = static_cast<std::uint64_t>(16 + l);
                hits = cfg.fidelity == sim::Fidelity::MetricLevel
                           ? sim::cell_exceedance_counts(cfg.params, grid, l, betas, cfg.trials,
                                                         seed, stream, threads)
                           : sim::waveform_cell_exceedance_counts(cfg.params, grid, {}, l, betas,
                                                                  cfg.trials, seed, stream,
                                                                  threads);
            }
            for (std::size_t b = 0; b < betas.size(); ++b) {
                const double beta = betas[b];
                const double pfa = analytic::cell_pfa(beta);
                std::vector<CsvTable::Cell> row = {
                    width,
                    grid.relative_width(),
                    static_cast<double>(l),
                    beta,
                    pfa,
                    l == 0 ? analytic::cell_pdet(l_peak, beta) : pfa,
                    analytic::cell_pdet(l_expected, beta),
                    analytic::cell_pdet_exact(cfg.params, grid, l, beta),
                    std::nullopt,
                    std::nullopt,
                    std::nullopt,
                    std::nullopt};
                if (with_mc) {
                    const sim::Interval ci = sim::wilson_interval(hits[b], cfg.trials);
                    row[8] = static_cast<double>(hits[b]) / static_cast<double>(cfg.trials);
                    row[9] = ci.low;
                    row[10] = ci.high;
                    row[11] = static_cast<double>(cfg.trials);
                }
                table.add_row(row);
            }
        }
    }
    return table;
}

analytic::RocCurve analytic_roc(const ExperimentConfig& cfg, double width_hz)
{
    const std::vector<double> betas = cfg.beta_grid.betas();
    return analytic::roc_curve(cfg.params, cfg.grid(width_hz), cfg.order,
                               cfg.accept_half_width(width_hz), betas, cfg.l_max, kCodePhases);
}

CsvTable roc_table(const ExperimentConfig& cfg, bool with_mc, int threads)
{
    CsvTable table(roc_columns());
    const std::vector<double> betas = cfg.beta_grid.betas();

    for (std::size_t wi = 0; wi < cfg.bin_widths_hz.size(); ++wi) {
        const double width = cfg.bin_widths_hz[wi];
        const DopplerGrid grid = cfg.grid(width);
        const int m = cfg.accept_half_width(width);
        const analytic::RocCurve curve = analytic_roc(cfg, width);

        std::optional<sim::SweepResult> sweep;
        if (with_mc) {
            sim::SimConfig sc = cfg.sim_config(width);
            sc.seed = width_seed(cfg.seed, wi);
            sweep = sim::monte_carlo_sweep(sc, {}, betas, std::span(&m, 1), threads);
        }

        for (std::size_t b = 0; b < curve.points.size(); ++b) {
            const analytic::RocPoint& pt = curve.points[b];
            std::vector<CsvTable::Cell> row = {width,
                                               grid.relative_width(),
                                               static_cast<double>(grid.num_bins()),
                                               static_cast<double>(m),
                                               pt.beta,
                                               pt.p_fa_cell};
            for (int l = 0; l < kCellOffsets; ++l)
                row.push_back(static_cast<std::size_t>(l) < pt.p_det_cell.size()
                                  ? CsvTable::Cell(pt.p_det_cell[static_cast<std::size_t>(l)])
                                  : std::nullopt);
            for (int l = 0; l < kCellOffsets; ++l)
                row.push_back(static_cast<std::size_t>(l) < pt.p_det_cell_exact.size()
                                  ? CsvTable::Cell(pt.p_det_cell_exact[static_cast<std::size_t>(l)])
                                  : std::nullopt);
            row.insert(row.end(), {pt.p_fa_global, pt.p_det_naive, pt.p_det_code_first,
                                   pt.p_det_doppler_first, pt.p_det_approx, pt.p_det_exact});
            if (sweep) {
                const long n = sweep->trials;
                const long det = sweep->detections[b][0];
                const long fa = sweep->false_alarms[b];
                const sim::Interval ci = sim::wilson_interval(det, n);
                row.insert(row.end(), {static_cast<double>(det) / static_cast<double>(n),
                                       static_cast<double>(fa) / static_cast<double>(n), ci.low,
                                       ci.high, static_cast<double>(n)});
            } else {
                row.insert(row.end(), 5, std::nullopt);
            }
            table.add_row(row);
        }
    }
    return table;
}

const std::vector<CellCheckPoint>& cell_check_grid()
{
    static const std::vector<CellCheckPoint> grid = [] {
        std::vector<CellCheckPoint> g;
        for (double l : {0.0, 2.0, 8.0, 20.0, 40.0})
            for (double beta : {0.5, 2.0, 5.0, 12.0})
                g.push_back({l, beta});
        return g;
    }();
    return grid;
}

bool in_expected_l_gap(int l, double relative_width)
{
    return l == 1 && relative_width >= 0.5 - 1e-9;
}

namespace {

CheckResult oracle_suite(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> k_dist(1, 5), n_dist(1, 6), m_dist(0, 2), lmax_dist(0, 2);
    std::uniform_real_distribution<double> l_dist(0.0, 30.0);
    std::uniform_real_distribution<double> log_pfa(std::log(1e-6), std::log(0.9));

    double worst = 0.0;
    std::string worst_case;
    for (int i = 0; i < 1000; ++i) {
        const int k = k_dist(rng);
        const int n = n_dist(rng);
        const int m = std::min(m_dist(rng), k - 1);
        std::vector<double> values(static_cast<std::size_t>(lmax_dist(rng)) + 1);
        for (auto& v : values)
            v = l_dist(rng);
        const NonCentralityProfile profile(values);
        const double beta = -log_pfa(rng);
        const CellDetectionTable cells = CellDetectionTable::from_profile(profile, beta);
        for (SearchOrder order : {SearchOrder::CodePhaseFirst, SearchOrder::DopplerFirst}) {
            const double analytic = order == SearchOrder::CodePhaseFirst
                                        ? analytic::global_pdet_code_first(cells, m, n, k)
                                        : analytic::global_pdet_doppler_first(cells, m, n, k);
            const double exact = oracle::averaged_detection(cells, k, n, m, order);
            const double dev = std::abs(analytic - exact);
            if (dev > worst) {
                worst = dev;
                worst_case = std::string(analytic::to_string(order)) + " K=" + std::to_string(k) +
                             " N=" + std::to_string(n) + " M=" + std::to_string(m) +
                             " beta=" + fixed(beta, 6);
            }
        }
    }
    CheckResult r{"oracle randomized suite (1000 instances, both orders)", worst <= 1e-12, false,
                  "max |analytic - oracle| = " + fixed(worst)};
    if (!worst_case.empty())
        r.detail += " at " + worst_case;
    return r;
}

CheckResult oracle_fixed_instance()
{
    const NonCentralityProfile profile({9.0, 3.0, 0.5});
    const double beta = 3.0;
    const CellDetectionTable cells = CellDetectionTable::from_profile(profile, beta);
    double worst = 0.0;
    for (SearchOrder order : {SearchOrder::CodePhaseFirst, SearchOrder::DopplerFirst}) {
        const double a = order == SearchOrder::CodePhaseFirst
                             ? analytic::global_pdet_code_first(cells, 1, 4, 3)
                             : analytic::global_pdet_doppler_first(cells, 1, 4, 3);
        worst = std::max(worst, std::abs(a - oracle::averaged_detection(cells, 3, 4, 1, order)));
    }
    return {"oracle K=3 N=4 M=1", worst <= 1e-12, false, "max deviation " + fixed(worst)};
}

CheckResult cell_statistics(const ExperimentConfig& cfg, int threads)
{
    const long draws = cfg.trials;
    const auto& grid = cell_check_grid();
    double worst_z = 0.0;
    std::string worst_case;
    bool ok = true;
    std::uint64_t stream = 64;
    for (std::size_t i = 0; i < grid.size();) {
        const double l = grid[i].l_param;
        std::vector<double> betas;
        std::size_t j = i;
        for (; j < grid.size() && grid[j].l_param == l; ++j)
            betas.push_back(grid[j].beta);
        const std::vector<long> hits =
            sim::metric_exceedance_counts(l, betas, draws, cfg.seed, stream++, threads);
        for (std::size_t b = 0; b < betas.size(); ++b) {
            const double p = analytic::cell_pdet(l, betas[b]);
            const double p_hat = static_cast<double>(hits[b]) / static_cast<double>(draws);
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
            const double slack = 0.5 / static_cast<double>(draws);
            const double dev = std::abs(p_hat - p);
            if (dev > 3.0 * sigma + slack) {
                ok = false;
                worst_case += " L=" + fixed(l) + ",beta=" + fixed(betas[b]);
            }
            const double z = sigma > 0.0 ? (dev - slack) / sigma : 0.0;
            worst_z = std::max(worst_z, z);
        }
        i = j;
    }
    std::string detail = std::to_string(grid.size()) + " points, " + std::to_string(draws) +
                         " draws each, max |z| = " + fixed(worst_z);
    if (!ok)
        detail += "; outside 3 sigma:" + worst_case;
    return {"metric Monte Carlo vs cell_pdet", ok, false, detail};
}

std::vector<CheckResult> invariants(const ExperimentConfig& cfg)
{
    std::vector<CheckResult> out;
    const analytic::SignalParams& params = cfg.params;
    const std::vector<double> betas = cfg.beta_grid.betas();

    {
        // The truncated sum equals the sinc^2 integral over |x| < (50.5) W T,
        // whose tail is below 1 / (pi^2 x) + 1 / (2 pi^3 x^2).
        bool ok = true;
        std::string detail;
        for (double wt : {0.2, 0.5, 0.7, 1.0}) {
            const DopplerGrid grid(wt / params.t_per, 5000.0, params.t_per);
            const NonCentralityProfile profile = NonCentralityProfile::expected(params, grid, 50);
            double sum = profile.at(0);
            for (int l = 1; l <= 50; ++l)
                sum += 2.0 * profile.at(l);
            const double ratio = wt * sum / analytic::l_max_param(params);
            const double x = 50.5 * wt;
            const double pi = std::numbers::pi;
            const double tail = 1.0 / (pi * pi * x) + 1.0 / (2.0 * pi * pi * pi * x * x);
            ok = ok && ratio <= 1.0 && 1.0 - ratio <= tail;
            detail += " WT=" + fixed(wt) + ":" + fixed(ratio, 6);
            if (ratio < 0.99)
                detail += " (truncation tail exceeds 1%)";
        }
        out.push_back({"energy conservation (l up to 50)", ok, false, detail.substr(1)});
    }
    {
        bool ok = true;
        for (int i = 10; i <= 150 && ok; ++i) {
            const double wt = i / 100.0;
            const DopplerGrid grid(wt / params.t_per, 5000.0, params.t_per);
            const double l0 = analytic::expected_noncentrality(params, grid, 0);
            const double l1 = analytic::expected_noncentrality(params, grid, 1);
            const double l2 = analytic::expected_noncentrality(params, grid, 2);
            ok = l0 > l1 && l1 > l2;
        }
        out.push_back({"L0 > L1 > L2 for W*T in [0.1, 1.5]", ok, false, "141 widths"});
    }
    {
        bool ok = true;
        double worst_null = 0.0;
        const std::vector<double> ls = {0.0, 0.5, 1, 2, 5, 10, 20, 40, 80};
        for (double beta : betas) {
            worst_null = std::max(worst_null,
                                  std::abs(analytic::cell_pdet(0.0, beta) - analytic::cell_pfa(beta)));
            for (std::size_t i = 1; i < ls.size(); ++i)
                ok = ok && analytic::cell_pdet(ls[i], beta) >= analytic::cell_pdet(ls[i - 1], beta);
        }
        for (double l : ls)
            for (std::size_t b = 1; b < betas.size(); ++b)
                ok = ok && analytic::cell_pdet(l, betas[b]) <= analytic::cell_pdet(l, betas[b - 1]);
        out.push_back({"cell_pdet monotone in L and beta", ok, false, ""});
        out.push_back({"cell_pdet(0, beta) = exp(-beta)", worst_null <= 1e-10, false,
                       "max deviation " + fixed(worst_null)});
    }
    {
        double worst = 0.0;
        for (double beta : betas) {
            for (int k : {1, 3, 10, 50}) {
                const NonCentralityProfile profile = NonCentralityProfile::single_signal(
                    analytic::l_max_param(params));
                const CellDetectionTable cells = CellDetectionTable::from_profile(profile, beta);
                const double naive = analytic::global_pdet_naive(analytic::l_max_param(params),
                                                                 beta, kCodePhases, k);
                worst = std::max(worst, std::abs(analytic::global_pdet_code_first(cells, 0, kCodePhases, k) - naive));
                worst = std::max(worst, std::abs(analytic::global_pdet_doppler_first(cells, 0, kCodePhases, k) - naive));
            }
        }
        out.push_back({"single-signal M=0 reduces to the naive model", worst <= 1e-12, false,
                       "max deviation " + fixed(worst)});
    }
    {
        bool ok = true;
        std::string detail;
        for (double width : cfg.bin_widths_hz) {
            const DopplerGrid grid = cfg.grid(width);
            const NonCentralityProfile profile =
                NonCentralityProfile::expected(params, grid, cfg.l_max);
            const int k = grid.num_bins();
            for (double beta : betas) {
                double prev = -1.0;
                for (int m = 0; m < std::min(k, 4); ++m) {
                    const CellDetectionTable cells = CellDetectionTable::from_profile(profile, beta);
                    const double p = cfg.order == SearchOrder::CodePhaseFirst
                                         ? analytic::global_pdet_code_first(cells, m, kCodePhases, k)
                                         : analytic::global_pdet_doppler_first(cells, m, kCodePhases, k);
                    if (!(p >= 0.0 && p <= 1.0) || p < prev - 1e-15) {
                        ok = false;
                        detail = "W=" + fixed(width) + " beta=" + fixed(beta) + " M=" + std::to_string(m);
                    }
                    prev = p;
                }
            }
        }
        out.push_back({"global P_det in [0,1] and non-decreasing in M", ok, false, detail});
    }
    {
        bool ok = true;
        std::string detail;
        for (double width : cfg.bin_widths_hz) {
            const analytic::RocCurve curve = analytic_roc(cfg, width);
            for (std::size_t i = 0; i < curve.points.size(); ++i) {
                const analytic::RocPoint& p = curve.points[i];
                for (double v : {p.p_fa_cell, p.p_fa_global, p.p_det_naive, p.p_det_code_first,
                                 p.p_det_doppler_first, p.p_det_approx, p.p_det_exact})
                    ok = ok && v >= 0.0 && v <= 1.0;
                // Strict once the global value leaves the rounding plateau at 1.
                if (i > 0) {
                    const double prev = curve.points[i - 1].p_fa_global;
                    if (prev < 1.0 ? !(p.p_fa_global < prev) : p.p_fa_global > prev) {
                        ok = false;
                        detail = "P_FA not decreasing at W=" + fixed(width) + " beta=" + fixed(p.beta);
                    }
                }
                const double knp = p.p_fa_cell * kCodePhases * cfg.grid(width).num_bins();
                if (knp <= 1e-4 && std::abs(p.p_det_approx - p.p_det_code_first) > 1e-3) {
                    ok = false;
                    detail = "approximation off at W=" + fixed(width) + " beta=" + fixed(p.beta);
                }
            }
        }
        out.push_back({"ROC probabilities bounded, P_FA decreasing, small-P_fa approximation",
                       ok, false, detail});
    }
    return out;
}

// Tolerated |quadrature - expected-L| cell P_det outside the documented gap.
constexpr double kExpectedLTolerance = 0.05;

std::vector<CheckResult> expected_l_diagnostic(const ExperimentConfig& cfg)
{
    std::vector<CheckResult> out;
    const std::vector<double> betas = cfg.beta_grid.betas();
    for (double width : cfg.bin_widths_hz) {
        const DopplerGrid grid = cfg.grid(width);
        for (int l = 0; l < kCellOffsets; ++l) {
            const double l_expected = analytic::expected_noncentrality(cfg.params, grid, l);
            double worst = 0.0;
            double at_beta = 0.0;
            for (double beta : betas) {
                const double dev = std::abs(analytic::cell_pdet_exact(cfg.params, grid, l, beta) -
                                            analytic::cell_pdet(l_expected, beta));
                if (dev > worst) {
                    worst = dev;
                    at_beta = beta;
                }
            }
            CheckResult r;
            r.name = "expected-L vs quadrature cell P_det, W=" + fixed(width, 6) +
                     " Hz (W*T=" + fixed(grid.relative_width()) + "), l=" + std::to_string(l);
            r.detail = "max deviation " + fixed(worst) + " at beta=" + fixed(at_beta);
            if (worst > kExpectedLTolerance) {
                if (in_expected_l_gap(l, grid.relative_width()))
                    r.known_gap = true;
                else
                    r.passed = false;
            }
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace

std::vector<CheckResult> run_validation(const ExperimentConfig& cfg, int threads,
                                        std::ostream* progress)
{
    std::vector<CheckResult> all;
    const auto add = [&](CheckResult r) {
        if (progress) {
            *progress << (r.passed ? (r.known_gap ? "GAP " : "PASS") : "FAIL") << "  " << r.name;
            if (r.known_gap)
                *progress << " [known approximation gap]";
            if (!r.detail.empty())
                *progress << ": " << r.detail;
            *progress << '\n';
        }
        all.push_back(std::move(r));
    };
    add(oracle_suite(cfg.seed));
    add(oracle_fixed_instance());
    add(cell_statistics(cfg, threads));
    for (auto& r : invariants(cfg))
        add(std::move(r));
    for (auto& r : expected_l_diagnostic(cfg))
        add(std::move(r));
    return all;
}

int run_command(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opts,
                std::ostream& out, std::ostream& err)
{
    try {
        if (command == "cell-probs") {
            const CsvTable table = cell_probs_table(cfg, opts.with_mc, opts.threads);
            emit(table.str(), opts, out);
            if (opts.svg) {
                std::vector<Series> series;
                const std::vector<double> betas = cfg.beta_grid.betas();
                for (double width : cfg.bin_widths_hz) {
                    const DopplerGrid grid = cfg.grid(width);
                    for (int l = 0; l < kCellOffsets; ++l) {
                        Series s{"W=" + fixed(width, 6) + " l=" + std::to_string(l), betas, {}};
                        const double le = analytic::expected_noncentrality(cfg.params, grid, l);
                        for (double beta : betas)
                            s.y.push_back(analytic::cell_pdet(le, beta));
                        series.push_back(std::move(s));
                    }
                }
                write_atomic(*opts.svg, svg_line_chart("Cell detection probability", "beta",
                                                       "P_det", series, false));
            }
            return kExitOk;
        }
        if (command == "roc" || command == "simulate") {
            const bool mc = command == "simulate" || opts.with_mc;
            const CsvTable table = roc_table(cfg, mc, opts.threads);
            emit(table.str(), opts, out);
            if (opts.svg) {
                std::vector<Series> series;
                for (double width : cfg.bin_widths_hz) {
                    const analytic::RocCurve curve = analytic_roc(cfg, width);
                    Series s{"W=" + fixed(width, 6) + " M=" + std::to_string(curve.accept_half_width),
                             {},
                             {}};
                    for (const auto& p : curve.points) {
                        s.x.push_back(p.p_fa_global);
                        s.y.push_back(cfg.order == SearchOrder::CodePhaseFirst
                                          ? p.p_det_code_first
                                          : p.p_det_doppler_first);
                    }
                    series.push_back(std::move(s));
                }
                write_atomic(*opts.svg,
                             svg_line_chart("Global ROC", "P_FA", "P_DET", series, true));
            }
            return kExitOk;
        }
        if (command == "validate") {
            std::ostringstream report;
            const std::vector<CheckResult> results = run_validation(cfg, opts.threads, &report);
            emit(report.str(), opts, out);
            const auto failed = std::count_if(results.begin(), results.end(),
                                              [](const CheckResult& r) { return !r.passed; });
            if (failed > 0) {
                err << failed << " validation check(s) failed\n";
                return kExitValidationFailure;
            }
            return kExitOk;
        }
        err << "unknown command '" << command << "'\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

}  // namespace acqroc::harness
