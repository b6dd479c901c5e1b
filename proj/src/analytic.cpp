#include "acqroc/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace acqroc::analytic {

using numerics::clamp_probability;
using numerics::pow_complement;

void SignalParams::validate() const
{
    if (!std::isfinite(cn0_dbhz))
        throw std::invalid_argument("cn0_dbhz must be finite");
    if (!(t_per > 0.0) || !std::isfinite(t_per))
        throw std::invalid_argument("t_per must be positive");
}

double l_max_param(const SignalParams& params)
{
    return 2.0 * params.t_per * std::pow(10.0, params.cn0_dbhz / 10.0);
}

DopplerGrid::DopplerGrid(double bin_width_hz, double f_dmax_hz, double t_per)
    : bin_width_(bin_width_hz), f_dmax_(f_dmax_hz), t_per_(t_per)
{
    if (!(bin_width_hz > 0.0) || !std::isfinite(bin_width_hz))
        throw std::invalid_argument("bin width must be positive");
    if (!(f_dmax_hz > 0.0) || !std::isfinite(f_dmax_hz))
        throw std::invalid_argument("maximum Doppler must be positive");
    if (!(t_per > 0.0))
        throw std::invalid_argument("t_per must be positive");
    // Guard the ceiling against 2*5000/500 landing a hair above 20.
    const double ratio = 2.0 * f_dmax_hz / bin_width_hz;
    num_bins_ = std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
}

double DopplerGrid::bin_center_hz(int bin) const
{
    return (bin - 0.5 * (num_bins_ - 1)) * bin_width_;
}

NonCentralityProfile::NonCentralityProfile(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty())
        throw std::invalid_argument("non-centrality profile needs at least L_0");
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("non-centrality values must be finite and non-negative");
}

NonCentralityProfile NonCentralityProfile::expected(const SignalParams& params,
                                                    const DopplerGrid& grid, int l_max)
{
    if (l_max < 0 || l_max > 50)
        throw std::invalid_argument("l_max must lie in [0, 50]");
    std::vector<double> values(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l)
        values[static_cast<std::size_t>(l)] = expected_noncentrality(params, grid, l);
    return NonCentralityProfile(std::move(values));
}

NonCentralityProfile NonCentralityProfile::single_signal(double l_correct)
{
    return NonCentralityProfile({l_correct});
}

double NonCentralityProfile::at(int offset) const
{
    const int l = std::abs(offset);
    return l <= l_max() ? values_[static_cast<std::size_t>(l)] : 0.0;
}

std::string_view to_string(SearchOrder order)
{
    return order == SearchOrder::CodePhaseFirst ? "code-first" : "doppler-first";
}

void SearchPolicy::validate(int num_bins) const
{
    if (accept_half_width < 0)
        throw std::invalid_argument("M must be non-negative");
    if (accept_half_width >= num_bins)
        throw std::invalid_argument("M = " + std::to_string(accept_half_width) +
                                    " must be smaller than K = " + std::to_string(num_bins));
    if (!(threshold >= 0.0))
        throw std::invalid_argument("threshold must be non-negative");
}

CellDetectionTable::CellDetectionTable(double p_fa, int span, std::vector<double> p_det)
    : p_fa_(p_fa), span_(span), p_det_(std::move(p_det))
{
    if (span < 0 || p_det_.size() != static_cast<std::size_t>(2 * span + 1))
        throw std::invalid_argument("cell table needs 2*span+1 entries");
    if (!(p_fa >= 0.0 && p_fa <= 1.0))
        throw std::invalid_argument("cell P_fa outside [0, 1]");
    for (double p : p_det_)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("cell P_det outside [0, 1]");
}

CellDetectionTable CellDetectionTable::symmetric(double p_fa, std::span<const double> by_offset)
{
    if (by_offset.empty())
        throw std::invalid_argument("cell table needs the offset-0 entry");
    const int span = static_cast<int>(by_offset.size()) - 1;
    std::vector<double> p(2 * by_offset.size() - 1);
    for (int s = -span; s <= span; ++s)
        p[static_cast<std::size_t>(s + span)] = by_offset[static_cast<std::size_t>(std::abs(s))];
    return CellDetectionTable(p_fa, span, std::move(p));
}

CellDetectionTable CellDetectionTable::from_profile(const NonCentralityProfile& profile,
                                                    double beta, const ToleranceConfig& tol)
{
    std::vector<double> by_offset;
    by_offset.reserve(profile.values().size());
    for (double l : profile.values())
        by_offset.push_back(cell_pdet(l, beta, tol));
    return symmetric(cell_pfa(beta), by_offset);
}

double CellDetectionTable::at(int offset) const
{
    if (offset < -span_ || offset > span_)
        return p_fa_;
    return p_det_[static_cast<std::size_t>(offset + span_)];
}

namespace {

// Antiderivative of sinc^2: (Si(2 pi x) - sin^2(pi x) / (pi x)) / pi.
double sinc2_antiderivative(double x)
{
    if (x == 0.0)
        return 0.0;
    const double s = numerics::sin_pi(x);
    return (numerics::sine_integral(2.0 * std::numbers::pi * x) -
            s * s / (std::numbers::pi * x)) /
           std::numbers::pi;
}

void check_dims(int n, int k)
{
    if (n < 1 || k < 1)
        throw std::invalid_argument("N and K must be at least 1");
}

void check_accept(int m, int k)
{
    if (m < 0 || m >= k)
        throw std::invalid_argument("M = " + std::to_string(m) + " must lie in [0, K = " +
                                    std::to_string(k) + ")");
}

// sum_{n=n'}^{K'-1} noise(n) * prod_{l=1}^{n} (1 - P_det(q - l)) for one q.
template <class NoiseFactor>
double stop_sum(const CellDetectionTable& cells, int q, int k, NoiseFactor noise)
{
    const int k_prime = std::min(k, k + q);
    const int n_prime = std::max(0, q);
    double prod = 1.0;
    double sum = 0.0;
    for (int n = 0; n < k_prime; ++n) {
        if (n > 0)
            prod *= 1.0 - cells.at(q - n);
        if (n >= n_prime)
            sum += noise(n) * prod;
    }
    return sum;
}

}  // namespace

double expected_noncentrality(const SignalParams& params, const DopplerGrid& grid, int l)
{
    if (l < 0)
        throw std::invalid_argument("bin offset must be non-negative");
    const double wt = grid.bin_width_hz() * params.t_per;
    const double scale = l_max_param(params) / wt;
    if (l == 0) {
        const double half = 0.5 * wt;
        const double s = numerics::sin_pi(half);
        const double integral =
            (2.0 * numerics::sine_integral(std::numbers::pi * wt) -
             4.0 * s * s / (std::numbers::pi * wt)) /
            std::numbers::pi;
        return scale * integral;
    }
    const double lower = (2.0 * l - 1.0) * 0.5 * wt;
    const double upper = (2.0 * l + 1.0) * 0.5 * wt;
    return std::max(0.0, scale * (sinc2_antiderivative(upper) - sinc2_antiderivative(lower)));
}

double cell_pfa(double beta)
{
    if (!(beta >= 0.0))
        throw std::invalid_argument("threshold must be non-negative");
    return std::exp(-beta);
}

double cell_pdet(double l_param, double beta, const ToleranceConfig& tol)
{
    if (!(l_param >= 0.0))
        throw std::invalid_argument("non-centrality must be non-negative");
    if (l_param == 0.0)
        return cell_pfa(beta);
    if (!(beta >= 0.0))
        throw std::invalid_argument("threshold must be non-negative");
    return numerics::marcum_q1(std::sqrt(l_param), std::sqrt(2.0 * beta), tol);
}

double cell_pdet_exact(const SignalParams& params, const DopplerGrid& grid, int l, double beta,
                       const ToleranceConfig& tol)
{
    if (l < 0)
        throw std::invalid_argument("bin offset must be non-negative");
    const double wt = grid.bin_width_hz() * params.t_per;
    const double l_max = l_max_param(params);
    const double lower = (2.0 * l - 1.0) * 0.5 * wt;
    const double upper = (2.0 * l + 1.0) * 0.5 * wt;
    const auto integrand = [&](double x) {
        const double s = numerics::sinc(x);
        return cell_pdet(l_max * s * s, beta, tol);
    };
    return clamp_probability(numerics::integrate(integrand, lower, upper, tol) / wt);
}

double global_pfa(double pfa_cell, int n, int k)
{
    check_dims(n, k);
    return numerics::one_minus_pow_complement(pfa_cell, static_cast<double>(n) * k);
}

double global_pdet_naive(double l_correct, double beta, int n, int k,
                         const ToleranceConfig& tol)
{
    check_dims(n, k);
    const double nk = static_cast<double>(n) * k;
    const double pfa = cell_pfa(beta);
    return clamp_probability(numerics::pow_complement_ratio(pfa, nk) / nk *
                             cell_pdet(l_correct, beta, tol));
}

double global_pdet_code_first(const CellDetectionTable& cells, int m, int n, int k)
{
    check_dims(n, k);
    check_accept(m, k);
    const double pfa = cells.p_fa();
    const double per_bin_noise = static_cast<double>(n - 1);
    const auto noise = [&](int bins) { return pow_complement(pfa, bins * per_bin_noise); };
    double total = 0.0;
    for (int q = -m; q <= m; ++q)
        total += cells.at(q) * stop_sum(cells, q, k, noise);
    const double prefactor =
        numerics::pow_complement_ratio(pfa, n) / (static_cast<double>(k) * n);
    return clamp_probability(prefactor * total);
}

double global_pdet_doppler_first(const CellDetectionTable& cells, int m, int n, int k)
{
    check_dims(n, k);
    check_accept(m, k);
    const double pfa = cells.p_fa();
    const auto no_noise = [](int) { return 1.0; };
    double total = 0.0;
    for (int q = -m; q <= m; ++q)
        total += cells.at(q) * stop_sum(cells, q, k, no_noise);
    // (1 - Pbar^(KN)) / (1 - Pbar^K) -> N as P_fa -> 0.
    double column_ratio = static_cast<double>(n);
    if (pfa >= 1e-300)
        column_ratio = numerics::one_minus_pow_complement(pfa, static_cast<double>(k) * n) /
                       numerics::one_minus_pow_complement(pfa, k);
    return clamp_probability(column_ratio / (static_cast<double>(k) * n) * total);
}

double global_pdet_approx(const CellDetectionTable& cells, int m, int k)
{
    check_dims(1, k);
    check_accept(m, k);
    const auto no_noise = [](int) { return 1.0; };
    double total = 0.0;
    for (int q = -m; q <= m; ++q)
        total += cells.at(q) * stop_sum(cells, q, k, no_noise);
    return clamp_probability(total / k);
}

double global_pdet_code_first(const NonCentralityProfile& profile, const SearchPolicy& policy,
                              int n, int k, const ToleranceConfig& tol)
{
    policy.validate(k);
    return global_pdet_code_first(CellDetectionTable::from_profile(profile, policy.threshold, tol),
                                  policy.accept_half_width, n, k);
}

double global_pdet_doppler_first(const NonCentralityProfile& profile,
                                 const SearchPolicy& policy, int n, int k,
                                 const ToleranceConfig& tol)
{
    policy.validate(k);
    return global_pdet_doppler_first(
        CellDetectionTable::from_profile(profile, policy.threshold, tol),
        policy.accept_half_width, n, k);
}

double global_pdet_approx(const NonCentralityProfile& profile, const SearchPolicy& policy, int k,
                          const ToleranceConfig& tol)
{
    policy.validate(k);
    return global_pdet_approx(CellDetectionTable::from_profile(profile, policy.threshold, tol),
                              policy.accept_half_width, k);
}

double global_pdet_marginalized(const SignalParams& params, const DopplerGrid& grid,
                                const SearchPolicy& policy, int n, int l_max,
                                const ToleranceConfig& tol)
{
    const int k = grid.num_bins();
    policy.validate(k);
    check_dims(n, k);
    if (l_max < 0)
        throw std::invalid_argument("l_max must be non-negative");
    const double w = grid.bin_width_hz();
    const double t = params.t_per;
    const double l_peak = l_max_param(params);
    const double beta = policy.threshold;
    const double pfa = cell_pfa(beta);

    const auto integrand = [&](double delta) {
        std::vector<double> p(2 * static_cast<std::size_t>(l_max) + 1);
        for (int s = -l_max; s <= l_max; ++s) {
            const double g = numerics::sinc((s * w + delta) * t);
            p[static_cast<std::size_t>(s + l_max)] = cell_pdet(l_peak * g * g, beta, tol);
        }
        const CellDetectionTable cells(pfa, l_max, std::move(p));
        return policy.order == SearchOrder::CodePhaseFirst
                   ? global_pdet_code_first(cells, policy.accept_half_width, n, k)
                   : global_pdet_doppler_first(cells, policy.accept_half_width, n, k);
    };
    return clamp_probability(numerics::integrate(integrand, -0.5 * w, 0.5 * w, tol) / w);
}

RocCurve roc_curve(const SignalParams& params, const DopplerGrid& grid, SearchOrder order,
                   int accept_half_width, std::span<const double> beta_grid, int l_max, int n,
                   const ToleranceConfig& tol)
{
    params.validate();
    if (beta_grid.empty())
        throw std::invalid_argument("threshold grid is empty");
    for (std::size_t i = 1; i < beta_grid.size(); ++i)
        if (!(beta_grid[i] > beta_grid[i - 1]))
            throw std::invalid_argument("threshold grid must be strictly increasing");

    const int k = grid.num_bins();
    SearchPolicy policy{order, accept_half_width, beta_grid.front()};
    policy.validate(k);

    const NonCentralityProfile profile = NonCentralityProfile::expected(params, grid, l_max);
    const double l_peak = l_max_param(params);

    RocCurve curve;
    curve.bin_width_hz = grid.bin_width_hz();
    curve.accept_half_width = accept_half_width;
    curve.points.reserve(beta_grid.size());
    for (double beta : beta_grid) {
        policy.threshold = beta;
        RocPoint pt;
        pt.beta = beta;
        pt.p_fa_cell = cell_pfa(beta);
        for (int l = 0; l <= l_max; ++l) {
            pt.p_det_cell.push_back(cell_pdet(profile.at(l), beta, tol));
            pt.p_det_cell_exact.push_back(cell_pdet_exact(params, grid, l, beta, tol));
        }
        const CellDetectionTable cells = CellDetectionTable::symmetric(pt.p_fa_cell, pt.p_det_cell);
        pt.p_fa_global = global_pfa(pt.p_fa_cell, n, k);
        pt.p_det_naive = global_pdet_naive(l_peak, beta, n, k, tol);
        pt.p_det_code_first = global_pdet_code_first(cells, accept_half_width, n, k);
        pt.p_det_doppler_first = global_pdet_doppler_first(cells, accept_half_width, n, k);
        pt.p_det_approx = global_pdet_approx(cells, accept_half_width, k);
        pt.p_det_exact = global_pdet_marginalized(params, grid, policy, n, l_max, tol);
        curve.points.push_back(std::move(pt));
    }
    return curve;
}

}  // namespace acqroc::analytic
