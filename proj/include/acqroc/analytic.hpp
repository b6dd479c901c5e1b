#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "acqroc/numerics.hpp"

namespace acqroc::analytic {

using numerics::ToleranceConfig;

/// Carrier-to-noise density and coherent integration period.
struct SignalParams {
    double cn0_dbhz = 40.0;
    double t_per = 1e-3;  // seconds

    void validate() const;
};

/// Non-centrality of the correct cell with no Doppler loss:
/// 2 * T_per * C/N0 (linear).
double l_max_param(const SignalParams& params);

/// Uniform partition of the Doppler search range [-f_dmax, f_dmax] into K
/// bins of width W, K = ceil(2 f_dmax / W). The grid is centered, so it may
/// overshoot the range slightly when 2 f_dmax / W is not an integer.
class DopplerGrid {
public:
    DopplerGrid(double bin_width_hz, double f_dmax_hz, double t_per);

    double bin_width_hz() const { return bin_width_; }
    double f_dmax_hz() const { return f_dmax_; }
    double t_per() const { return t_per_; }
    int num_bins() const { return num_bins_; }
    /// W * T_per.
    double relative_width() const { return bin_width_ * t_per_; }
    double bin_center_hz(int bin) const;

private:
    double bin_width_;
    double f_dmax_;
    double t_per_;
    int num_bins_;
};

/// Expected non-centrality of the correct-phase cell per Doppler bin
/// offset l = 0..l_max. Offsets beyond l_max carry no signal. One value
/// serves both +l and -l.
class NonCentralityProfile {
public:
    explicit NonCentralityProfile(std::vector<double> values);

    /// Profile computed from the residual-Doppler expectation per offset.
    static NonCentralityProfile expected(const SignalParams& params, const DopplerGrid& grid,
                                         int l_max = 2);
    /// Only the correct bin carries signal.
    static NonCentralityProfile single_signal(double l_correct);

    int l_max() const { return static_cast<int>(values_.size()) - 1; }
    std::span<const double> values() const { return values_; }
    /// L for a signed bin offset; 0 beyond l_max.
    double at(int offset) const;

private:
    std::vector<double> values_;
};

enum class SearchOrder { CodePhaseFirst, DopplerFirst };

std::string_view to_string(SearchOrder order);

struct SearchPolicy {
    SearchOrder order = SearchOrder::CodePhaseFirst;
    int accept_half_width = 0;  // M
    double threshold = 0.0;     // beta, normalized units

    /// Throws std::invalid_argument unless 0 <= M < num_bins and beta >= 0.
    void validate(int num_bins) const;
};

/// Threshold-crossing probabilities of the correct-phase cells indexed by
/// signed bin offset (bin - correct bin). Offsets outside [-span, span]
/// are noise-only and cross with the cell false-alarm probability.
class CellDetectionTable {
public:
    CellDetectionTable(double p_fa, int span, std::vector<double> p_det_by_signed_offset);

    /// Symmetric table built from one value per |offset|.
    static CellDetectionTable symmetric(double p_fa, std::span<const double> p_det_by_offset);
    /// Cell detection probabilities cell_pdet(profile[l], beta).
    static CellDetectionTable from_profile(const NonCentralityProfile& profile, double beta,
                                           const ToleranceConfig& tol = {});

    double p_fa() const { return p_fa_; }
    double at(int offset) const;

private:
    double p_fa_;
    int span_;
    std::vector<double> p_det_;
};

// Expected non-centrality and cell probabilities.

/// E[L] for the bins at offset +/-l, with the residual Doppler uniform on
/// [(2l-1) W/2, (2l+1) W/2]. Equals L_max / (W T) times the integral of
/// sinc^2 over the normalized bin, evaluated through the sine integral.
double expected_noncentrality(const SignalParams& params, const DopplerGrid& grid, int l);

/// exp(-beta) with the decision metric normalized to unit noise variance.
double cell_pfa(double beta);

/// Q_1(sqrt(L), sqrt(2 beta)).
double cell_pdet(double l_param, double beta, const ToleranceConfig& tol = {});

/// Detection probability of an offset-l cell averaged over the uniform
/// residual Doppler, by Gauss-Legendre quadrature of
/// Q_1(sqrt(L_max sinc^2(df T)), sqrt(2 beta)).
double cell_pdet_exact(const SignalParams& params, const DopplerGrid& grid, int l, double beta,
                       const ToleranceConfig& tol = {});

// Global probabilities for a serial threshold search over N code phases and
// K Doppler bins, correct cell uniform over the search space.

/// 1 - (1 - P_fa)^(N K).
double global_pfa(double pfa_cell, int n, int k);

/// Single-signal-cell detection probability:
/// (1 / (N K)) * (1 - (1 - P_fa)^(N K)) / P_fa * P_det(L).
double global_pdet_naive(double l_correct, double beta, int n, int k,
                         const ToleranceConfig& tol = {});

/// Search all code phases of a Doppler bin before moving on. Stopping at
/// the correct phase within M bins of the correct one counts as detection.
double global_pdet_code_first(const CellDetectionTable& cells, int m, int n, int k);
double global_pdet_code_first(const NonCentralityProfile& profile, const SearchPolicy& policy,
                              int n, int k, const ToleranceConfig& tol = {});

/// Search all Doppler bins of a code phase before moving on.
double global_pdet_doppler_first(const CellDetectionTable& cells, int m, int n, int k);
double global_pdet_doppler_first(const NonCentralityProfile& profile,
                                 const SearchPolicy& policy, int n, int k,
                                 const ToleranceConfig& tol = {});

/// Small-P_fa limit shared by both orders (no N dependence).
double global_pdet_approx(const CellDetectionTable& cells, int m, int k);
double global_pdet_approx(const NonCentralityProfile& profile, const SearchPolicy& policy,
                          int k, const ToleranceConfig& tol = {});

/// Refined global detection probability averaged over the realized residual
/// Doppler instead of using E[L]: the correct-bin residual delta is uniform
/// on [-W/2, W/2], the bin at signed offset s sees L_max sinc^2((sW + delta) T)
/// for |s| <= l_max, and the order-specific formula is integrated over delta.
double global_pdet_marginalized(const SignalParams& params, const DopplerGrid& grid,
                                const SearchPolicy& policy, int n, int l_max = 2,
                                const ToleranceConfig& tol = {});

// ROC assembly.

struct McEstimate {
    double p_det = 0.0;
    double p_fa = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long trials = 0;
};

struct RocPoint {
    double beta = 0.0;
    double p_fa_cell = 0.0;
    /// Cell P_det for offsets 0..l_max, expected-L and quadrature variants.
    std::vector<double> p_det_cell;
    std::vector<double> p_det_cell_exact;
    double p_fa_global = 0.0;
    double p_det_naive = 0.0;
    double p_det_code_first = 0.0;
    double p_det_doppler_first = 0.0;
    double p_det_approx = 0.0;
    /// Marginalized refined model for the configured search order.
    double p_det_exact = 0.0;
    std::optional<McEstimate> mc;
};

struct RocCurve {
    double bin_width_hz = 0.0;
    int accept_half_width = 0;
    std::vector<RocPoint> points;
};

/// One RocPoint per threshold. The naive column uses L_max in the correct
/// bin. Throws std::invalid_argument unless beta_grid is non-empty and
/// strictly increasing.
RocCurve roc_curve(const SignalParams& params, const DopplerGrid& grid, SearchOrder order,
                   int accept_half_width, std::span<const double> beta_grid, int l_max = 2,
                   int n = 1023, const ToleranceConfig& tol = {});

}  // namespace acqroc::analytic
