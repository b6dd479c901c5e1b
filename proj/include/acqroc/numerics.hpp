#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace acqroc::numerics {

/// Accuracy knobs shared by the series and quadrature routines.
struct ToleranceConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_terms = 10'000;
    std::size_t quadrature_points = 128;

    /// Throws std::invalid_argument when a field violates its bound.
    void validate() const;
};

/// Thrown when a computed probability leaves [0, 1] by more than the
/// rounding slack, or when an iterative routine fails to converge.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

/// Normalized sinc, sin(pi x) / (pi x), equal to 1 at x = 0.
double sinc(double x);

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
double sine_integral(double x);

/// First-order Marcum Q-function Q_1(a, b), the right tail of a
/// non-central chi-square variable with 2 degrees of freedom and
/// non-centrality a^2, evaluated at b^2.
///
/// Arguments up to about 50 are supported. Throws std::domain_error on
/// negative or non-finite input.
double marcum_q1(double a, double b, const ToleranceConfig& tol = {});

/// 1 - (1 - p)^n without cancellation for small p. The exponent may be
/// fractional; p must lie in [0, 1] and n must be non-negative.
double one_minus_pow_complement(double p, double n);

/// (1 - p)^n evaluated in log space; 0^0 is taken as 1.
double pow_complement(double p, double n);

/// (1 - (1 - p)^n) / p, with the p -> 0 limit n substituted below 1e-300.
double pow_complement_ratio(double p, double n);

/// Clamps rounding excursions of a probability into [0, 1]. Values more
/// than 1e-9 outside the interval raise ConsistencyError.
double clamp_probability(double p);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rules are computed once per order and cached for the process lifetime.
const GaussLegendreRule& gauss_legendre(std::size_t order);

/// Integrates f over [lo, hi] with Gauss-Legendre of the configured
/// order, doubling the order until successive estimates agree to
/// rel_tol (or abs_tol). Throws ConsistencyError past max_terms nodes.
template <class F>
double integrate(F&& f, double lo, double hi, const ToleranceConfig& tol = {});

}  // namespace acqroc::numerics

#include "acqroc/detail/integrate.ipp"
