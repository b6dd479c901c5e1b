#pragma once

#include <cmath>
#include <string>

namespace acqroc::numerics {

namespace detail {

template <class F>
double apply_rule(F& f, const GaussLegendreRule& rule, double lo, double hi)
{
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

}  // namespace detail

template <class F>
double integrate(F&& f, double lo, double hi, const ToleranceConfig& tol)
{
    if (lo == hi)
        return 0.0;
    std::size_t order = tol.quadrature_points;
    double previous = detail::apply_rule(f, gauss_legendre(order), lo, hi);
    while (2 * order <= tol.max_terms) {
        order *= 2;
        const double current = detail::apply_rule(f, gauss_legendre(order), lo, hi);
        const double diff = std::abs(current - previous);
        if (diff <= tol.abs_tol || diff <= tol.rel_tol * std::abs(current))
            return current;
        previous = current;
    }
    throw ConsistencyError("quadrature did not converge on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "] within " + std::to_string(tol.max_terms) +
                           " nodes");
}

}  // namespace acqroc::numerics
