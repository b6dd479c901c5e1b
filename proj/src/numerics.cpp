#include "acqroc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace acqroc::numerics {

void ToleranceConfig::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::invalid_argument("tolerances must be strictly positive");
    if (max_terms < 16)
        throw std::invalid_argument("max_terms must be at least 16");
    if (quadrature_points < 8)
        throw std::invalid_argument("quadrature_points must be at least 8");
}

double sin_pi(double x)
{
    double r = std::fmod(x, 2.0);
    if (r > 1.0)
        r -= 2.0;
    else if (r < -1.0)
        r += 2.0;
    if (r > 0.5)
        r = 1.0 - r;
    else if (r < -0.5)
        r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    return sin_pi(x) / (std::numbers::pi * x);
}

namespace {

constexpr double kSiSwitch = 4.0;

double si_taylor(double x)
{
    const double x2 = x * x;
    double term = x;  // (-1)^k x^(2k+1) / (2k+1)!
    double sum = x;
    for (int k = 0; k < 200; ++k) {
        term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        const double contrib = term / (2.0 * k + 3.0);
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * std::abs(sum))
            break;
    }
    return sum;
}

// Continued fraction for e^{ix} E_1(ix) (modified Lentz). Its real and
// imaginary parts are the auxiliary functions g(x) and -f(x), so that
// Si(x) = pi/2 - f(x) cos x - g(x) sin x.
double si_auxiliary(double x)
{
    constexpr double tiny = 1e-300;
    std::complex<double> b(1.0, x);
    std::complex<double> c = 1.0 / tiny;
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 1; i < 1000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const std::complex<double> del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16)
            break;
    }
    h *= std::complex<double>(std::cos(x), -std::sin(x));
    return std::numbers::pi / 2.0 + h.imag();
}

}  // namespace

double sine_integral(double x)
{
    const double ax = std::abs(x);
    const double value = ax <= kSiSwitch ? si_taylor(ax) : si_auxiliary(ax);
    return x < 0.0 ? -value : value;
}

namespace {

// Poisson(mean) probabilities over the window where they exceed `cutoff`,
// generated outward from the mode so that nothing underflows.
struct PoissonWindow {
    long first = 0;
    std::vector<double> pmf;

    long last() const { return first + static_cast<long>(pmf.size()) - 1; }
};

PoissonWindow poisson_window(double mean, double cutoff, std::size_t max_terms)
{
    PoissonWindow w;
    if (mean == 0.0) {
        w.pmf = {1.0};
        return w;
    }
    const long mode = static_cast<long>(std::floor(mean));
    const double log_mode = -mean + mode * std::log(mean) - std::lgamma(mode + 1.0);
    const double p_mode = std::exp(log_mode);

    std::vector<double> below;
    double p = p_mode;
    for (long j = mode; j > 0; --j) {
        p *= j / mean;
        if (p < cutoff)
            break;
        below.push_back(p);
    }
    std::vector<double> above;
    p = p_mode;
    for (long j = mode + 1;; ++j) {
        p *= mean / j;
        if (p < cutoff && j > mean)
            break;
        above.push_back(p);
        if (above.size() > max_terms)
            break;
    }
    if (below.size() + above.size() + 1 > max_terms)
        throw ConsistencyError("Marcum Q series exceeded max_terms for Poisson mean " +
                               std::to_string(mean));

    w.first = mode - static_cast<long>(below.size());
    w.pmf.reserve(below.size() + above.size() + 1);
    w.pmf.assign(below.rbegin(), below.rend());
    w.pmf.push_back(p_mode);
    w.pmf.insert(w.pmf.end(), above.begin(), above.end());
    return w;
}

}  // namespace

double marcum_q1(double a, double b, const ToleranceConfig& tol)
{
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0)
        throw std::domain_error("marcum_q1 requires finite non-negative arguments");
    if (b == 0.0)
        return 1.0;

    // Q_1(a, b) = P(Y <= X) for independent X ~ Poisson(a^2/2) and
    // Y ~ Poisson(b^2/2). The sum over X weights the Poisson CDF of Y.
    const double x = 0.5 * a * a;
    const double y = 0.5 * b * b;
    const double cutoff = tol.abs_tol * 1e-8;
    const PoissonWindow px = poisson_window(x, cutoff, tol.max_terms);
    const PoissonWindow py = poisson_window(y, cutoff, tol.max_terms);

    // Sum the smaller tail directly; the other is its complement.
    const bool direct = b * b > a * a + 4.0;
    std::vector<double> tail(py.pmf.size());
    if (direct) {
        // tail[i] = P(Y <= py.first + i)
        double acc = 0.0;
        for (std::size_t i = 0; i < py.pmf.size(); ++i)
            tail[i] = acc += py.pmf[i];
    } else {
        // tail[i] = P(Y > py.first + i)
        double acc = 0.0;
        for (std::size_t i = py.pmf.size(); i-- > 0;) {
            tail[i] = acc;
            acc += py.pmf[i];
        }
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < px.pmf.size(); ++i) {
        const long k = px.first + static_cast<long>(i);
        double t;
        if (k < py.first)
            t = direct ? 0.0 : 1.0;
        else if (k > py.last())
            t = direct ? 1.0 : 0.0;
        else
            t = tail[static_cast<std::size_t>(k - py.first)];
        sum += px.pmf[i] * t;
    }
    return clamp_probability(direct ? sum : 1.0 - sum);
}

double one_minus_pow_complement(double p, double n)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("probability outside [0, 1]");
    if (!(n >= 0.0))
        throw std::domain_error("exponent must be non-negative");
    if (p == 0.0 || n == 0.0)
        return 0.0;
    if (p == 1.0)
        return 1.0;
    return clamp_probability(-std::expm1(n * std::log1p(-p)));
}

double pow_complement(double p, double n)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("probability outside [0, 1]");
    if (!(n >= 0.0))
        throw std::domain_error("exponent must be non-negative");
    if (n == 0.0)
        return 1.0;
    if (p == 1.0)
        return 0.0;
    return std::exp(n * std::log1p(-p));
}

double pow_complement_ratio(double p, double n)
{
    if (p < 1e-300) {
        if (p < 0.0)
            throw std::domain_error("probability outside [0, 1]");
        return n;
    }
    return one_minus_pow_complement(p, n) / p;
}

double clamp_probability(double p)
{
    constexpr double slack = 1e-9;
    if (!(p >= -slack && p <= 1.0 + slack))
        throw ConsistencyError("probability " + std::to_string(p) + " outside [0, 1]");
    return std::clamp(p, 0.0, 1.0);
}

namespace {

GaussLegendreRule compute_rule(std::size_t order)
{
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double n = static_cast<double>(order);
    for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (std::size_t k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (order == 1)
                p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16)
                break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[order - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(std::size_t order)
{
    if (order < 2)
        throw std::invalid_argument("Gauss-Legendre order must be at least 2");
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<const GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[order];
    if (!slot)
        slot = std::make_unique<const GaussLegendreRule>(compute_rule(order));
    return *slot;
}

}  // namespace acqroc::numerics
