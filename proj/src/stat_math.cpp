#include "encscan/stat_math.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "encscan/error.hpp"

namespace encscan {

namespace {

constexpr double clamp_slack = 1e-12;
constexpr double rel_eps = 1e-15;
constexpr int max_iterations = 1'000'000;
constexpr double tiny = 1e-300;

// Series for the lower regularized gamma P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x, double log_prefactor) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < max_iterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * rel_eps) break;
    }
    return sum * std::exp(log_prefactor);
}

// Continued fraction for Q(a, x) (modified Lentz), returned as a log so the
// far tail can be detected before exp() underflows.
double log_gamma_q_continued_fraction(double a, double x, double log_prefactor) {
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iterations; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < rel_eps) break;
    }
    return log_prefactor + std::log(h);
}

} // namespace

probability_value probability_value::from_raw(double raw) {
    if (std::isnan(raw) || raw < -clamp_slack || raw > 1.0 + clamp_slack) {
        throw error(errc::domain_error, "probability outside [0, 1]");
    }
    probability_value p;
    if (raw < underflow_floor) {
        p.value_ = 0.0;
        p.underflow_ = raw > 0.0;
        return p;
    }
    p.value_ = raw > 1.0 ? 1.0 : raw;
    return p;
}

probability_value probability_value::underflowed() noexcept {
    probability_value p;
    p.underflow_ = true;
    return p;
}

double erfc(double x) {
    if (!std::isfinite(x)) {
        throw error(errc::domain_error, "erfc of a non-finite value");
    }
    return std::erfc(x);
}

double normal_cdf(double x) {
    return 0.5 * erfc(-x / std::numbers::sqrt2);
}

double normal_upper_tail(double x) {
    return 0.5 * erfc(x / std::numbers::sqrt2);
}

probability_value regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw error(errc::domain_error, "regularized_gamma_q requires a > 0");
    }
    if (std::isnan(x) || x < 0.0) {
        throw error(errc::domain_error, "regularized_gamma_q requires x >= 0");
    }
    if (x == 0.0) return probability_value::from_raw(1.0);
    if (std::isinf(x)) return probability_value::underflowed();

    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        double q = 1.0 - gamma_p_series(a, x, log_prefactor);
        return probability_value::from_raw(q);
    }
    double log_q = log_gamma_q_continued_fraction(a, x, log_prefactor);
    if (log_q < std::log(underflow_floor)) return probability_value::underflowed();
    return probability_value::from_raw(std::exp(log_q));
}

probability_value chi_square_survival(double stat, int dof) {
    if (dof < 1) {
        throw error(errc::domain_error, "chi-square needs at least one degree of freedom");
    }
    if (std::isnan(stat) || stat < 0.0) {
        throw error(errc::domain_error, "chi-square statistic must be non-negative");
    }
    return regularized_gamma_q(dof / 2.0, stat / 2.0);
}

} // namespace encscan
