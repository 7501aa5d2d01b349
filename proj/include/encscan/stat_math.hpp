#pragma once

namespace encscan {

/// A probability in [0, 1]. Results that fall below 1e-300 are stored as 0
/// with `underflow` set.
class probability_value {
public:
    probability_value() = default;

    /// Clamps into [0, 1]; throws domain_error if `raw` strays further than
    /// 1e-12 outside the interval or is NaN.
    static probability_value from_raw(double raw);
    static probability_value underflowed() noexcept;

    double value() const noexcept { return value_; }
    bool underflow() const noexcept { return underflow_; }
    operator double() const noexcept { return value_; }

private:
    double value_ = 0.0;
    bool underflow_ = false;
};

inline constexpr double underflow_floor = 1e-300;

double erfc(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal upper tail, 1 - normal_cdf(x), without cancellation for large x.
double normal_upper_tail(double x);

/// Q(a, x) = Gamma(a, x) / Gamma(a).
probability_value regularized_gamma_q(double a, double x);

probability_value chi_square_survival(double stat, int dof);

} // namespace encscan
