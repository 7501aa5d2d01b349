#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "encscan/error.hpp"
#include "encscan/stat_math.hpp"

using namespace encscan;

namespace {

// Composite Simpson on [x, x + width] of t^(a-1) e^-t / Gamma(a).
double upper_gamma_by_quadrature(double a, double x) {
    const double width = 80.0 + a;
    const int n = 200000;
    const double h = width / n;
    auto f = [a](double t) { return t <= 0.0 ? 0.0 : std::exp((a - 1) * std::log(t) - t - std::lgamma(a)); };
    double sum = f(x) + f(x + width);
    for (int i = 1; i < n; ++i) sum += f(x + i * h) * (i % 2 ? 4 : 2);
    return sum * h / 3;
}

double poisson_tail(int n, double x) {
    double term = 1, sum = 1;
    for (int k = 1; k < n; ++k) {
        term *= x / k;
        sum += term;
    }
    return std::exp(-x) * sum;
}

} // namespace

TEST_CASE("erfc") {
    CHECK(encscan::erfc(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(encscan::erfc(10.0) < 1e-40);
    CHECK(encscan::erfc(0.4472136) == doctest::Approx(0.527089252708).epsilon(1e-9));
    CHECK(encscan::erfc(-1.0) == doctest::Approx(2.0 - encscan::erfc(1.0)));
    CHECK_THROWS_AS(encscan::erfc(std::numeric_limits<double>::quiet_NaN()), error);
}

TEST_CASE("normal distribution helpers") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_upper_tail(10.0) == doctest::Approx(7.61985302416e-24).epsilon(1e-9));
    CHECK(normal_cdf(-3.0) + normal_upper_tail(-3.0) == doctest::Approx(1.0));
}

TEST_CASE("regularized_gamma_q closed forms") {
    CHECK(regularized_gamma_q(3.7, 0.0).value() == 1.0);
    CHECK(regularized_gamma_q(1.0, 1.0).value() == doctest::Approx(0.367879441171).epsilon(1e-11));
    for (double x : {0.01, 0.3, 1.0, 2.5, 7.0, 30.0, 200.0}) {
        CAPTURE(x);
        CHECK(regularized_gamma_q(1.0, x).value() == doctest::Approx(std::exp(-x)).epsilon(1e-12));
        CHECK(regularized_gamma_q(0.5, x).value() ==
              doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-11));
        for (int n : {2, 5, 12}) {
            CHECK(regularized_gamma_q(n, x).value() == doctest::Approx(poisson_tail(n, x)).epsilon(1e-11));
        }
    }
}

TEST_CASE("regularized_gamma_q against quadrature") {
    CHECK(regularized_gamma_q(1.5, 0.5).value() == doctest::Approx(0.801251956901).epsilon(1e-10));
    CHECK(upper_gamma_by_quadrature(1.5, 0.5) == doctest::Approx(0.801251956901).epsilon(1e-7));
    for (auto [a, x] : {std::pair{2.5, 1.0}, {7.5, 6.0}, {7.5, 12.0}, {20.0, 15.0}, {3.3, 0.7}}) {
        CAPTURE(a);
        CAPTURE(x);
        CHECK(regularized_gamma_q(a, x).value() ==
              doctest::Approx(upper_gamma_by_quadrature(a, x)).epsilon(1e-7));
    }
    CHECK(regularized_gamma_q(2.5, 50.0).value() == doctest::Approx(5.285e-20).epsilon(1e-3));
}

TEST_CASE("regularized_gamma_q domain and underflow") {
    CHECK_THROWS_AS(regularized_gamma_q(0.0, 1.0), error);
    CHECK_THROWS_AS(regularized_gamma_q(1.0, -1.0), error);
    auto tiny = regularized_gamma_q(127.5, 32640.0);
    CHECK(tiny.value() == 0.0);
    CHECK(tiny.underflow());
    CHECK_FALSE(regularized_gamma_q(1.0, 1.0).underflow());
}

TEST_CASE("chi_square_survival") {
    CHECK(chi_square_survival(0.0, 255).value() == 1.0);
    CHECK(chi_square_survival(2.0, 2).value() == doctest::Approx(0.3678794411714).epsilon(1e-12));
    auto p = chi_square_survival(65280.0, 255);
    CHECK(p.value() == 0.0);
    CHECK(p.underflow());
    // Median of chi-square with 255 degrees of freedom is close to 254.33.
    CHECK(chi_square_survival(254.33, 255).value() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_THROWS_AS(chi_square_survival(1.0, 0), error);
    CHECK_THROWS_AS(chi_square_survival(-1.0, 3), error);
}

TEST_CASE("probability_value clamping") {
    CHECK(probability_value::from_raw(1.0 + 1e-14).value() == 1.0);
    CHECK(probability_value::from_raw(-1e-14).value() == 0.0);
    CHECK_THROWS_AS(probability_value::from_raw(1.1), error);
    CHECK_THROWS_AS(probability_value::from_raw(std::nan("")), error);
    auto u = probability_value::from_raw(1e-320);
    CHECK(u.value() == 0.0);
    CHECK(u.underflow());
}
