#include "encscan/entropy_tests.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "encscan/error.hpp"
#include "encscan/stat_math.hpp"
#include "timing.hpp"

namespace encscan {

namespace {

void require_nonempty(const histogram256& hist) {
    if (hist.total == 0) {
        throw error(errc::empty_sample, "statistic of an empty sample");
    }
}

math_test_result make_result(test_id id, std::uint64_t bytes) {
    math_test_result r;
    r.id = id;
    r.bytes_processed = bytes;
    return r;
}

} // namespace

math_test_result shannon_entropy(const histogram256& hist) {
    detail::stopwatch sw;
    require_nonempty(hist);
    auto r = make_result(test_id::shannon, hist.total);
    const double n = static_cast<double>(hist.total);
    double h = 0.0;
    for (std::uint64_t c : hist.counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    r.statistic = std::clamp(h, 0.0, 8.0);
    r.elapsed_seconds = sw.seconds();
    return r;
}

math_test_result chi_square_uniformity(const histogram256& hist) {
    detail::stopwatch sw;
    require_nonempty(hist);
    auto r = make_result(test_id::chi_square, hist.total);
    const double expected = static_cast<double>(hist.total) / 256.0;
    double chi = 0.0;
    for (std::uint64_t c : hist.counts) {
        double d = static_cast<double>(c) - expected;
        chi += d * d / expected;
    }
    r.statistic = chi;
    auto p = chi_square_survival(chi, 255);
    r.auxiliary = p.value();
    r.underflow = p.underflow();
    r.low_sample = hist.total < chi_square_low_sample_total;
    r.elapsed_seconds = sw.seconds();
    return r;
}

math_test_result arithmetic_mean(const histogram256& hist) {
    detail::stopwatch sw;
    require_nonempty(hist);
    auto r = make_result(test_id::mean, hist.total);
    std::uint64_t sum = 0;
    for (std::size_t v = 0; v < hist.counts.size(); ++v) sum += v * hist.counts[v];
    r.statistic = static_cast<double>(sum) / static_cast<double>(hist.total);
    r.elapsed_seconds = sw.seconds();
    return r;
}

math_test_result kl_divergence_uniform(const histogram256& hist) {
    detail::stopwatch sw;
    require_nonempty(hist);
    auto r = make_result(test_id::kullback_leibler, hist.total);
    const double n = static_cast<double>(hist.total);
    constexpr double log2_uniform = 8.0; // -log2(1/256)
    double d = 0.0;
    for (std::uint64_t c : hist.counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        d += p * (std::log2(p) + log2_uniform);
    }
    r.statistic = std::clamp(d, 0.0, 8.0);
    r.elapsed_seconds = sw.seconds();
    return r;
}

math_test_result monte_carlo_pi(const byte_sample& sample) {
    detail::stopwatch sw;
    auto bytes = sample.bytes();
    if (bytes.size() < 6) {
        throw error(errc::insufficient_data, "monte carlo pi needs at least 6 bytes");
    }
    auto r = make_result(test_id::monte_carlo_pi, sample.length_bytes());
    constexpr std::uint64_t radius = (1ull << 24) - 1;
    constexpr std::uint64_t radius_sq = radius * radius;

    std::uint64_t points = bytes.size() / 6;
    std::uint64_t inside = 0;
    for (std::uint64_t i = 0; i < points; ++i) {
        const std::uint8_t* g = bytes.data() + 6 * i;
        std::uint64_t x = (std::uint64_t{g[0]} << 16) | (std::uint64_t{g[1]} << 8) | g[2];
        std::uint64_t y = (std::uint64_t{g[3]} << 16) | (std::uint64_t{g[4]} << 8) | g[5];
        if (x * x + y * y <= radius_sq) ++inside;
    }
    r.statistic = 4.0 * static_cast<double>(inside) / static_cast<double>(points);
    r.auxiliary = std::abs(r.statistic - std::numbers::pi);
    r.elapsed_seconds = sw.seconds();
    return r;
}

math_test_result serial_correlation(const byte_sample& sample) {
    detail::stopwatch sw;
    auto bytes = sample.bytes();
    if (bytes.size() < 2) {
        throw error(errc::insufficient_data, "serial correlation needs at least 2 bytes");
    }
    auto r = make_result(test_id::serial_correlation, sample.length_bytes());

    // Exact integer sums; the 128-bit products cannot overflow for any file
    // that fits in memory.
    using wide = __int128;
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;
    std::uint64_t lag_products = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        std::uint64_t u = bytes[i];
        std::uint64_t next = bytes[(i + 1) % bytes.size()];
        sum += u;
        sum_sq += u * u;
        lag_products += u * next;
    }
    const wide n = static_cast<wide>(bytes.size());
    const wide sum_squared = static_cast<wide>(sum) * static_cast<wide>(sum);
    const wide numerator = n * static_cast<wide>(lag_products) - sum_squared;
    const wide denominator = n * static_cast<wide>(sum_sq) - sum_squared;
    if (denominator == 0) {
        throw error(errc::degenerate_sequence, "serial correlation of a constant sequence");
    }
    double c = static_cast<double>(numerator) / static_cast<double>(denominator);
    r.statistic = std::clamp(c, -1.0, 1.0);
    r.elapsed_seconds = sw.seconds();
    return r;
}

math_test_result run_math_test(test_id id, const byte_sample& sample) {
    switch (id) {
    case test_id::shannon: return shannon_entropy(byte_histogram(sample));
    case test_id::chi_square: return chi_square_uniformity(byte_histogram(sample));
    case test_id::mean: return arithmetic_mean(byte_histogram(sample));
    case test_id::kullback_leibler: return kl_divergence_uniform(byte_histogram(sample));
    case test_id::monte_carlo_pi: return monte_carlo_pi(sample);
    case test_id::serial_correlation: return serial_correlation(sample);
    default: break;
    }
    throw error(errc::parameter_error, std::string(name_of(id)) + " is not a byte statistic");
}

} // namespace encscan
