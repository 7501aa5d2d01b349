#include "encscan/nist_suite.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>

#include "encscan/error.hpp"
#include "timing.hpp"

namespace encscan {

namespace {

using wide = unsigned __int128;

void require_bits(const bit_sequence& bits, std::uint64_t minimum, bool test_mode,
                  std::string_view test) {
    std::uint64_t need = test_mode ? 1 : minimum;
    if (bits.length_bits() < need) {
        throw error(errc::insufficient_data,
                    std::string(test) + " needs at least " + std::to_string(need) + " bits");
    }
}

nist_test_result make_result(test_id id, const bit_sequence& bits) {
    nist_test_result r;
    r.id = id;
    r.bytes_processed = bits.length_bits() / 8;
    return r;
}

// Sum of squared overlapping k-bit pattern counts, wrapping the sequence
// around by k - 1 bits. For k = 0 the single empty pattern occurs n times.
wide pattern_count_square_sum(std::span<const std::uint8_t> bits, int k) {
    const std::uint64_t n = bits.size();
    if (k == 0) return wide{n} * n;

    std::vector<std::uint64_t> counts(std::size_t{1} << k, 0);
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    std::uint64_t pattern = 0;
    for (int j = 0; j < k - 1; ++j) pattern = (pattern << 1) | bits[j % n];
    for (std::uint64_t i = 0; i < n; ++i) {
        pattern = ((pattern << 1) | bits[(i + k - 1) % n]) & mask;
        ++counts[pattern];
    }
    wide s = 0;
    for (std::uint64_t c : counts) s += wide{c} * c;
    return s;
}

// Phi(b) - Phi(a) for a <= b, using whichever tail keeps precision.
double normal_mass(double a, double b) {
    if (a >= 0.0) return normal_upper_tail(a) - normal_upper_tail(b);
    if (b <= 0.0) return normal_upper_tail(-b) - normal_upper_tail(-a);
    return 1.0 - normal_upper_tail(b) - normal_upper_tail(-a);
}

// Truncating integer division in the summation bounds matches the reference
// implementation's published p-values.
double cusum_p_value(std::int64_t n, std::int64_t z) {
    const double root_n = std::sqrt(static_cast<double>(n));
    const double step = static_cast<double>(z) / root_n;
    const std::int64_t ratio = n / z;

    // Terms whose arguments are all beyond |40| contribute nothing in double.
    const std::int64_t reach = static_cast<std::int64_t>((40.0 / step + 3.0) / 4.0) + 1;

    const std::int64_t first_lo = std::max<std::int64_t>((-ratio + 1) / 4, -reach);
    const std::int64_t hi = std::min<std::int64_t>((ratio - 1) / 4, reach);
    const std::int64_t second_lo = std::max<std::int64_t>((-ratio - 3) / 4, -reach);

    // The k = 0 term of the first sum is 1 - 2 * upper_tail(step); folding the
    // leading 1 into it avoids cancellation when p is tiny.
    double p = 2.0 * normal_upper_tail(step);
    for (std::int64_t k = first_lo; k <= hi; ++k) {
        if (k == 0) continue;
        p -= normal_mass((4 * k - 1) * step, (4 * k + 1) * step);
    }
    for (std::int64_t k = second_lo; k <= hi; ++k) {
        p += normal_mass((4 * k + 1) * step, (4 * k + 3) * step);
    }
    return p;
}

struct longest_run_table {
    std::int64_t block_size;
    int low_category;   // runs of this length or shorter share the first bin
    std::vector<double> probabilities;
};

const longest_run_table& longest_run_table_for(std::uint64_t n) {
    static const longest_run_table small{8, 1, {0.21484375, 0.3671875, 0.23046875, 0.1875}};
    static const longest_run_table medium{
        128, 4, {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847}};
    static const longest_run_table large{
        10000, 10, {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727}};
    if (n < 6272) return small;
    if (n < 750000) return medium;
    return large;
}

} // namespace

nist_test_result frequency_monobit(const bit_sequence& bits, bool test_mode) {
    detail::stopwatch sw;
    require_bits(bits, nist_min_bits, test_mode, "frequency");
    auto r = make_result(test_id::frequency, bits);

    std::int64_t s = 0;
    for (std::uint8_t b : bits.bits()) s += b ? 1 : -1;
    const double s_obs = std::abs(static_cast<double>(s)) /
                         std::sqrt(static_cast<double>(bits.length_bits()));
    r.p_values.push_back(probability_value::from_raw(erfc(s_obs / std::numbers::sqrt2)));
    r.elapsed_seconds = sw.seconds();
    return r;
}

nist_test_result block_frequency(const bit_sequence& bits, std::int64_t block_size,
                                 bool test_mode) {
    detail::stopwatch sw;
    require_bits(bits, nist_min_bits, test_mode, "block frequency");
    if (block_size < (test_mode ? 1 : 20)) {
        throw error(errc::insufficient_data, "block frequency block size too small");
    }
    const std::uint64_t m = static_cast<std::uint64_t>(block_size);
    const std::uint64_t blocks = bits.length_bits() / m;
    if (blocks == 0) {
        throw error(errc::insufficient_data, "block frequency needs at least one full block");
    }
    auto r = make_result(test_id::block_frequency, bits);
    r.parameters["M"] = block_size;
    r.parameters["N"] = static_cast<std::int64_t>(blocks);

    auto data = bits.bits();
    double chi = 0.0;
    for (std::uint64_t j = 0; j < blocks; ++j) {
        std::uint64_t ones = 0;
        for (std::uint64_t i = 0; i < m; ++i) ones += data[j * m + i];
        double pi = static_cast<double>(ones) / static_cast<double>(m) - 0.5;
        chi += pi * pi;
    }
    chi *= 4.0 * static_cast<double>(m);
    r.p_values.push_back(regularized_gamma_q(static_cast<double>(blocks) / 2.0, chi / 2.0));
    r.elapsed_seconds = sw.seconds();
    return r;
}

nist_test_result runs(const bit_sequence& bits, bool test_mode) {
    detail::stopwatch sw;
    require_bits(bits, nist_min_bits, test_mode, "runs");
    auto r = make_result(test_id::runs, bits);

    auto data = bits.bits();
    const double n = static_cast<double>(data.size());
    std::uint64_t ones = 0;
    for (std::uint8_t b : data) ones += b;
    const double pi = static_cast<double>(ones) / n;
    const double tau = 2.0 / std::sqrt(n);

    if (std::abs(pi - 0.5) >= tau || ones == 0 || ones == data.size()) {
        r.prerequisite_failed = true;
        r.p_values.push_back(probability_value::from_raw(0.0));
        r.elapsed_seconds = sw.seconds();
        return r;
    }

    std::uint64_t v = 1;
    for (std::size_t i = 1; i < data.size(); ++i) v += data[i] != data[i - 1];
    r.parameters["V"] = static_cast<std::int64_t>(v);

    const double spread = pi * (1.0 - pi);
    const double arg = std::abs(static_cast<double>(v) - 2.0 * n * spread) /
                       (2.0 * std::sqrt(2.0 * n) * spread);
    r.p_values.push_back(probability_value::from_raw(erfc(arg)));
    r.elapsed_seconds = sw.seconds();
    return r;
}

nist_test_result longest_run_of_ones(const bit_sequence& bits) {
    detail::stopwatch sw;
    require_bits(bits, longest_run_min_bits, false, "longest run of ones");
    auto r = make_result(test_id::longest_runs, bits);

    const auto& table = longest_run_table_for(bits.length_bits());
    const std::uint64_t m = static_cast<std::uint64_t>(table.block_size);
    const std::uint64_t blocks = bits.length_bits() / m;
    const int categories = static_cast<int>(table.probabilities.size());
    r.parameters["M"] = table.block_size;
    r.parameters["N"] = static_cast<std::int64_t>(blocks);
    r.parameters["K"] = categories - 1;

    std::vector<std::uint64_t> observed(table.probabilities.size(), 0);
    auto data = bits.bits();
    for (std::uint64_t j = 0; j < blocks; ++j) {
        int longest = 0;
        int current = 0;
        for (std::uint64_t i = 0; i < m; ++i) {
            current = data[j * m + i] ? current + 1 : 0;
            longest = std::max(longest, current);
        }
        int bin = std::clamp(longest - table.low_category, 0, categories - 1);
        ++observed[static_cast<std::size_t>(bin)];
    }

    double chi = 0.0;
    for (int i = 0; i < categories; ++i) {
        double expected = static_cast<double>(blocks) * table.probabilities[i];
        double d = static_cast<double>(observed[i]) - expected;
        chi += d * d / expected;
    }
    r.p_values.push_back(regularized_gamma_q((categories - 1) / 2.0, chi / 2.0));
    r.elapsed_seconds = sw.seconds();
    return r;
}

nist_test_result serial_test(const bit_sequence& bits, int m, bool test_mode) {
    detail::stopwatch sw;
    const std::uint64_t n = bits.length_bits();
    if (n == 0) {
        throw error(errc::insufficient_data, "serial test of an empty sequence");
    }
    const int log2_n = static_cast<int>(std::bit_width(n)) - 1;
    const int upper = test_mode ? static_cast<int>(std::min<std::uint64_t>(n, 30))
                                : std::min(log2_n - 2, 30);
    if (m < 2 || m > upper) {
        throw error(errc::parameter_error,
                    "serial test block length m=" + std::to_string(m) + " outside [2, " +
                        std::to_string(upper) + "]");
    }
    auto r = make_result(test_id::serial, bits);
    r.parameters["m"] = m;

    // n * psi^2_k = 2^k * sum(counts^2) - n^2, computed exactly.
    using signed_wide = __int128;
    auto scaled_psi = [&](int k) -> signed_wide {
        return static_cast<signed_wide>(pattern_count_square_sum(bits.bits(), k) << k) -
               static_cast<signed_wide>(wide{n} * n);
    };
    const signed_wide psi_m = scaled_psi(m);
    const signed_wide psi_m1 = scaled_psi(m - 1);
    const signed_wide psi_m2 = scaled_psi(m - 2);

    const long double nd = static_cast<long double>(n);
    const double del1 = static_cast<double>(static_cast<long double>(psi_m - psi_m1) / nd);
    const double del2 =
        static_cast<double>(static_cast<long double>(psi_m - 2 * psi_m1 + psi_m2) / nd);

    r.p_values.push_back(regularized_gamma_q(std::ldexp(1.0, m - 2), std::max(del1, 0.0) / 2.0));
    r.p_values.push_back(regularized_gamma_q(std::ldexp(1.0, m - 3), std::max(del2, 0.0) / 2.0));
    r.elapsed_seconds = sw.seconds();
    return r;
}

nist_test_result cumulative_sums(const bit_sequence& bits, bool test_mode) {
    detail::stopwatch sw;
    require_bits(bits, nist_min_bits, test_mode, "cumulative sums");
    auto r = make_result(test_id::cumulative_sums, bits);

    auto data = bits.bits();
    const auto n = static_cast<std::int64_t>(data.size());

    std::int64_t s = 0;
    std::int64_t forward = 0;
    for (std::uint8_t b : data) {
        s += b ? 1 : -1;
        forward = std::max(forward, s < 0 ? -s : s);
    }
    s = 0;
    std::int64_t backward = 0;
    for (auto it = data.rbegin(); it != data.rend(); ++it) {
        s += *it ? 1 : -1;
        backward = std::max(backward, s < 0 ? -s : s);
    }
    r.parameters["z_forward"] = forward;
    r.parameters["z_backward"] = backward;
    r.p_values.push_back(probability_value::from_raw(cusum_p_value(n, forward)));
    r.p_values.push_back(probability_value::from_raw(cusum_p_value(n, backward)));
    r.elapsed_seconds = sw.seconds();
    return r;
}

int default_serial_m(std::uint64_t n_bits) noexcept {
    if (n_bits >= (std::uint64_t{1} << 20)) return 16;
    if (n_bits == 0) return 2;
    int log2_n = static_cast<int>(std::bit_width(n_bits)) - 1;
    return std::max(2, log2_n - 2);
}

nist_test_result run_nist_test(test_id id, const bit_sequence& bits, const nist_options& options) {
    switch (id) {
    case test_id::frequency: return frequency_monobit(bits, options.test_mode);
    case test_id::block_frequency:
        return block_frequency(bits, options.block_frequency_m, options.test_mode);
    case test_id::runs: return runs(bits, options.test_mode);
    case test_id::longest_runs: return longest_run_of_ones(bits);
    case test_id::serial:
        return serial_test(bits, options.serial_m.value_or(default_serial_m(bits.length_bits())),
                           options.test_mode);
    case test_id::cumulative_sums: return cumulative_sums(bits, options.test_mode);
    default: break;
    }
    throw error(errc::parameter_error, std::string(name_of(id)) + " is not an SP 800-22 test");
}

} // namespace encscan
