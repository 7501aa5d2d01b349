#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace encscan {

enum class test_id {
    // closed-form byte statistics
    shannon,
    chi_square,
    monte_carlo_pi,
    mean,
    serial_correlation,
    kullback_leibler,
    // SP 800-22 bit tests
    frequency,
    block_frequency,
    runs,
    longest_runs,
    serial,
    cumulative_sums,
};

inline constexpr std::array<test_id, 12> all_tests = {
    test_id::frequency,  test_id::block_frequency,    test_id::cumulative_sums,
    test_id::longest_runs, test_id::runs,             test_id::serial,
    test_id::shannon,    test_id::chi_square,         test_id::mean,
    test_id::monte_carlo_pi, test_id::serial_correlation, test_id::kullback_leibler,
};

constexpr bool is_nist(test_id id) noexcept {
    return id >= test_id::frequency;
}

/// Stable short name used on the command line and in reports.
std::string_view name_of(test_id id) noexcept;
std::optional<test_id> parse_test_id(std::string_view name) noexcept;

} // namespace encscan
