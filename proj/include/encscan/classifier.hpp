#pragma once

#include <filesystem>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "encscan/entropy_tests.hpp"
#include "encscan/nist_suite.hpp"
#include "encscan/test_id.hpp"

namespace encscan {

enum class verdict { encrypted, not_encrypted };

std::string_view to_string(verdict v) noexcept;

enum class monte_carlo_mode { absolute, relative };
enum class kl_direction { less, greater };
/// How multi-p-value NIST results (serial, cumulative sums) are reduced.
enum class multi_p_rule { all, any, first };

struct threshold_config {
    double nist_p_min = 0.01;
    double shannon_bits_min = 7.95;
    double chi_square_p_min = 0.01;
    double monte_carlo_abs_err_max = 0.015;
    double mean_abs_dev_max = 0.85;
    double serial_corr_abs_max = 0.0011;
    double kl_max = 0.01;

    monte_carlo_mode monte_carlo = monte_carlo_mode::absolute;
    /// `greater` is the literal table wording (encrypted iff D > kl_max).
    kl_direction kl = kl_direction::less;
    multi_p_rule nist_multi_p = multi_p_rule::all;

    /// Throws validation_error unless every threshold is positive and the
    /// probability thresholds are below 1.
    void validate() const;
};

using test_result = std::variant<math_test_result, nist_test_result>;

struct decision {
    verdict outcome = verdict::not_encrypted;
    std::vector<std::pair<test_id, verdict>> contributing;
};

verdict single_verdict(const math_test_result& result, const threshold_config& cfg);
verdict single_verdict(const nist_test_result& result, const threshold_config& cfg);

decision classify_single(const math_test_result& result, const threshold_config& cfg);
decision classify_single(const nist_test_result& result, const threshold_config& cfg);
decision classify_single(const test_result& result, const threshold_config& cfg);

/// Reverses an encrypted verdict when the serial byte correlation magnitude
/// reaches serial_corr_abs_max, the signature of an archive or compressed
/// file. A not-encrypted primary is never overturned.
decision classify_with_override(const decision& primary, const math_test_result& scc,
                                const threshold_config& cfg);

/// Encrypted iff at least three of shannon, chi_square, mean, monte_carlo_pi
/// and serial_correlation vote encrypted. Exactly one result per test.
decision classify_majority(const std::vector<math_test_result>& results,
                           const threshold_config& cfg);

/// Key/value threshold file. Blank lines and '#' comments (whole-line or trailing) are skipped;
/// unknown keys, duplicates and malformed values are validation errors.
threshold_config parse_thresholds(std::string_view text);
threshold_config load_thresholds(const std::filesystem::path& path);

/// Applies a single `key = value` pair; returns false if the key is not a
/// threshold key. Shared with the run configuration parser.
bool apply_threshold_key(threshold_config& cfg, std::string_view key,
                         std::string_view value);

} // namespace encscan
