#include "encscan/classifier.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "encscan/error.hpp"
#include "text_util.hpp"

namespace encscan {

std::string_view to_string(verdict v) noexcept {
    return v == verdict::encrypted ? "encrypted" : "not_encrypted";
}

void threshold_config::validate() const {
    const std::array<std::pair<std::string_view, double>, 7> values{{
        {"nist_p_min", nist_p_min},
        {"shannon_bits_min", shannon_bits_min},
        {"chi_square_p_min", chi_square_p_min},
        {"monte_carlo_abs_err_max", monte_carlo_abs_err_max},
        {"mean_abs_dev_max", mean_abs_dev_max},
        {"serial_corr_abs_max", serial_corr_abs_max},
        {"kl_max", kl_max},
    }};
    for (const auto& [key, v] : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw error(errc::validation_error, std::string(key) + " must be positive");
        }
    }
    if (nist_p_min >= 1.0 || chi_square_p_min >= 1.0) {
        throw error(errc::validation_error, "p-value thresholds must be below 1");
    }
}

verdict single_verdict(const math_test_result& result, const threshold_config& cfg) {
    auto as_verdict = [](bool encrypted) {
        return encrypted ? verdict::encrypted : verdict::not_encrypted;
    };
    const double x = result.statistic;
    switch (result.id) {
    case test_id::shannon:
        return as_verdict(x > cfg.shannon_bits_min);
    case test_id::chi_square:
        return as_verdict(result.auxiliary.value_or(0.0) > cfg.chi_square_p_min);
    case test_id::monte_carlo_pi: {
        double err = std::abs(x - std::numbers::pi);
        if (cfg.monte_carlo == monte_carlo_mode::relative) err /= std::numbers::pi;
        return as_verdict(err <= cfg.monte_carlo_abs_err_max);
    }
    case test_id::mean:
        return as_verdict(std::abs(x - 127.5) <= cfg.mean_abs_dev_max);
    case test_id::serial_correlation:
        return as_verdict(std::abs(x) < cfg.serial_corr_abs_max);
    case test_id::kullback_leibler:
        return as_verdict(cfg.kl == kl_direction::less ? x < cfg.kl_max : x > cfg.kl_max);
    default:
        break;
    }
    throw error(errc::parameter_error, "not a byte statistic result");
}

verdict single_verdict(const nist_test_result& result, const threshold_config& cfg) {
    if (result.p_values.empty()) {
        throw error(errc::parameter_error, "NIST result without p-values");
    }
    auto passes = [&](const probability_value& p) { return p.value() > cfg.nist_p_min; };
    bool encrypted = false;
    switch (cfg.nist_multi_p) {
    case multi_p_rule::all:
        encrypted = std::all_of(result.p_values.begin(), result.p_values.end(), passes);
        break;
    case multi_p_rule::any:
        encrypted = std::any_of(result.p_values.begin(), result.p_values.end(), passes);
        break;
    case multi_p_rule::first:
        encrypted = passes(result.p_values.front());
        break;
    }
    return encrypted ? verdict::encrypted : verdict::not_encrypted;
}

decision classify_single(const math_test_result& result, const threshold_config& cfg) {
    verdict v = single_verdict(result, cfg);
    return decision{v, {{result.id, v}}};
}

decision classify_single(const nist_test_result& result, const threshold_config& cfg) {
    verdict v = single_verdict(result, cfg);
    return decision{v, {{result.id, v}}};
}

decision classify_single(const test_result& result, const threshold_config& cfg) {
    return std::visit([&](const auto& r) { return classify_single(r, cfg); }, result);
}

decision classify_with_override(const decision& primary, const math_test_result& scc,
                                const threshold_config& cfg) {
    if (scc.id != test_id::serial_correlation) {
        throw error(errc::parameter_error, "override needs a serial correlation result");
    }
    const bool archive = std::abs(scc.statistic) >= cfg.serial_corr_abs_max;
    decision out = primary;
    out.contributing.emplace_back(test_id::serial_correlation,
                                  archive ? verdict::not_encrypted : verdict::encrypted);
    if (primary.outcome == verdict::encrypted && archive) {
        out.outcome = verdict::not_encrypted;
    }
    return out;
}

decision classify_majority(const std::vector<math_test_result>& results,
                           const threshold_config& cfg) {
    static constexpr std::array<test_id, 5> voters{
        test_id::shannon, test_id::chi_square, test_id::mean, test_id::monte_carlo_pi,
        test_id::serial_correlation};
    if (results.size() != voters.size()) {
        throw error(errc::parameter_error, "majority vote needs exactly five results");
    }
    std::set<test_id> seen;
    decision out;
    int encrypted_votes = 0;
    for (const auto& r : results) {
        if (std::find(voters.begin(), voters.end(), r.id) == voters.end()) {
            throw error(errc::parameter_error,
                        std::string(name_of(r.id)) + " does not take part in the majority vote");
        }
        if (!seen.insert(r.id).second) {
            throw error(errc::parameter_error,
                        "duplicate " + std::string(name_of(r.id)) + " in majority vote");
        }
        verdict v = single_verdict(r, cfg);
        encrypted_votes += v == verdict::encrypted;
        out.contributing.emplace_back(r.id, v);
    }
    out.outcome = encrypted_votes >= 3 ? verdict::encrypted : verdict::not_encrypted;
    return out;
}

bool apply_threshold_key(threshold_config& cfg, std::string_view key, std::string_view value) {
    auto number = [&](double& field) {
        field = detail::parse_double(value, key);
        return true;
    };
    if (key == "nist_p_min") return number(cfg.nist_p_min);
    if (key == "shannon_bits_min") return number(cfg.shannon_bits_min);
    if (key == "chi_square_p_min") return number(cfg.chi_square_p_min);
    if (key == "monte_carlo_abs_err_max") return number(cfg.monte_carlo_abs_err_max);
    if (key == "mean_abs_dev_max") return number(cfg.mean_abs_dev_max);
    if (key == "serial_corr_abs_max") return number(cfg.serial_corr_abs_max);
    if (key == "kl_max") return number(cfg.kl_max);
    if (key == "monte_carlo_mode") {
        if (value == "absolute") cfg.monte_carlo = monte_carlo_mode::absolute;
        else if (value == "relative") cfg.monte_carlo = monte_carlo_mode::relative;
        else throw error(errc::validation_error, "monte_carlo_mode must be absolute or relative");
        return true;
    }
    if (key == "kl_direction") {
        if (value == "less") cfg.kl = kl_direction::less;
        else if (value == "greater") cfg.kl = kl_direction::greater;
        else throw error(errc::validation_error, "kl_direction must be less or greater");
        return true;
    }
    if (key == "nist_multi_p") {
        if (value == "all") cfg.nist_multi_p = multi_p_rule::all;
        else if (value == "any") cfg.nist_multi_p = multi_p_rule::any;
        else if (value == "first") cfg.nist_multi_p = multi_p_rule::first;
        else throw error(errc::validation_error, "nist_multi_p must be all, any or first");
        return true;
    }
    return false;
}

threshold_config parse_thresholds(std::string_view text) {
    threshold_config cfg;
    detail::for_each_key_value(text, [&](std::string_view key, std::string_view value,
                                         std::size_t line) {
        if (!apply_threshold_key(cfg, key, value)) {
            throw error(errc::validation_error,
                        "line " + std::to_string(line) + ": unknown key '" + std::string(key) + "'");
        }
    });
    cfg.validate();
    return cfg;
}

threshold_config load_thresholds(const std::filesystem::path& path) {
    return parse_thresholds(detail::read_text_file(path));
}

} // namespace encscan
