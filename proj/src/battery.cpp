#include "encscan/battery.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "encscan/entropy_tests.hpp"
#include "encscan/error.hpp"
#include "text_util.hpp"
#include "timing.hpp"

namespace encscan {

namespace {

constexpr double ratio_slack = 1e-12;

std::string describe(const error& e) {
    return std::string(to_string(e.code())) + ": " + e.what();
}

run_cell error_cell(std::size_t entry, std::string test, std::string message) {
    run_cell c;
    c.entry = entry;
    c.test = std::move(test);
    c.ok = false;
    c.error = std::move(message);
    return c;
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// The five byte statistics the combined tests draw on.
constexpr std::array<test_id, 5> combo_inputs{
    test_id::shannon, test_id::chi_square, test_id::mean, test_id::monte_carlo_pi,
    test_id::serial_correlation};

} // namespace

std::vector<run_cell> score_combiners(const byte_sample& sample, const run_config& config,
                                      std::size_t entry) {
    std::map<test_id, math_test_result> results;
    std::string failure;
    for (test_id id : combo_inputs) {
        try {
            detail::stopwatch sw;
            auto r = run_math_test(id, sample);
            r.elapsed_seconds = sw.seconds();
            results.emplace(id, r);
        } catch (const error& e) {
            if (failure.empty()) failure = std::string(name_of(id)) + " " + describe(e);
        }
    }

    std::vector<run_cell> out;
    const auto& cfg = config.thresholds;
    auto finish = [&](std::string_view name, const decision& d, std::initializer_list<test_id> used) {
        run_cell c;
        c.entry = entry;
        c.test = std::string(name);
        c.ok = true;
        c.decision = d.outcome;
        c.bytes_processed = sample.length_bytes();
        for (test_id id : used) c.elapsed_seconds += results.at(id).elapsed_seconds;
        return c;
    };

    for (auto [name, primary] : {std::pair{combo_shannon_override, test_id::shannon},
                                 std::pair{combo_chi_square_override, test_id::chi_square},
                                 std::pair{combo_monte_carlo_override, test_id::monte_carlo_pi}}) {
        if (!results.contains(primary) || !results.contains(test_id::serial_correlation)) {
            out.push_back(error_cell(entry, std::string(name), "input failed: " + failure));
            continue;
        }
        const auto& scc = results.at(test_id::serial_correlation);
        auto d = classify_with_override(classify_single(results.at(primary), cfg), scc, cfg);
        auto c = finish(name, d, {primary, test_id::serial_correlation});
        c.statistic = results.at(primary).statistic;
        c.auxiliary = scc.statistic;
        out.push_back(std::move(c));
    }

    if (results.size() != combo_inputs.size()) {
        out.push_back(error_cell(entry, std::string(combo_majority), "input failed: " + failure));
    } else {
        std::vector<math_test_result> voters;
        for (test_id id : combo_inputs) voters.push_back(results.at(id));
        auto d = classify_majority(voters, cfg);
        auto c = finish(combo_majority, d,
                        {test_id::shannon, test_id::chi_square, test_id::mean,
                         test_id::monte_carlo_pi, test_id::serial_correlation});
        c.statistic = static_cast<double>(std::count_if(
            d.contributing.begin(), d.contributing.end(),
            [](const auto& p) { return p.second == verdict::encrypted; }));
        out.push_back(std::move(c));
    }
    return out;
}

void phase_gate_criteria::validate() const {
    auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!unit(accuracy_min) || !unit(type_coverage_min)) {
        throw error(errc::validation_error, "gate accuracy and coverage must lie in (0, 1]");
    }
    if (!(throughput_min_mb_s >= 0.0) || !std::isfinite(throughput_min_mb_s)) {
        throw error(errc::validation_error, "gate throughput floor must be non-negative");
    }
}

std::string run_config::canonical() const {
    std::map<std::string, std::string> kv;
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const auto& t = thresholds;
    kv["nist_p_min"] = num(t.nist_p_min);
    kv["shannon_bits_min"] = num(t.shannon_bits_min);
    kv["chi_square_p_min"] = num(t.chi_square_p_min);
    kv["monte_carlo_abs_err_max"] = num(t.monte_carlo_abs_err_max);
    kv["mean_abs_dev_max"] = num(t.mean_abs_dev_max);
    kv["serial_corr_abs_max"] = num(t.serial_corr_abs_max);
    kv["kl_max"] = num(t.kl_max);
    kv["monte_carlo_mode"] = t.monte_carlo == monte_carlo_mode::absolute ? "absolute" : "relative";
    kv["kl_direction"] = t.kl == kl_direction::less ? "less" : "greater";
    kv["nist_multi_p"] = t.nist_multi_p == multi_p_rule::all   ? "all"
                         : t.nist_multi_p == multi_p_rule::any ? "any"
                                                               : "first";
    kv["gate_accuracy_min"] = num(gate.accuracy_min);
    kv["gate_type_coverage_min"] = num(gate.type_coverage_min);
    kv["gate_throughput_min_mb_s"] = num(gate.throughput_min_mb_s);
    kv["gate_coverage_mode"] = gate.coverage == gate_coverage_mode::per_type ? "per_type" : "per_file";
    kv["block_frequency_m"] = std::to_string(nist.block_frequency_m);
    kv["serial_m"] = nist.serial_m ? std::to_string(*nist.serial_m) : "auto";
    kv["max_bytes"] = max_bytes ? std::to_string(*max_bytes) : "unlimited";

    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string run_config::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

run_config parse_run_config(std::string_view text) {
    run_config cfg;
    detail::for_each_key_value(text, [&](std::string_view key, std::string_view value,
                                         std::size_t line) {
        if (apply_threshold_key(cfg.thresholds, key, value)) return;
        if (key == "gate_accuracy_min") cfg.gate.accuracy_min = detail::parse_double(value, key);
        else if (key == "gate_type_coverage_min")
            cfg.gate.type_coverage_min = detail::parse_double(value, key);
        else if (key == "gate_throughput_min_mb_s")
            cfg.gate.throughput_min_mb_s = detail::parse_double(value, key);
        else if (key == "gate_coverage_mode") {
            if (value == "per_type") cfg.gate.coverage = gate_coverage_mode::per_type;
            else if (value == "per_file") cfg.gate.coverage = gate_coverage_mode::per_file;
            else throw error(errc::validation_error, "gate_coverage_mode must be per_type or per_file");
        } else if (key == "block_frequency_m") {
            cfg.nist.block_frequency_m = static_cast<std::int64_t>(detail::parse_u64(value, key));
        } else if (key == "serial_m") {
            if (value != "auto") cfg.nist.serial_m = static_cast<int>(detail::parse_u64(value, key));
        } else if (key == "max_bytes") {
            if (value != "unlimited") cfg.max_bytes = detail::parse_u64(value, key);
        } else {
            throw error(errc::validation_error,
                        "line " + std::to_string(line) + ": unknown key '" + std::string(key) + "'");
        }
    });
    cfg.thresholds.validate();
    cfg.gate.validate();
    return cfg;
}

run_config load_run_config(const std::filesystem::path& path) {
    return parse_run_config(detail::read_text_file(path));
}

std::size_t run_result::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const run_cell& c) { return !c.ok; }));
}

run_cell score_sample(const byte_sample& sample, test_id id, const run_config& config) {
    run_cell c;
    c.test = std::string(name_of(id));
    c.bytes_processed = sample.length_bytes();
    try {
        detail::stopwatch sw;
        if (is_nist(id)) {
            auto r = run_nist_test(id, bits_msb_first(sample), config.nist);
            c.elapsed_seconds = sw.seconds();
            for (const auto& p : r.p_values) {
                c.p_values.push_back(p.value());
                if (p.underflow()) c.flags.emplace_back("underflow");
            }
            if (r.prerequisite_failed) c.flags.emplace_back("prerequisite_failed");
            c.decision = single_verdict(r, config.thresholds);
        } else {
            auto r = run_math_test(id, sample);
            c.elapsed_seconds = sw.seconds();
            c.statistic = r.statistic;
            c.auxiliary = r.auxiliary;
            if (r.low_sample) c.flags.emplace_back("low_sample");
            if (r.underflow) c.flags.emplace_back("underflow");
            c.decision = single_verdict(r, config.thresholds);
        }
        std::sort(c.flags.begin(), c.flags.end());
        c.flags.erase(std::unique(c.flags.begin(), c.flags.end()), c.flags.end());
        c.ok = true;
    } catch (const error& e) {
        c.ok = false;
        c.error = describe(e);
        c.elapsed_seconds = 0.0;
    }
    return c;
}

run_result run_battery(const corpus_manifest& manifest, const battery_options& options,
                       const run_config& config) {
    if (options.tests.empty() && !options.combiners) {
        throw error(errc::parameter_error, "no tests requested");
    }
    if (options.workers == 0) {
        throw error(errc::parameter_error, "workers must be at least 1");
    }
    std::set<test_id> unique(options.tests.begin(), options.tests.end());
    if (unique.size() != options.tests.size()) {
        throw error(errc::parameter_error, "duplicate test requested");
    }

    run_result result;
    result.entries = manifest.entries;
    for (test_id id : options.tests) result.tests.emplace_back(name_of(id));
    if (options.combiners) {
        for (auto name : {combo_shannon_override, combo_chi_square_override,
                          combo_monte_carlo_override, combo_majority}) {
            result.tests.emplace_back(name);
        }
    }
    result.seed = options.seed;
    result.config_digest = config.digest();
    result.timestamp = utc_timestamp();

    const std::size_t width = result.tests.size();
    result.cells.resize(manifest.entries.size() * width);

    auto score_entry = [&](std::size_t e) {
        run_cell* row = result.cells.data() + e * width;
        byte_sample sample;
        try {
            sample = load_sample(manifest.resolve(manifest.entries[e]), config.max_bytes);
        } catch (const error& err) {
            for (std::size_t t = 0; t < width; ++t) row[t] = error_cell(e, result.tests[t], describe(err));
            return;
        }
        for (std::size_t t = 0; t < options.tests.size(); ++t) {
            row[t] = score_sample(sample, options.tests[t], config);
            row[t].entry = e;
        }
        if (options.combiners) {
            auto combos = score_combiners(sample, config, e);
            std::move(combos.begin(), combos.end(), row + options.tests.size());
        }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t e = next++; e < manifest.entries.size(); e = next++) {
            try {
                score_entry(e);
            } catch (const std::exception& ex) {
                for (std::size_t t = 0; t < width; ++t) {
                    result.cells[e * width + t] = error_cell(e, result.tests[t], ex.what());
                }
            }
        }
    };
    const unsigned n_threads = static_cast<unsigned>(
        std::min<std::size_t>(options.workers, std::max<std::size_t>(manifest.entries.size(), 1)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    return result;
}

std::vector<test_summary> summarize_by_test(const run_result& result) {
    std::vector<test_summary> out(result.tests.size());
    for (std::size_t t = 0; t < result.tests.size(); ++t) out[t].test = result.tests[t];
    for (std::size_t e = 0; e < result.entries.size(); ++e) {
        for (std::size_t t = 0; t < result.tests.size(); ++t) {
            const auto& c = result.cell(e, t);
            auto& s = out[t];
            if (!c.ok) {
                ++s.errors;
                continue;
            }
            s.counts.add(c.decision, result.entries[e].label);
            ++s.scored;
            s.bytes_processed += c.bytes_processed;
            s.elapsed_seconds += c.elapsed_seconds;
        }
    }
    return out;
}

std::vector<type_cell> summarize_by_type(const run_result& result) {
    std::map<std::string, std::vector<type_cell>> by_type;
    for (std::size_t e = 0; e < result.entries.size(); ++e) {
        const auto& entry = result.entries[e];
        auto [it, inserted] = by_type.try_emplace(entry.type_tag);
        if (inserted) {
            for (const auto& test : result.tests) it->second.push_back({entry.type_tag, test, {}, 0});
        }
        for (std::size_t t = 0; t < result.tests.size(); ++t) {
            const auto& c = result.cell(e, t);
            if (c.ok) it->second[t].counts.add(c.decision, entry.label);
            else ++it->second[t].errors;
        }
    }
    std::vector<type_cell> out;
    for (auto& [tag, cells] : by_type) {
        std::move(cells.begin(), cells.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<gate_row> phase_gate(const run_result& result, const phase_gate_criteria& criteria) {
    criteria.validate();
    if (result.entries.empty() || result.tests.empty() || result.cells.empty()) {
        throw error(errc::empty_run, "phase gate over an empty run");
    }
    std::set<std::string> tags;
    for (const auto& e : result.entries) tags.insert(e.type_tag);
    if (tags.size() < 2) {
        throw error(errc::parameter_error, "phase gate needs at least two type tags");
    }

    const auto by_test = summarize_by_test(result);
    const auto by_type = summarize_by_type(result);
    std::vector<gate_row> rows;
    for (std::size_t t = 0; t < result.tests.size(); ++t) {
        gate_row row;
        row.test = result.tests[t];
        row.types_total = tags.size();

        std::uint64_t files_total = 0;
        std::uint64_t files_in_passing = 0;
        for (const auto& cell : by_type) {
            if (cell.test != row.test) continue;
            const std::uint64_t scored = cell.counts.total();
            files_total += scored;
            if (scored > 0 && accuracy(cell.counts) >= criteria.accuracy_min - ratio_slack) {
                ++row.types_passing;
                files_in_passing += scored;
            }
        }
        if (criteria.coverage == gate_coverage_mode::per_type) {
            row.coverage = static_cast<double>(row.types_passing) / static_cast<double>(row.types_total);
        } else {
            row.coverage = files_total == 0 ? 0.0
                                            : static_cast<double>(files_in_passing) /
                                                  static_cast<double>(files_total);
        }

        const auto& s = by_test[t];
        row.throughput_mb_s = s.elapsed_seconds > 0.0
                                  ? throughput(s.bytes_processed, s.elapsed_seconds).throughput_mb_per_s
                                  : 0.0;

        const bool coverage_ok = row.coverage >= criteria.type_coverage_min - ratio_slack;
        const bool speed_ok = row.throughput_mb_s >= criteria.throughput_min_mb_s;
        row.qualified = coverage_ok && speed_ok;
        if (row.qualified) row.reason = "qualified";
        else if (!coverage_ok && !speed_ok) row.reason = "coverage+throughput";
        else if (!coverage_ok) row.reason = "coverage";
        else row.reason = "throughput";
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace encscan
