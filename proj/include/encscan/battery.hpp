#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "encscan/classifier.hpp"
#include "encscan/corpus.hpp"
#include "encscan/metrics.hpp"
#include "encscan/nist_suite.hpp"

namespace encscan {

enum class gate_coverage_mode { per_type, per_file };

struct phase_gate_criteria {
    double accuracy_min = 0.80;
    double type_coverage_min = 0.85;
    double throughput_min_mb_s = 1.0;
    gate_coverage_mode coverage = gate_coverage_mode::per_type;

    void validate() const;
};

/// Everything that influences the numbers a battery run produces.
struct run_config {
    threshold_config thresholds;
    phase_gate_criteria gate;
    nist_options nist;
    std::optional<std::uint64_t> max_bytes;

    /// Stable textual form; its FNV-1a digest is stored with each run.
    std::string canonical() const;
    std::string digest() const;
};

/// Accepts every threshold key plus gate_*, block_frequency_m, serial_m and max_bytes.
run_config parse_run_config(std::string_view text);
run_config load_run_config(const std::filesystem::path& path);

/// Names of the combined tests that may be added to a run.
inline constexpr std::string_view combo_shannon_override = "shannon+serial_byte";
inline constexpr std::string_view combo_chi_square_override = "chi_square+serial_byte";
inline constexpr std::string_view combo_monte_carlo_override = "monte_carlo+serial_byte";
inline constexpr std::string_view combo_majority = "majority5";

struct run_cell {
    std::size_t entry = 0;
    std::string test;
    bool ok = false;
    std::string error;
    std::optional<double> statistic;
    std::optional<double> auxiliary;
    std::vector<double> p_values;
    std::vector<std::string> flags;
    verdict decision = verdict::not_encrypted;
    double elapsed_seconds = 0.0;
    std::uint64_t bytes_processed = 0;
};

struct run_result {
    std::vector<corpus_entry> entries;
    std::vector<std::string> tests;
    /// Entry-major: cells[e * tests.size() + t].
    std::vector<run_cell> cells;

    std::optional<std::uint64_t> seed;
    std::string config_digest;
    std::string timestamp;

    const run_cell& cell(std::size_t entry, std::size_t test) const {
        return cells[entry * tests.size() + test];
    }
    std::size_t error_count() const;
};

struct battery_options {
    std::vector<test_id> tests;
    bool combiners = false;
    unsigned workers = 1;
    std::optional<std::uint64_t> seed;
};

/// Scores every (entry, test) pair. Work units are whole entries, handed to
/// `workers` threads; results land in fixed slots so the output does not
/// depend on scheduling. Unreadable files and per-test failures become error
/// cells and the run continues.
run_result run_battery(const corpus_manifest& manifest, const battery_options& options,
                       const run_config& config);

/// Runs one test on a sample in memory and classifies it. Shared by the
/// battery and the single-file analyzer.
run_cell score_sample(const byte_sample& sample, test_id id, const run_config& config);

/// The three override-combined verdicts and the majority vote, in the
/// column order used by run_battery.
std::vector<run_cell> score_combiners(const byte_sample& sample, const run_config& config,
                                      std::size_t entry = 0);

struct test_summary {
    std::string test;
    confusion_counts counts;
    std::uint64_t scored = 0;
    std::uint64_t errors = 0;
    std::uint64_t bytes_processed = 0;
    double elapsed_seconds = 0.0;
};

/// Per-test confusion counts over all successfully scored files.
std::vector<test_summary> summarize_by_test(const run_result& result);

struct type_cell {
    std::string type_tag;
    std::string test;
    confusion_counts counts;
    std::uint64_t errors = 0;
};

/// One cell per (type_tag, test); type tags sorted, tests in run order.
std::vector<type_cell> summarize_by_type(const run_result& result);

struct gate_row {
    std::string test;
    bool qualified = false;
    /// "qualified", "coverage", "throughput" or "coverage+throughput".
    std::string reason;
    double coverage = 0.0;
    std::uint64_t types_passing = 0;
    std::uint64_t types_total = 0;
    double throughput_mb_s = 0.0;
};

/// A test qualifies when its per-type accuracy reaches accuracy_min on at
/// least type_coverage_min of the type tags (or of the files, in per_file
/// mode) and its aggregate throughput reaches throughput_min_mb_s.
std::vector<gate_row> phase_gate(const run_result& result, const phase_gate_criteria& criteria);

} // namespace encscan
