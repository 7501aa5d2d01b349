#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "encscan/battery.hpp"

namespace encscan {

enum class report_format { csv, json, text };
enum class report_granularity { per_file, per_type, per_test };

std::optional<report_format> parse_report_format(std::string_view s) noexcept;
std::optional<report_granularity> parse_report_granularity(std::string_view s) noexcept;

struct report_options {
    /// Elapsed time, throughput and the timestamp vary between runs; leave
    /// them out to get byte-identical reports.
    bool include_timing = true;
};

/// CSV: header row, '.' decimals, six decimal places, empty field for absent
/// values. JSON: {"metadata": {...}, "rows": [...]}. Text is only offered for
/// per_test and per_type; other combinations raise parameter_error.
std::string emit_report(const run_result& result, report_format format,
                        report_granularity granularity, const report_options& options = {});

std::string format_gate_table(const std::vector<gate_row>& rows, report_format format);

std::string run_result_to_json(const run_result& result);
run_result run_result_from_json(std::string_view text);
void save_run_result(const run_result& result, const std::filesystem::path& path);
run_result load_run_result(const std::filesystem::path& path);

} // namespace encscan
