#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace encscan::detail {

std::string_view trim(std::string_view s) noexcept;

/// Strict full-string parse; throws validation_error naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
std::uint64_t parse_u64(std::string_view text, std::string_view what);

/// Walks `key = value` lines, skipping blanks and '#' comments. Malformed
/// lines and repeated keys raise validation_error with the line number.
void for_each_key_value(
    std::string_view text,
    const std::function<void(std::string_view key, std::string_view value, std::size_t line)>& fn);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Fixed notation with six decimals, the report number format.
std::string format_fixed6(double v);

} // namespace encscan::detail
