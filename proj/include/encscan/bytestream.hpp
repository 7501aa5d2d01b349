#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace encscan {

/// Contents of one file (or an in-memory buffer) together with where it came from.
class byte_sample {
public:
    byte_sample() = default;
    byte_sample(std::string source, std::vector<std::uint8_t> bytes)
        : source_(std::move(source)), bytes_(std::move(bytes)) {}

    const std::string& source() const noexcept { return source_; }
    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
    std::uint64_t length_bytes() const noexcept { return bytes_.size(); }
    bool empty() const noexcept { return bytes_.empty(); }

private:
    std::string source_;
    std::vector<std::uint8_t> bytes_;
};

struct histogram256 {
    std::array<std::uint64_t, 256> counts{};
    std::uint64_t total = 0;
};

/// One byte per bit, values 0 or 1, most-significant bit of each input byte first.
class bit_sequence {
public:
    bit_sequence() = default;
    explicit bit_sequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

    /// Parses a string of '0'/'1' characters. Anything else is a parameter_error.
    static bit_sequence from_string(std::string_view text);

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::uint64_t length_bits() const noexcept { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }

private:
    std::vector<std::uint8_t> bits_;
};

/// Reads the first min(file size, max_bytes) bytes of a regular file.
/// Throws io_error for unreadable paths and empty_sample for zero-byte files.
byte_sample load_sample(const std::filesystem::path& path,
                        std::optional<std::uint64_t> max_bytes = std::nullopt);

histogram256 byte_histogram(const byte_sample& sample);
histogram256 byte_histogram(std::span<const std::uint8_t> bytes);

bit_sequence bits_msb_first(const byte_sample& sample);
bit_sequence bits_msb_first(std::span<const std::uint8_t> bytes);

} // namespace encscan
