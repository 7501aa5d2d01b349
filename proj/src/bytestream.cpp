#include "encscan/bytestream.hpp"

#include <algorithm>
#include <fstream>
#include <system_error>

#include "encscan/error.hpp"

namespace encscan {

namespace fs = std::filesystem;

bit_sequence bit_sequence::from_string(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw error(errc::parameter_error, "bit string may only contain '0' and '1'");
        }
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return bit_sequence(std::move(bits));
}

byte_sample load_sample(const fs::path& path, std::optional<std::uint64_t> max_bytes) {
    if (max_bytes && *max_bytes == 0) {
        throw error(errc::parameter_error, "max_bytes must be positive");
    }
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw error(errc::io_error, "not a readable regular file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw error(errc::io_error, "cannot open: " + path.string());
    }

    auto size = fs::file_size(path, ec);
    if (ec) {
        throw error(errc::io_error, "cannot stat: " + path.string());
    }
    std::uint64_t want = max_bytes ? std::min<std::uint64_t>(size, *max_bytes) : size;

    std::vector<std::uint8_t> bytes(want);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(want));
    bytes.resize(static_cast<std::size_t>(in.gcount()));
    if (in.bad()) {
        throw error(errc::io_error, "read failed: " + path.string());
    }
    if (bytes.empty()) {
        throw error(errc::empty_sample, "empty file: " + path.string());
    }
    return byte_sample(path.string(), std::move(bytes));
}

histogram256 byte_histogram(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) {
        throw error(errc::empty_sample, "histogram of an empty sample");
    }
    histogram256 hist;
    for (std::uint8_t b : bytes) ++hist.counts[b];
    hist.total = bytes.size();
    return hist;
}

histogram256 byte_histogram(const byte_sample& sample) {
    return byte_histogram(sample.bytes());
}

bit_sequence bits_msb_first(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) {
        throw error(errc::empty_sample, "bit view of an empty sample");
    }
    std::vector<std::uint8_t> bits(bytes.size() * 8);
    auto out = bits.begin();
    for (std::uint8_t b : bytes) {
        for (int shift = 7; shift >= 0; --shift) {
            *out++ = static_cast<std::uint8_t>((b >> shift) & 1u);
        }
    }
    return bit_sequence(std::move(bits));
}

bit_sequence bits_msb_first(const byte_sample& sample) {
    return bits_msb_first(sample.bytes());
}

} // namespace encscan
