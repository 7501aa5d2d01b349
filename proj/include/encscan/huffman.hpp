#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace encscan::huffman {

/// Code length per symbol; 0 means the symbol does not occur.
using code_lengths = std::vector<std::uint8_t>;

/// Static Huffman code lengths for an alphabet of frequencies.size() symbols.
/// Ties are broken by symbol index, so the result is deterministic.
code_lengths build_code_lengths(std::span<const std::uint64_t> frequencies);

/// Packs canonical codes MSB-first; the final byte is zero-padded.
std::vector<std::uint8_t> encode_symbols(std::span<const std::uint32_t> symbols,
                                         const code_lengths& lengths);
std::vector<std::uint32_t> decode_symbols(std::span<const std::uint8_t> packed,
                                          const code_lengths& lengths, std::size_t count);

/// Self-describing order-0 byte coder: 256 code-length bytes, a 4-byte
/// big-endian symbol count, then the packed bitstream.
std::vector<std::uint8_t> encode(std::span<const std::uint8_t> input);
std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded);

} // namespace encscan::huffman
