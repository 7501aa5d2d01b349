#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace encscan {

/// Deterministic ChaCha20 keystream keyed by a 64-bit seed. Different
/// `stream` values give independent streams under the same seed.
class keystream {
public:
    using result_type = std::uint64_t;

    keystream(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain = 0);

    void fill(std::span<std::uint8_t> out);

    result_type operator()();
    /// Unbiased integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    /// Uniform double in [0, 1).
    double unit();

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    void refill();
    static const std::array<std::uint8_t, 4096>& zero_block();

    std::array<std::uint8_t, 32> key_{};
    std::array<std::uint8_t, 12> nonce_{};
    std::uint32_t block_counter_ = 0;
    std::array<std::uint8_t, 4096> buffer_{};
    std::size_t pos_ = 4096;
};

} // namespace encscan
