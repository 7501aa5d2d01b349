#include "encscan/keystream.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace encscan {

namespace {

void store_le64(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

} // namespace

keystream::keystream(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain) {
    if (sodium_init() < 0) {
        throw std::runtime_error("libsodium failed to initialise");
    }
    store_le64(key_.data(), seed);
    store_le64(nonce_.data(), stream);
    for (int i = 0; i < 4; ++i) nonce_[8 + i] = static_cast<std::uint8_t>(domain >> (8 * i));
}

void keystream::refill() {
    // 64-byte ChaCha blocks; the counter addresses the next unread block.
    crypto_stream_chacha20_ietf_xor_ic(buffer_.data(), zero_block().data(), buffer_.size(),
                                       nonce_.data(), block_counter_, key_.data());
    block_counter_ += static_cast<std::uint32_t>(buffer_.size() / 64);
    pos_ = 0;
}

const std::array<std::uint8_t, 4096>& keystream::zero_block() {
    static const std::array<std::uint8_t, 4096> zeros{};
    return zeros;
}

void keystream::fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        if (pos_ == buffer_.size()) refill();
        std::size_t take = std::min(out.size() - done, buffer_.size() - pos_);
        std::memcpy(out.data() + done, buffer_.data() + pos_, take);
        pos_ += take;
        done += take;
    }
}

keystream::result_type keystream::operator()() {
    std::array<std::uint8_t, 8> b;
    fill(b);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t keystream::below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t v;
    do {
        v = (*this)();
    } while (v >= limit);
    return v % bound;
}

double keystream::unit() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

} // namespace encscan
