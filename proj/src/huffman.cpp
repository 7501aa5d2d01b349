#include "encscan/huffman.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include "encscan/error.hpp"

namespace encscan::huffman {

namespace {

constexpr int max_code_length = 57;

std::vector<std::uint64_t> canonical_codes(const code_lengths& lengths) {
    std::vector<std::uint32_t> order(lengths.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return lengths[a] < lengths[b]; });

    std::vector<std::uint64_t> codes(lengths.size(), 0);
    std::uint64_t code = 0;
    int prev_len = 0;
    for (std::uint32_t s : order) {
        if (lengths[s] == 0) continue;
        if (lengths[s] > max_code_length) {
            throw error(errc::validation_error, "huffman code length out of range");
        }
        code <<= (lengths[s] - prev_len);
        codes[s] = code++;
        prev_len = lengths[s];
    }
    return codes;
}

class bit_writer {
public:
    explicit bit_writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void put(std::uint64_t code, int length) {
        for (int i = length - 1; i >= 0; --i) {
            acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((code >> i) & 1u));
            if (++filled_ == 8) {
                out_.push_back(acc_);
                acc_ = 0;
                filled_ = 0;
            }
        }
    }

    void flush() {
        if (filled_ > 0) out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - filled_)));
        filled_ = 0;
        acc_ = 0;
    }

private:
    std::vector<std::uint8_t>& out_;
    std::uint8_t acc_ = 0;
    int filled_ = 0;
};

} // namespace

code_lengths build_code_lengths(std::span<const std::uint64_t> frequencies) {
    struct node {
        std::uint64_t weight;
        std::size_t id;
    };
    auto heavier = [](const node& a, const node& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.id > b.id;
    };
    std::priority_queue<node, std::vector<node>, decltype(heavier)> heap(heavier);
    std::vector<std::size_t> parent(frequencies.size(), SIZE_MAX);
    for (std::size_t s = 0; s < frequencies.size(); ++s) {
        if (frequencies[s] > 0) heap.push({frequencies[s], s});
    }

    code_lengths lengths(frequencies.size(), 0);
    if (heap.empty()) return lengths;
    if (heap.size() == 1) {
        lengths[heap.top().id] = 1;
        return lengths;
    }
    while (heap.size() > 1) {
        node a = heap.top();
        heap.pop();
        node b = heap.top();
        heap.pop();
        const std::size_t id = parent.size();
        parent.push_back(SIZE_MAX);
        parent[a.id] = id;
        parent[b.id] = id;
        heap.push({a.weight + b.weight, id});
    }

    for (std::size_t s = 0; s < frequencies.size(); ++s) {
        if (frequencies[s] == 0) continue;
        int depth = 0;
        for (std::size_t p = parent[s]; p != SIZE_MAX; p = parent[p]) ++depth;
        if (depth > max_code_length) {
            throw error(errc::parameter_error, "huffman code length limit exceeded");
        }
        lengths[s] = static_cast<std::uint8_t>(depth);
    }
    return lengths;
}

std::vector<std::uint8_t> encode_symbols(std::span<const std::uint32_t> symbols,
                                         const code_lengths& lengths) {
    const auto codes = canonical_codes(lengths);
    std::vector<std::uint8_t> out;
    bit_writer writer(out);
    for (std::uint32_t s : symbols) {
        if (s >= lengths.size() || lengths[s] == 0) {
            throw error(errc::parameter_error, "symbol has no huffman code");
        }
        writer.put(codes[s], lengths[s]);
    }
    writer.flush();
    return out;
}

std::vector<std::uint32_t> decode_symbols(std::span<const std::uint8_t> packed,
                                          const code_lengths& lengths, std::size_t count) {
    const auto codes = canonical_codes(lengths);
    std::map<std::pair<int, std::uint64_t>, std::uint32_t> table;
    for (std::size_t s = 0; s < lengths.size(); ++s) {
        if (lengths[s]) table.emplace(std::pair{int{lengths[s]}, codes[s]}, static_cast<std::uint32_t>(s));
    }

    std::vector<std::uint32_t> out;
    out.reserve(count);
    std::size_t bit = 0;
    const std::size_t total_bits = packed.size() * 8;
    while (out.size() < count) {
        std::uint64_t acc = 0;
        bool matched = false;
        for (int len = 1; len <= max_code_length; ++len) {
            if (bit >= total_bits) {
                throw error(errc::validation_error, "huffman stream truncated");
            }
            acc = (acc << 1) | ((packed[bit / 8] >> (7 - bit % 8)) & 1u);
            ++bit;
            if (auto it = table.find({len, acc}); it != table.end()) {
                out.push_back(it->second);
                matched = true;
                break;
            }
        }
        if (!matched) throw error(errc::validation_error, "invalid huffman code");
    }
    return out;
}

std::vector<std::uint8_t> encode(std::span<const std::uint8_t> input) {
    std::vector<std::uint64_t> freq(256, 0);
    for (std::uint8_t b : input) ++freq[b];
    const auto lengths = build_code_lengths(freq);

    std::vector<std::uint8_t> out(lengths.begin(), lengths.end());
    const auto count = static_cast<std::uint32_t>(input.size());
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(count >> shift));
    }
    std::vector<std::uint32_t> symbols(input.begin(), input.end());
    auto packed = encode_symbols(symbols, lengths);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
}

std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded) {
    if (encoded.size() < 260) {
        throw error(errc::validation_error, "huffman stream shorter than its header");
    }
    code_lengths lengths(encoded.begin(), encoded.begin() + 256);
    std::uint32_t count = 0;
    for (int i = 0; i < 4; ++i) count = (count << 8) | encoded[256 + i];
    auto symbols = decode_symbols(encoded.subspan(260), lengths, count);
    return {symbols.begin(), symbols.end()};
}

} // namespace encscan::huffman
