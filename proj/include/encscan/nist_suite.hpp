#pragma once

// The six SP 800-22 tests used for per-file classification.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "encscan/bytestream.hpp"
#include "encscan/stat_math.hpp"
#include "encscan/test_id.hpp"

namespace encscan {

struct nist_test_result {
    test_id id = test_id::frequency;
    /// Serial: [p1, p2]. Cumulative sums: [forward, backward]. Others: one value.
    std::vector<probability_value> p_values;
    std::map<std::string, std::int64_t> parameters;
    bool prerequisite_failed = false;
    double elapsed_seconds = 0.0;
    std::uint64_t bytes_processed = 0;
};

struct nist_options {
    /// Lifts the minimum-length checks so short conformance vectors can run.
    bool test_mode = false;
    std::int64_t block_frequency_m = 128;
    /// Unset means default_serial_m(n).
    std::optional<int> serial_m;
};

inline constexpr std::uint64_t nist_min_bits = 100;
inline constexpr std::uint64_t longest_run_min_bits = 128;

nist_test_result frequency_monobit(const bit_sequence& bits, bool test_mode = false);
nist_test_result block_frequency(const bit_sequence& bits, std::int64_t block_size,
                                 bool test_mode = false);

/// A failed proportion prerequisite is not an error: the result carries
/// p = 0 and `prerequisite_failed`.
nist_test_result runs(const bit_sequence& bits, bool test_mode = false);

nist_test_result longest_run_of_ones(const bit_sequence& bits);
nist_test_result serial_test(const bit_sequence& bits, int m, bool test_mode = false);
nist_test_result cumulative_sums(const bit_sequence& bits, bool test_mode = false);

/// 16 once n reaches 2^20 bits, otherwise max(2, floor(log2 n) - 2).
int default_serial_m(std::uint64_t n_bits) noexcept;

nist_test_result run_nist_test(test_id id, const bit_sequence& bits,
                               const nist_options& options = {});

} // namespace encscan
