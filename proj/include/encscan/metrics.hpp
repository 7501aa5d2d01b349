#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "encscan/classifier.hpp"

namespace encscan {

struct confusion_counts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
    void add(verdict predicted, verdict truth) noexcept;

    confusion_counts& operator+=(const confusion_counts& other) noexcept;
    friend confusion_counts operator+(confusion_counts a, const confusion_counts& b) noexcept {
        return a += b;
    }
    friend bool operator==(const confusion_counts&, const confusion_counts&) = default;
};

confusion_counts tally(std::span<const std::pair<verdict, verdict>> predicted_and_truth);

/// Throws empty_cell when there are no counts.
double accuracy(const confusion_counts& c);

// Absent when the denominator is zero.
std::optional<double> recall(const confusion_counts& c);
std::optional<double> precision(const confusion_counts& c);
std::optional<double> f1(const confusion_counts& c);

/// Harmonic mean of precision and recall; absent when both are zero.
std::optional<double> f1_from(double precision_value, double recall_value);

inline constexpr double bytes_per_megabyte = 1048576.0;

struct performance_report {
    std::uint64_t bytes_processed = 0;
    double elapsed_seconds = 0.0;
    double throughput_mb_per_s = 0.0;
};

/// MB is 2^20 bytes. Non-positive elapsed time is a parameter_error.
performance_report throughput(std::uint64_t bytes, double elapsed_seconds);

} // namespace encscan
