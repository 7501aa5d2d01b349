#include "encscan/metrics.hpp"

#include <cmath>

#include "encscan/error.hpp"

namespace encscan {

void confusion_counts::add(verdict predicted, verdict truth) noexcept {
    const bool p = predicted == verdict::encrypted;
    const bool t = truth == verdict::encrypted;
    if (p && t) ++tp;
    else if (!p && !t) ++tn;
    else if (p) ++fp;
    else ++fn;
}

confusion_counts& confusion_counts::operator+=(const confusion_counts& other) noexcept {
    tp += other.tp;
    tn += other.tn;
    fp += other.fp;
    fn += other.fn;
    return *this;
}

confusion_counts tally(std::span<const std::pair<verdict, verdict>> predicted_and_truth) {
    confusion_counts c;
    for (const auto& [predicted, truth] : predicted_and_truth) c.add(predicted, truth);
    return c;
}

double accuracy(const confusion_counts& c) {
    if (c.total() == 0) {
        throw error(errc::empty_cell, "accuracy of an empty confusion cell");
    }
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::optional<double> recall(const confusion_counts& c) {
    if (c.tp + c.fn == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> precision(const confusion_counts& c) {
    if (c.tp + c.fp == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> f1_from(double precision_value, double recall_value) {
    if (precision_value + recall_value == 0.0) return std::nullopt;
    return 2.0 * precision_value * recall_value / (precision_value + recall_value);
}

std::optional<double> f1(const confusion_counts& c) {
    auto p = precision(c);
    auto r = recall(c);
    if (!p || !r) return std::nullopt;
    return f1_from(*p, *r);
}

performance_report throughput(std::uint64_t bytes, double elapsed_seconds) {
    if (!(elapsed_seconds > 0.0) || !std::isfinite(elapsed_seconds)) {
        throw error(errc::parameter_error, "elapsed time must be positive");
    }
    performance_report r;
    r.bytes_processed = bytes;
    r.elapsed_seconds = elapsed_seconds;
    r.throughput_mb_per_s = static_cast<double>(bytes) / (bytes_per_megabyte * elapsed_seconds);
    return r;
}

} // namespace encscan
