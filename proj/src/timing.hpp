#pragma once

#include <algorithm>
#include <chrono>

namespace encscan::detail {

class stopwatch {
public:
    stopwatch() : start_(std::chrono::steady_clock::now()) {}

    /// Never returns zero so throughput stays finite on very fast calls.
    double seconds() const {
        std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
        return std::max(d.count(), 1e-9);
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace encscan::detail
