#include <doctest.h>

#include <cmath>

#include "encscan/error.hpp"
#include "encscan/keystream.hpp"
#include "encscan/metrics.hpp"

using namespace encscan;

namespace {

constexpr auto E = verdict::encrypted;
constexpr auto N = verdict::not_encrypted;

confusion_counts counts(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn) {
    return {tp, tn, fp, fn};
}

struct table_row {
    const char* test;
    double accuracy, recall, precision, f1;
};

// Accuracy, recall, precision and F1 as printed, two decimals.
constexpr table_row published[] = {
    {"BlockFrequency", 0.90, 0.71, 0.86, 0.78}, {"Frequency", 0.89, 0.77, 0.78, 0.77},
    {"Sums", 0.92, 0.75, 0.91, 0.82},           {"Longest Runs", 0.89, 0.78, 0.77, 0.78},
    {"Runs", 0.92, 0.76, 0.89, 0.82},           {"Sp-800 Serial", 0.93, 0.73, 0.97, 0.83},
    {"Shannon", 0.75, 0.86, 0.50, 0.63},        {"Chi-Square", 0.90, 0.74, 0.86, 0.79},
    {"Mean", 0.86, 0.77, 0.70, 0.73},           {"Monte Carlo", 0.82, 0.58, 0.64, 0.61},
    {"Serial Byte", 0.81, 0.23, 0.91, 0.37},
};

} // namespace

TEST_CASE("tally") {
    std::vector<std::pair<verdict, verdict>> both{{E, E}, {N, N}};
    CHECK(tally(both) == counts(1, 1, 0, 0));
    std::vector<std::pair<verdict, verdict>> fp{{E, N}};
    CHECK(tally(fp) == counts(0, 0, 1, 0));
    std::vector<std::pair<verdict, verdict>> fn{{N, E}};
    CHECK(tally(fn) == counts(0, 0, 0, 1));
}

TEST_CASE("accuracy") {
    CHECK(accuracy(counts(1, 1, 1, 1)) == 0.5);
    CHECK(accuracy(counts(9, 9, 1, 1)) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(accuracy(counts(0, 0, 1, 1)) == 0.0);
    try {
        accuracy(counts(0, 0, 0, 0));
        FAIL("empty cell accepted");
    } catch (const error& e) {
        CHECK(e.code() == errc::empty_cell);
    }
}

TEST_CASE("recall precision f1") {
    CHECK(recall(counts(1, 0, 0, 0)) == 1.0);
    CHECK_FALSE(recall(counts(0, 5, 5, 0)).has_value());
    CHECK_FALSE(precision(counts(0, 3, 0, 2)).has_value());
    CHECK(precision(counts(3, 0, 1, 0)) == 0.75);
    CHECK(*f1(counts(6, 10, 2, 4)) == doctest::Approx(2.0 * 0.75 * 0.6 / 1.35).epsilon(1e-15));
    CHECK_FALSE(f1(counts(0, 4, 0, 0)).has_value());
    CHECK_FALSE(f1(counts(0, 4, 2, 2)).has_value());

    auto serial = f1_from(0.97, 0.73);
    CHECK(*serial == doctest::Approx(0.833).epsilon(1e-3));
    CHECK(std::round(*serial * 100) / 100 == doctest::Approx(0.83));
    CHECK_FALSE(f1_from(0.0, 0.0).has_value());
}

TEST_CASE("published per-test rows are self-consistent") {
    for (const auto& row : published) {
        CAPTURE(row.test);
        CHECK(std::fabs(*f1_from(row.precision, row.recall) - row.f1) <= 0.01);
    }
}

TEST_CASE("merging counts is commutative and associative") {
    keystream rng(5, 5);
    for (int i = 0; i < 100; ++i) {
        auto r = [&] { return rng.below(1000); };
        auto a = counts(r(), r(), r(), r());
        auto b = counts(r(), r(), r(), r());
        auto c = counts(r(), r(), r(), r());
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a + b).total() == a.total() + b.total());
    }
}

TEST_CASE("throughput") {
    CHECK(throughput(1u << 20, 1.0).throughput_mb_per_s == 1.0);
    CHECK(throughput(0, 1.0).throughput_mb_per_s == 0.0);
    CHECK(throughput(10u << 20, 2.0).throughput_mb_per_s == 5.0);
    CHECK_THROWS_AS(throughput(10, 0.0), error);
    CHECK_THROWS_AS(throughput(10, -1.0), error);
}
