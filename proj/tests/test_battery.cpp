#include <doctest.h>

#include <json.hpp>

#include "encscan/battery.hpp"
#include "encscan/error.hpp"
#include "encscan/report.hpp"
#include "test_support.hpp"

using namespace encscan;

namespace {

constexpr auto E = verdict::encrypted;
constexpr auto N = verdict::not_encrypted;

errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    FAIL("expected an encscan::error");
    return errc::io_error;
}

// Strips everything that legitimately varies between runs.
run_result without_timing(run_result r) {
    r.timestamp.clear();
    for (auto& c : r.cells) c.elapsed_seconds = 0.0;
    return r;
}

// One synthetic run cell per file, with a chosen number of correct verdicts
// in each type, for exercising the phase gate without scoring anything.
struct fixture_type {
    std::string tag;
    int files;
    int correct;
};

run_result gate_fixture(const std::vector<fixture_type>& types, double elapsed_per_file) {
    run_result r;
    r.tests = {"t"};
    for (const auto& t : types) {
        for (int i = 0; i < t.files; ++i) {
            const verdict label = t.tag.starts_with("ENC") ? E : N;
            r.entries.push_back({t.tag + "/" + std::to_string(i), t.tag, label});
            run_cell c;
            c.entry = r.entries.size() - 1;
            c.test = "t";
            c.ok = true;
            c.decision = i < t.correct ? label : (label == E ? N : E);
            c.bytes_processed = 1 << 20;
            c.elapsed_seconds = elapsed_per_file;
            r.cells.push_back(c);
        }
    }
    return r;
}

std::vector<fixture_type> ten_types(int passing) {
    std::vector<fixture_type> out;
    for (int i = 0; i < 10; ++i) out.push_back({"TYPE" + std::to_string(i), 10, i < passing ? 9 : 7});
    return out;
}

} // namespace

TEST_CASE("battery scores every pair and marks failures") {
    testing::scratch_dir dir("battery");
    corpus_manifest m;
    m.base_dir = dir.path();
    for (int i = 0; i < 4; ++i) {
        auto name = "f" + std::to_string(i) + ".bin";
        dir.write(name, testing::random_bytes(8192, i));
        m.entries.push_back({name, i < 2 ? "A" : "B", i % 2 ? E : N});
    }
    battery_options opts;
    opts.tests = {test_id::shannon, test_id::frequency};
    auto r = run_battery(m, opts, {});
    CHECK(r.cells.size() == 8);
    CHECK(r.error_count() == 0);
    for (std::size_t e = 0; e < 4; ++e) {
        CHECK(r.cell(e, 0).test == "shannon");
        CHECK(r.cell(e, 1).test == "frequency");
        CHECK(r.cell(e, 0).entry == e);
        CHECK(r.cell(e, 0).statistic.has_value());
        CHECK(r.cell(e, 1).p_values.size() == 1);
        CHECK(r.cell(e, 0).bytes_processed == 8192);
    }

    m.entries.push_back({"missing.bin", "B", N});
    auto broken = run_battery(m, opts, {});
    CHECK(broken.error_count() == 2);
    CHECK_FALSE(broken.cell(4, 0).ok);
    CHECK(broken.cell(4, 1).error.starts_with("IoError"));
}

TEST_CASE("short files error on the tests that need more data") {
    testing::scratch_dir dir("battery-short");
    dir.write("tiny.bin", {1, 2, 3, 4, 5});
    corpus_manifest m;
    m.base_dir = dir.path();
    m.entries.push_back({"tiny.bin", "X", N});
    battery_options opts;
    opts.tests = {all_tests.begin(), all_tests.end()};
    auto r = run_battery(m, opts, {});
    CHECK(r.cell(0, 0).error.starts_with("InsufficientData"));
    CHECK(r.cell(0, 6).ok);  // shannon
}

TEST_CASE("worker count does not change results") {
    testing::scratch_dir dir("battery-workers");
    synth_spec spec;
    for (auto cat : {synth_category::text, synth_category::structured, synth_category::entropy_coded,
                     synth_category::pseudo_encrypted}) {
        spec[cat] = {4, 16384};
    }
    auto m = synthesize_corpus(spec, 11, dir.path());
    m.entries.push_back({"missing.bin", "TEXT", N});

    battery_options opts;
    opts.tests = {all_tests.begin(), all_tests.end()};
    opts.combiners = true;
    opts.seed = 11;
    opts.workers = 1;
    auto one = run_battery(m, opts, {});
    opts.workers = 8;
    auto eight = run_battery(m, opts, {});
    CHECK(one.tests.size() == 16);
    report_options quiet{false};
    for (auto g : {report_granularity::per_file, report_granularity::per_type, report_granularity::per_test}) {
        for (auto f : {report_format::csv, report_format::json}) {
            CHECK(emit_report(one, f, g, quiet) == emit_report(eight, f, g, quiet));
        }
    }
    CHECK(run_result_to_json(without_timing(one)) == run_result_to_json(without_timing(eight)));
}

TEST_CASE("combined columns follow their inputs") {
    testing::scratch_dir dir("battery-combo");
    dir.write("r.bin", testing::random_bytes(65536, 3));
    corpus_manifest m;
    m.base_dir = dir.path();
    m.entries.push_back({"r.bin", "R", E});
    battery_options opts;
    opts.tests = {test_id::shannon, test_id::serial_correlation};
    opts.combiners = true;
    auto r = run_battery(m, opts, {});
    REQUIRE(r.tests.size() == 6);
    CHECK(r.tests[2] == combo_shannon_override);
    CHECK(r.tests[5] == combo_majority);
    const bool scc_small = std::abs(*r.cell(0, 1).statistic) < 0.0011;
    const verdict expect = r.cell(0, 0).decision == E && scc_small ? E : N;
    CHECK(r.cell(0, 2).decision == expect);
    CHECK(*r.cell(0, 2).auxiliary == *r.cell(0, 1).statistic);
}

TEST_CASE("run configuration") {
    auto cfg = parse_run_config("shannon_bits_min = 7.9\n"
                                "gate_accuracy_min = 0.75\n"
                                "gate_coverage_mode = per_file\n"
                                "serial_m = 8\n"
                                "max_bytes = 4096\n");
    CHECK(cfg.thresholds.shannon_bits_min == 7.9);
    CHECK(cfg.gate.accuracy_min == 0.75);
    CHECK(cfg.gate.coverage == gate_coverage_mode::per_file);
    CHECK(cfg.nist.serial_m == 8);
    CHECK(cfg.max_bytes == 4096u);
    CHECK(cfg.digest() != run_config{}.digest());
    CHECK(parse_run_config("").digest() == run_config{}.digest());
    CHECK(run_config{}.digest().size() == 16);
    CHECK(code_of([] { parse_run_config("gate_accuracy_min = 1.5\n"); }) == errc::validation_error);
    CHECK(code_of([] { parse_run_config("gate_coverage_mode = none\n"); }) == errc::validation_error);
    CHECK(code_of([] { parse_run_config("nonsense = 1\n"); }) == errc::validation_error);
}

TEST_CASE("phase gate boundaries") {
    phase_gate_criteria gate;

    auto nine = phase_gate(gate_fixture(ten_types(9), 0.01), gate);
    REQUIRE(nine.size() == 1);
    CHECK(nine[0].qualified);
    CHECK(nine[0].reason == "qualified");
    CHECK(nine[0].types_passing == 9);
    CHECK(nine[0].coverage == doctest::Approx(0.9));

    auto eight = phase_gate(gate_fixture(ten_types(8), 0.01), gate);
    CHECK_FALSE(eight[0].qualified);
    CHECK(eight[0].reason == "coverage");

    // Exactly 0.80 accuracy counts as passing.
    auto exact = gate_fixture({{"A", 5, 4}, {"B", 5, 4}}, 0.01);
    CHECK(phase_gate(exact, gate)[0].qualified);
    auto below = gate_fixture({{"A", 100, 79}, {"B", 5, 5}}, 0.01);
    CHECK(phase_gate(below, gate)[0].reason == "coverage");

    // 17 of 20 types is exactly 0.85 coverage.
    std::vector<fixture_type> twenty;
    for (int i = 0; i < 20; ++i) twenty.push_back({"T" + std::to_string(100 + i), 5, i < 17 ? 5 : 0});
    CHECK(phase_gate(gate_fixture(twenty, 0.01), gate)[0].qualified);
    twenty[16].correct = 3;
    CHECK(phase_gate(gate_fixture(twenty, 0.01), gate)[0].reason == "coverage");

    // 1 MiB per file at 2 s per file is 0.5 MB/s.
    auto slow = phase_gate(gate_fixture(ten_types(10), 2.0), gate);
    CHECK_FALSE(slow[0].qualified);
    CHECK(slow[0].reason == "throughput");
    CHECK(slow[0].throughput_mb_s == doctest::Approx(0.5));
    CHECK(phase_gate(gate_fixture(ten_types(10), 1.0), gate)[0].qualified);
    CHECK(phase_gate(gate_fixture(ten_types(5), 2.0), gate)[0].reason == "coverage+throughput");

    gate.throughput_min_mb_s = 0.25;
    CHECK(phase_gate(gate_fixture(ten_types(10), 2.0), gate)[0].qualified);
}

TEST_CASE("phase gate coverage by files") {
    phase_gate_criteria gate;
    gate.coverage = gate_coverage_mode::per_file;
    // Two of three types pass but they hold 90% of the files.
    auto r = gate_fixture({{"A", 45, 45}, {"B", 45, 45}, {"C", 10, 0}}, 0.01);
    auto rows = phase_gate(r, gate);
    CHECK(rows[0].coverage == doctest::Approx(0.9));
    CHECK(rows[0].qualified);
    gate.coverage = gate_coverage_mode::per_type;
    CHECK_FALSE(phase_gate(r, gate)[0].qualified);
}

TEST_CASE("phase gate input checks") {
    phase_gate_criteria gate;
    CHECK(code_of([&] { phase_gate(run_result{}, gate); }) == errc::empty_run);
    CHECK(code_of([&] { phase_gate(gate_fixture({{"A", 3, 3}}, 0.01), gate); }) == errc::parameter_error);
    gate.accuracy_min = 0.0;
    CHECK(code_of([&] { phase_gate(gate_fixture(ten_types(9), 0.01), gate); }) == errc::validation_error);
}

TEST_CASE("report shapes") {
    auto r = gate_fixture({{"A", 4, 3}, {"B", 4, 4}, {"ENC", 4, 2}}, 0.01);
    r.tests = {"t", "u"};
    std::vector<run_cell> cells;
    for (const auto& c : r.cells) {
        cells.push_back(c);
        auto u = c;
        u.test = "u";
        u.ok = false;
        u.error = "InsufficientData: short, \"quoted\"";
        cells.push_back(u);
    }
    r.cells = cells;
    report_options quiet{false};

    auto per_test = emit_report(r, report_format::csv, report_granularity::per_test, quiet);
    CHECK(std::count(per_test.begin(), per_test.end(), '\n') == 3);
    CHECK(per_test.starts_with("test,scored,errors,tp,tn,fp,fn,accuracy,recall,precision,f1\n"));
    CHECK(per_test.find("\nt,12,0,2,7,1,2,0.750000,0.500000,0.666667,0.571429\n") != std::string::npos);
    CHECK(per_test.find("\nu,0,12,0,0,0,0,,,,\n") != std::string::npos);

    auto timed = emit_report(r, report_format::csv, report_granularity::per_test);
    CHECK(timed.find("throughput_mb_s") != std::string::npos);

    auto per_type = emit_report(r, report_format::csv, report_granularity::per_type, quiet);
    CHECK(per_type == "type_tag,t,u\nA,0.750000,\nB,1.000000,\nENC,0.500000,\n");

    auto per_file = emit_report(r, report_format::csv, report_granularity::per_file, quiet);
    CHECK(std::count(per_file.begin(), per_file.end(), '\n') == 25);
    CHECK(per_file.find("\"InsufficientData: short, \"\"quoted\"\"\"") != std::string::npos);

    auto js = nlohmann::json::parse(emit_report(r, report_format::json, report_granularity::per_file, quiet));
    CHECK(js["rows"].size() == 24);
    for (const char* field : {"path", "type_tag", "label", "test_id", "statistic", "p_values", "decision"}) {
        CHECK(js["rows"][0].contains(field));
    }
    CHECK_FALSE(js["metadata"].contains("timestamp"));
    CHECK(js["metadata"]["tests"].size() == 2);

    auto type_json = nlohmann::json::parse(emit_report(r, report_format::json, report_granularity::per_type));
    CHECK(type_json["rows"].size() == 6);
    CHECK(type_json["metadata"].contains("timestamp"));

    CHECK(code_of([&] { emit_report(r, report_format::text, report_granularity::per_file); }) ==
          errc::parameter_error);
    CHECK(emit_report(r, report_format::text, report_granularity::per_test).starts_with("test "));
    CHECK(code_of([] { emit_report(run_result{}, report_format::csv, report_granularity::per_test); }) ==
          errc::empty_run);
}

TEST_CASE("gate table formats") {
    auto rows = phase_gate(gate_fixture(ten_types(9), 0.01), {});
    auto csv = format_gate_table(rows, report_format::csv);
    CHECK(csv.starts_with("test,qualified,reason,coverage,types_passing,types_total,throughput_mb_s\n"));
    CHECK(csv.find("t,true,qualified,0.900000,9,10,") != std::string::npos);
    auto js = nlohmann::json::parse(format_gate_table(rows, report_format::json));
    CHECK(js[0]["qualified"] == true);
    CHECK(js[0]["reason"] == "qualified");
}

TEST_CASE("run results round trip through json") {
    auto r = gate_fixture({{"A", 3, 2}, {"ENC-X", 3, 3}}, 0.125);
    r.seed = 99;
    r.config_digest = "abc";
    r.timestamp = "2026-01-01T00:00:00Z";
    r.cells[0].statistic = 7.123456789012345;
    r.cells[0].auxiliary = 1e-300;
    r.cells[1].p_values = {0.1, 0.25};
    r.cells[1].flags = {"underflow"};
    r.cells[2].ok = false;
    r.cells[2].error = "IoError: gone";

    auto text = run_result_to_json(r);
    auto back = run_result_from_json(text);
    CHECK(run_result_to_json(back) == text);
    CHECK(back.seed == 99u);
    CHECK(*back.cells[0].statistic == 7.123456789012345);
    CHECK(back.cells[1].p_values == std::vector<double>{0.1, 0.25});
    CHECK(back.entries[3].label == E);
    for (auto g : {report_granularity::per_file, report_granularity::per_type, report_granularity::per_test}) {
        CHECK(emit_report(back, report_format::csv, g) == emit_report(r, report_format::csv, g));
    }

    testing::scratch_dir dir("runjson");
    save_run_result(r, dir.path() / "run.json");
    CHECK(run_result_to_json(load_run_result(dir.path() / "run.json")) == text);

    CHECK(code_of([] { run_result_from_json("{"); }) == errc::io_error);
    CHECK(code_of([] { run_result_from_json("{\"schema_version\": 1}"); }) == errc::io_error);
    auto broken = nlohmann::json::parse(text);
    broken["cells"].erase(0);
    CHECK(code_of([&] { run_result_from_json(broken.dump()); }) == errc::io_error);
    CHECK(code_of([&] { load_run_result(dir.path() / "absent.json"); }) == errc::io_error);
}

TEST_CASE("option parsers") {
    CHECK(parse_report_format("json") == report_format::json);
    CHECK_FALSE(parse_report_format("xml").has_value());
    CHECK(parse_report_granularity("per_type") == report_granularity::per_type);
    CHECK_FALSE(parse_report_granularity("per_byte").has_value());
}
