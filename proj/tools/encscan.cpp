// encscan: randomness tests and encrypted-file classification from the command line.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "encscan/battery.hpp"
#include "encscan/corpus.hpp"
#include "encscan/error.hpp"
#include "encscan/report.hpp"

namespace {

using namespace encscan;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_io = 2;
constexpr int exit_partial = 3;

constexpr const char* config_env = "ENCSCAN_CONFIG";

int verbosity = 0;

void note(int level, const std::string& msg) {
    if (verbosity >= level) std::cerr << "encscan: " << msg << '\n';
}

int fail(const error& e) {
    std::cerr << "encscan: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == errc::io_error ? exit_io : exit_usage;
}

int usage(const std::string& msg) {
    std::cerr << "encscan: " << msg << '\n';
    return exit_usage;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<test_id> parse_tests(const std::string& list) {
    if (list.empty() || list == "all") return {all_tests.begin(), all_tests.end()};
    std::vector<test_id> out;
    for (const auto& name : split_list(list)) {
        auto id = parse_test_id(name);
        if (!id) throw error(errc::parameter_error, "unknown test '" + name + "'");
        if (std::find(out.begin(), out.end(), *id) != out.end()) {
            throw error(errc::parameter_error, "test '" + name + "' listed twice");
        }
        out.push_back(*id);
    }
    if (out.empty()) throw error(errc::parameter_error, "empty test list");
    return out;
}

run_config load_config(const std::string& path, std::optional<std::uint64_t> max_bytes) {
    run_config cfg;
    if (!path.empty()) {
        note(1, "config " + path);
        cfg = load_run_config(path);
    }
    if (max_bytes) {
        if (*max_bytes == 0) throw error(errc::parameter_error, "--max-bytes must be positive");
        cfg.max_bytes = max_bytes;
    }
    return cfg;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        throw error(errc::io_error, "cannot write " + path);
    }
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    return s == "-0.000000" ? "0.000000" : s;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

// ---- analyze ----

struct analyze_flags {
    std::string path;
    std::string thresholds;
    std::optional<std::uint64_t> max_bytes;
    std::string format = "text";
};

int cmd_analyze(const analyze_flags& f) {
    auto format = parse_report_format(f.format);
    if (!format) return usage("unknown format '" + f.format + "'");
    run_config cfg = load_config(f.thresholds, f.max_bytes);
    byte_sample sample = load_sample(f.path, cfg.max_bytes);

    std::vector<run_cell> cells;
    for (test_id id : all_tests) cells.push_back(score_sample(sample, id, cfg));
    for (auto& c : score_combiners(sample, cfg)) cells.push_back(std::move(c));

    auto p_text = [](const run_cell& c) {
        std::vector<std::string> ps;
        for (double p : c.p_values) ps.push_back(fixed6(p));
        return join(ps, ";");
    };

    if (*format == report_format::json) {
        nlohmann::ordered_json doc;
        doc["path"] = f.path;
        doc["bytes"] = sample.length_bytes();
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto& c : cells) {
            nlohmann::ordered_json row;
            row["test"] = c.test;
            row["statistic"] = c.statistic ? nlohmann::ordered_json(*c.statistic) : nullptr;
            row["auxiliary"] = c.auxiliary ? nlohmann::ordered_json(*c.auxiliary) : nullptr;
            row["p_values"] = c.p_values;
            row["verdict"] = c.ok ? nlohmann::ordered_json(to_string(c.decision)) : nullptr;
            row["flags"] = c.flags;
            row["error"] = c.ok ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.error);
            doc["rows"].push_back(std::move(row));
        }
        std::cout << doc.dump(2) << '\n';
        return exit_ok;
    }

    if (*format == report_format::csv) {
        std::cout << "test,statistic,auxiliary,p_values,verdict,flags,error\n";
        for (const auto& c : cells) {
            std::string err = c.error;
            if (err.find_first_of(",\"") != std::string::npos) {
                std::string q = "\"";
                for (char ch : err) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                err = q + "\"";
            }
            std::cout << c.test << ',' << (c.statistic ? fixed6(*c.statistic) : "") << ','
                      << (c.auxiliary ? fixed6(*c.auxiliary) : "") << ',' << p_text(c) << ','
                      << (c.ok ? std::string(to_string(c.decision)) : "") << ','
                      << join(c.flags, ";") << ',' << err << '\n';
        }
        return exit_ok;
    }

    std::cout << f.path << " (" << sample.length_bytes() << " bytes)\n\n";
    std::vector<std::vector<std::string>> rows{{"test", "statistic", "p_values", "verdict", "notes"}};
    for (const auto& c : cells) {
        std::string stat = c.statistic ? fixed6(*c.statistic) : "-";
        std::string notes = c.ok ? join(c.flags, ",") : c.error;
        std::string p = p_text(c);
        if (c.test == name_of(test_id::chi_square) && c.auxiliary) p = fixed6(*c.auxiliary);
        rows.push_back({c.test, stat, p.empty() ? "-" : p,
                        c.ok ? std::string(to_string(c.decision)) : "error", notes});
    }
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    for (std::size_t n = 0; n < rows.size(); ++n) {
        if (n == all_tests.size() + 1) std::cout << '\n';
        std::string line;
        for (std::size_t i = 0; i < rows[n].size(); ++i) {
            line += rows[n][i];
            if (i + 1 < rows[n].size()) line += std::string(width[i] - rows[n][i].size() + 2, ' ');
        }
        line.erase(line.find_last_not_of(' ') + 1);
        std::cout << line << '\n';
    }
    return exit_ok;
}

// ---- synth ----

struct synth_flags {
    std::string out;
    std::uint64_t per_category = 5;
    std::uint64_t size = 65536;
    std::string categories = "TEXT,STRUCTURED,ENTROPY-CODED,PSEUDO-ENCRYPTED";
    std::uint64_t seed = 1;
};

int cmd_synth(const synth_flags& f) {
    if (f.size == 0) return usage("--size must be positive");
    if (f.per_category == 0) return usage("--per-category must be positive");
    synth_spec spec;
    for (const auto& name : split_list(f.categories)) {
        auto c = parse_synth_category(name);
        if (!c) return usage("unknown category '" + name + "'");
        spec[*c] = {f.per_category, f.size};
    }
    if (spec.empty()) return usage("no categories requested");
    auto manifest = synthesize_corpus(spec, f.seed, f.out);
    note(1, "wrote " + std::to_string(manifest.entries.size()) + " files under " + f.out);
    std::cout << (std::filesystem::path(f.out) / manifest_file_name).string() << '\n';
    return exit_ok;
}

// ---- battery / report ----

struct render_flags {
    std::string format = "csv";
    std::string granularity = "per_test";
    bool phase_gate = false;
    bool no_timing = false;
    std::string output;
    std::string thresholds;
};

int render(const run_result& result, const render_flags& f, const run_config& cfg) {
    auto format = parse_report_format(f.format);
    if (!format) return usage("unknown format '" + f.format + "'");
    auto granularity = parse_report_granularity(f.granularity);
    if (!granularity) return usage("unknown granularity '" + f.granularity + "'");

    report_options opts;
    opts.include_timing = !f.no_timing;
    std::string text = emit_report(result, *format, *granularity, opts);
    if (f.phase_gate) {
        auto rows = phase_gate(result, cfg.gate);
        text += (*format == report_format::json ? "" : "\n");
        text += format_gate_table(rows, *format);
    }
    write_output(f.output, text);
    return exit_ok;
}

struct battery_flags {
    std::string manifest;
    std::string tests;
    bool combiners = false;
    unsigned workers = 0;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> max_bytes;
    std::string save_run;
    render_flags render;
};

int cmd_battery(const battery_flags& f) {
    // Reject bad presentation flags before spending time on the run.
    if (!parse_report_format(f.render.format)) return usage("unknown format '" + f.render.format + "'");
    if (!parse_report_granularity(f.render.granularity)) {
        return usage("unknown granularity '" + f.render.granularity + "'");
    }
    run_config cfg = load_config(f.render.thresholds, f.max_bytes);
    corpus_manifest manifest = load_manifest(f.manifest);
    validate_manifest(manifest);

    battery_options opts;
    opts.tests = parse_tests(f.tests);
    opts.combiners = f.combiners;
    opts.workers = f.workers ? f.workers : std::max(1u, std::thread::hardware_concurrency());
    opts.seed = f.seed;
    note(1, "scoring " + std::to_string(manifest.entries.size()) + " files with " +
                std::to_string(opts.workers) + " workers");

    run_result result = run_battery(manifest, opts, cfg);
    if (!f.save_run.empty()) save_run_result(result, f.save_run);
    int rc = render(result, f.render, cfg);
    if (rc != exit_ok) return rc;

    const std::size_t errors = result.error_count();
    if (errors > 0) {
        note(0, std::to_string(errors) + " test cells failed");
        if (verbosity >= 1) {
            for (const auto& c : result.cells) {
                if (!c.ok) note(1, result.entries[c.entry].path + " " + c.test + ": " + c.error);
            }
        }
        return exit_partial;
    }
    return exit_ok;
}

struct report_flags {
    std::string run;
    render_flags render;
};

int cmd_report(const report_flags& f) {
    if (!parse_report_format(f.render.format)) return usage("unknown format '" + f.render.format + "'");
    if (!parse_report_granularity(f.render.granularity)) {
        return usage("unknown granularity '" + f.render.granularity + "'");
    }
    run_config cfg = load_config(f.render.thresholds, std::nullopt);
    run_result result = load_run_result(f.run);
    return render(result, f.render, cfg);
}

void add_render_flags(CLI::App* cmd, render_flags& f) {
    cmd->add_option("--format", f.format, "Output format: csv, json or text")->capture_default_str();
    cmd->add_option("--granularity", f.granularity, "per_file, per_type or per_test")
        ->capture_default_str();
    cmd->add_flag("--phase-gate", f.phase_gate, "Append the phase-gate qualification table");
    cmd->add_flag("--no-timing", f.no_timing,
                  "Omit timestamp, elapsed time and throughput (reproducible output)");
    cmd->add_option("-o,--output", f.output, "Write the report here instead of stdout");
    cmd->add_option("--thresholds", f.thresholds, "Threshold / run configuration file")
        ->envname(config_env);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byte-level randomness tests and encrypted-file classification"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", verbosity, "More diagnostics on stderr (repeat for more)");
    app.footer(std::string("Environment:\n  ") + config_env +
               "  default configuration file for --thresholds\n\n"
               "Exit codes: 0 success, 1 usage or validation error, 2 I/O error,\n"
               "            3 battery finished but some files or tests failed");

    analyze_flags af;
    auto* analyze = app.add_subcommand("analyze", "Run every test on one file and print verdicts");
    analyze->add_option("path", af.path, "File to analyze")->required();
    analyze->add_option("--thresholds", af.thresholds, "Threshold / run configuration file")
        ->envname(config_env);
    analyze->add_option("--max-bytes", af.max_bytes, "Only read this many leading bytes");
    analyze->add_option("--format", af.format, "Output format: text, csv or json")->capture_default_str();

    synth_flags sf;
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
    synth->add_option("--out", sf.out, "Output directory")->required();
    synth->add_option("--per-category", sf.per_category, "Files per category")->capture_default_str();
    synth->add_option("--size", sf.size, "File size in bytes")->capture_default_str();
    synth->add_option("--categories", sf.categories, "Comma-separated categories")->capture_default_str();
    synth->add_option("--seed", sf.seed, "Generator seed")->capture_default_str();

    battery_flags bf;
    auto* battery = app.add_subcommand("battery", "Score every file in a manifest and report");
    battery->add_option("manifest", bf.manifest, "Corpus manifest")->required();
    battery->add_option("--tests", bf.tests, "Comma-separated test names, or 'all'");
    battery->add_flag("--combiners", bf.combiners, "Add the override and majority-vote columns");
    battery->add_option("--workers", bf.workers, "Worker threads (default: logical CPUs)")
        ->check(CLI::PositiveNumber);
    battery->add_option("--seed", bf.seed, "Seed recorded with the run");
    battery->add_option("--max-bytes", bf.max_bytes, "Only read this many leading bytes of each file");
    battery->add_option("--save-run", bf.save_run, "Store the full run result as JSON");
    add_render_flags(battery, bf.render);

    report_flags rf;
    auto* report = app.add_subcommand("report", "Re-render a stored run result");
    report->add_option("run", rf.run, "Run result written by battery --save-run")->required();
    add_render_flags(report, rf.render);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*analyze) return cmd_analyze(af);
        if (*synth) return cmd_synth(sf);
        if (*battery) return cmd_battery(bf);
        if (*report) return cmd_report(rf);
    } catch (const error& e) {
        return fail(e);
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "encscan: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "encscan: " << e.what() << '\n';
        return exit_io;
    }
    return exit_usage;
}
