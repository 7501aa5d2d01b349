#include "encscan/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "encscan/error.hpp"
#include "text_util.hpp"

namespace encscan {

using json = nlohmann::ordered_json;

namespace {

constexpr int run_result_schema = 1;

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(std::optional<double> v) {
    return v ? detail::format_fixed6(*v) : std::string{};
}

json json_number(std::optional<double> v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> cell_accuracy(const confusion_counts& c) {
    if (c.total() == 0) return std::nullopt;
    return accuracy(c);
}

std::string granularity_name(report_granularity g) {
    switch (g) {
    case report_granularity::per_file: return "per_file";
    case report_granularity::per_type: return "per_type";
    case report_granularity::per_test: return "per_test";
    }
    return "";
}

json metadata(const run_result& result, report_granularity g, const report_options& options) {
    json m;
    m["tool"] = "encscan";
    m["granularity"] = granularity_name(g);
    m["tests"] = result.tests;
    m["entries"] = result.entries.size();
    m["errors"] = result.error_count();
    m["seed"] = result.seed ? json(*result.seed) : json(nullptr);
    m["config_digest"] = result.config_digest;
    if (options.include_timing) m["timestamp"] = result.timestamp;
    return m;
}

// Renders rows of strings as left-aligned columns.
std::string aligned(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        width.resize(std::max(width.size(), r.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::ostringstream out;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << r[i];
            if (i + 1 < r.size()) out << std::string(width[i] - r[i].size() + 2, ' ');
        }
        out << '\n';
    }
    return std::move(out).str();
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out + "\n";
}

std::string per_test_report(const run_result& result, report_format format,
                            const report_options& options) {
    const auto summaries = summarize_by_test(result);
    std::vector<std::string> header{"test", "scored", "errors", "tp", "tn", "fp", "fn",
                                    "accuracy", "recall", "precision", "f1"};
    if (options.include_timing) {
        header.insert(header.end(), {"bytes_processed", "elapsed_seconds", "throughput_mb_s"});
    }

    auto throughput_of = [](const test_summary& s) -> std::optional<double> {
        if (s.elapsed_seconds <= 0.0) return std::nullopt;
        return throughput(s.bytes_processed, s.elapsed_seconds).throughput_mb_per_s;
    };

    if (format == report_format::json) {
        json doc;
        doc["metadata"] = metadata(result, report_granularity::per_test, options);
        doc["rows"] = json::array();
        for (const auto& s : summaries) {
            json row;
            row["test"] = s.test;
            row["scored"] = s.scored;
            row["errors"] = s.errors;
            row["tp"] = s.counts.tp;
            row["tn"] = s.counts.tn;
            row["fp"] = s.counts.fp;
            row["fn"] = s.counts.fn;
            row["accuracy"] = json_number(cell_accuracy(s.counts));
            row["recall"] = json_number(recall(s.counts));
            row["precision"] = json_number(precision(s.counts));
            row["f1"] = json_number(f1(s.counts));
            if (options.include_timing) {
                row["bytes_processed"] = s.bytes_processed;
                row["elapsed_seconds"] = s.elapsed_seconds;
                row["throughput_mb_s"] = json_number(throughput_of(s));
            }
            doc["rows"].push_back(std::move(row));
        }
        return doc.dump(2) + "\n";
    }

    std::vector<std::vector<std::string>> rows{header};
    for (const auto& s : summaries) {
        std::vector<std::string> r{
            s.test, std::to_string(s.scored), std::to_string(s.errors),
            std::to_string(s.counts.tp), std::to_string(s.counts.tn),
            std::to_string(s.counts.fp), std::to_string(s.counts.fn),
            csv_number(cell_accuracy(s.counts)), csv_number(recall(s.counts)),
            csv_number(precision(s.counts)), csv_number(f1(s.counts))};
        if (options.include_timing) {
            r.push_back(std::to_string(s.bytes_processed));
            r.push_back(detail::format_fixed6(s.elapsed_seconds));
            r.push_back(csv_number(throughput_of(s)));
        }
        rows.push_back(std::move(r));
    }
    if (format == report_format::text) return aligned(rows);

    std::string out;
    for (auto& r : rows) {
        r[0] = csv_field(r[0]);
        out += join_csv(r);
    }
    return out;
}

std::string per_type_report(const run_result& result, report_format format,
                            const report_options& options) {
    const auto cells = summarize_by_type(result);
    if (format == report_format::json) {
        json doc;
        doc["metadata"] = metadata(result, report_granularity::per_type, options);
        doc["rows"] = json::array();
        for (const auto& c : cells) {
            json row;
            row["type_tag"] = c.type_tag;
            row["test"] = c.test;
            row["scored"] = c.counts.total();
            row["errors"] = c.errors;
            row["tp"] = c.counts.tp;
            row["tn"] = c.counts.tn;
            row["fp"] = c.counts.fp;
            row["fn"] = c.counts.fn;
            row["accuracy"] = json_number(cell_accuracy(c.counts));
            doc["rows"].push_back(std::move(row));
        }
        return doc.dump(2) + "\n";
    }

    // Accuracy matrix: one row per type tag, one column per test.
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"type_tag"};
    header.insert(header.end(), result.tests.begin(), result.tests.end());
    rows.push_back(header);
    const std::size_t width = result.tests.size();
    for (std::size_t i = 0; i < cells.size(); i += width) {
        std::vector<std::string> r{cells[i].type_tag};
        for (std::size_t t = 0; t < width; ++t) r.push_back(csv_number(cell_accuracy(cells[i + t].counts)));
        rows.push_back(std::move(r));
    }
    if (format == report_format::text) return aligned(rows);

    std::string out;
    for (auto& r : rows) {
        for (auto& f : r) f = csv_field(f);
        out += join_csv(r);
    }
    return out;
}

std::string per_file_report(const run_result& result, report_format format,
                            const report_options& options) {
    if (format == report_format::text) {
        throw error(errc::parameter_error, "per_file reports are available as csv or json only");
    }
    if (format == report_format::json) {
        json doc;
        doc["metadata"] = metadata(result, report_granularity::per_file, options);
        doc["rows"] = json::array();
        for (std::size_t e = 0; e < result.entries.size(); ++e) {
            const auto& entry = result.entries[e];
            for (std::size_t t = 0; t < result.tests.size(); ++t) {
                const auto& c = result.cell(e, t);
                json row;
                row["path"] = entry.path;
                row["type_tag"] = entry.type_tag;
                row["label"] = to_string(entry.label);
                row["test_id"] = c.test;
                row["statistic"] = json_number(c.statistic);
                row["auxiliary"] = json_number(c.auxiliary);
                row["p_values"] = c.p_values;
                row["decision"] = c.ok ? json(to_string(c.decision)) : json(nullptr);
                row["flags"] = c.flags;
                row["error"] = c.ok ? json(nullptr) : json(c.error);
                if (options.include_timing) row["elapsed_seconds"] = c.elapsed_seconds;
                doc["rows"].push_back(std::move(row));
            }
        }
        return doc.dump(2) + "\n";
    }

    std::vector<std::string> header{"path", "type_tag", "label", "test_id", "statistic",
                                    "auxiliary", "p_values", "decision", "flags", "error"};
    if (options.include_timing) header.push_back("elapsed_seconds");
    std::string out = join_csv(header);
    for (std::size_t e = 0; e < result.entries.size(); ++e) {
        const auto& entry = result.entries[e];
        for (std::size_t t = 0; t < result.tests.size(); ++t) {
            const auto& c = result.cell(e, t);
            std::string ps;
            for (std::size_t i = 0; i < c.p_values.size(); ++i) {
                if (i) ps += ';';
                ps += detail::format_fixed6(c.p_values[i]);
            }
            std::string flags;
            for (std::size_t i = 0; i < c.flags.size(); ++i) flags += (i ? ";" : "") + c.flags[i];
            std::vector<std::string> r{csv_field(entry.path), csv_field(entry.type_tag),
                                       std::string(to_string(entry.label)), csv_field(c.test),
                                       csv_number(c.statistic), csv_number(c.auxiliary), ps,
                                       c.ok ? std::string(to_string(c.decision)) : std::string{},
                                       flags, csv_field(c.error)};
            if (options.include_timing) r.push_back(detail::format_fixed6(c.elapsed_seconds));
            out += join_csv(r);
        }
    }
    return out;
}

verdict parse_verdict(const std::string& s) {
    if (s == "encrypted") return verdict::encrypted;
    if (s == "not_encrypted") return verdict::not_encrypted;
    throw error(errc::io_error, "corrupt run result: bad verdict '" + s + "'");
}

} // namespace

std::optional<report_format> parse_report_format(std::string_view s) noexcept {
    if (s == "csv") return report_format::csv;
    if (s == "json") return report_format::json;
    if (s == "text") return report_format::text;
    return std::nullopt;
}

std::optional<report_granularity> parse_report_granularity(std::string_view s) noexcept {
    if (s == "per_file") return report_granularity::per_file;
    if (s == "per_type") return report_granularity::per_type;
    if (s == "per_test") return report_granularity::per_test;
    return std::nullopt;
}

std::string emit_report(const run_result& result, report_format format,
                        report_granularity granularity, const report_options& options) {
    if (result.entries.empty() || result.tests.empty()) {
        throw error(errc::empty_run, "nothing to report");
    }
    switch (granularity) {
    case report_granularity::per_test: return per_test_report(result, format, options);
    case report_granularity::per_type: return per_type_report(result, format, options);
    case report_granularity::per_file: return per_file_report(result, format, options);
    }
    throw error(errc::parameter_error, "unknown granularity");
}

std::string format_gate_table(const std::vector<gate_row>& rows, report_format format) {
    if (format == report_format::json) {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"test", r.test},
                           {"qualified", r.qualified},
                           {"reason", r.reason},
                           {"coverage", r.coverage},
                           {"types_passing", r.types_passing},
                           {"types_total", r.types_total},
                           {"throughput_mb_s", r.throughput_mb_s}});
        }
        return arr.dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> table{
        {"test", "qualified", "reason", "coverage", "types_passing", "types_total", "throughput_mb_s"}};
    for (const auto& r : rows) {
        table.push_back({r.test, r.qualified ? "true" : "false", r.reason,
                         detail::format_fixed6(r.coverage), std::to_string(r.types_passing),
                         std::to_string(r.types_total), detail::format_fixed6(r.throughput_mb_s)});
    }
    if (format == report_format::text) return aligned(table);
    std::string out;
    for (auto& r : table) {
        r[0] = csv_field(r[0]);
        out += join_csv(r);
    }
    return out;
}

std::string run_result_to_json(const run_result& result) {
    json doc;
    doc["schema_version"] = run_result_schema;
    doc["seed"] = result.seed ? json(*result.seed) : json(nullptr);
    doc["config_digest"] = result.config_digest;
    doc["timestamp"] = result.timestamp;
    doc["tests"] = result.tests;
    doc["entries"] = json::array();
    for (const auto& e : result.entries) {
        doc["entries"].push_back(
            {{"path", e.path}, {"type_tag", e.type_tag}, {"label", to_string(e.label)}});
    }
    doc["cells"] = json::array();
    for (const auto& c : result.cells) {
        json j;
        j["entry"] = c.entry;
        j["test"] = c.test;
        j["ok"] = c.ok;
        j["error"] = c.error;
        j["statistic"] = json_number(c.statistic);
        j["auxiliary"] = json_number(c.auxiliary);
        j["p_values"] = c.p_values;
        j["flags"] = c.flags;
        j["decision"] = to_string(c.decision);
        j["elapsed_seconds"] = c.elapsed_seconds;
        j["bytes_processed"] = c.bytes_processed;
        doc["cells"].push_back(std::move(j));
    }
    return doc.dump(1) + "\n";
}

run_result run_result_from_json(std::string_view text) {
    try {
        auto doc = json::parse(text);
        if (doc.at("schema_version").get<int>() != run_result_schema) {
            throw error(errc::io_error, "corrupt run result: unsupported schema version");
        }
        run_result r;
        if (!doc.at("seed").is_null()) r.seed = doc["seed"].get<std::uint64_t>();
        r.config_digest = doc.at("config_digest").get<std::string>();
        r.timestamp = doc.at("timestamp").get<std::string>();
        r.tests = doc.at("tests").get<std::vector<std::string>>();
        for (const auto& e : doc.at("entries")) {
            r.entries.push_back({e.at("path").get<std::string>(), e.at("type_tag").get<std::string>(),
                                 parse_verdict(e.at("label").get<std::string>())});
        }
        for (const auto& j : doc.at("cells")) {
            run_cell c;
            c.entry = j.at("entry").get<std::size_t>();
            c.test = j.at("test").get<std::string>();
            c.ok = j.at("ok").get<bool>();
            c.error = j.at("error").get<std::string>();
            if (!j.at("statistic").is_null()) c.statistic = j["statistic"].get<double>();
            if (!j.at("auxiliary").is_null()) c.auxiliary = j["auxiliary"].get<double>();
            c.p_values = j.at("p_values").get<std::vector<double>>();
            c.flags = j.at("flags").get<std::vector<std::string>>();
            c.decision = parse_verdict(j.at("decision").get<std::string>());
            c.elapsed_seconds = j.at("elapsed_seconds").get<double>();
            c.bytes_processed = j.at("bytes_processed").get<std::uint64_t>();
            r.cells.push_back(std::move(c));
        }
        if (r.cells.size() != r.entries.size() * r.tests.size()) {
            throw error(errc::io_error, "corrupt run result: cell count does not match entries x tests");
        }
        for (std::size_t i = 0; i < r.cells.size(); ++i) {
            if (r.cells[i].entry != i / r.tests.size() || r.cells[i].test != r.tests[i % r.tests.size()]) {
                throw error(errc::io_error, "corrupt run result: cells out of order");
            }
        }
        return r;
    } catch (const json::exception& e) {
        throw error(errc::io_error, std::string("corrupt run result: ") + e.what());
    }
}

void save_run_result(const run_result& result, const std::filesystem::path& path) {
    detail::write_text_file(path, run_result_to_json(result));
}

run_result load_run_result(const std::filesystem::path& path) {
    return run_result_from_json(detail::read_text_file(path));
}

} // namespace encscan
