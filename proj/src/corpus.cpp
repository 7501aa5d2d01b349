#include "encscan/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "encscan/error.hpp"
#include "encscan/huffman.hpp"
#include "encscan/keystream.hpp"
#include "text_util.hpp"

namespace encscan {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view manifest_magic = "encscan-manifest";

bool has_ransomware_prefix(std::string_view tag) {
    if (tag.size() < ransomware_prefix.size()) return false;
    for (std::size_t i = 0; i < ransomware_prefix.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(tag[i])) != ransomware_prefix[i]) return false;
    }
    return true;
}

[[noreturn]] void manifest_error(std::size_t line, const std::string& what) {
    throw error(errc::validation_error, "manifest line " + std::to_string(line) + ": " + what);
}

// ---- synthetic content -----------------------------------------------------

constexpr std::array<std::string_view, 122> vocabulary = {
    "the", "of", "and", "to", "a", "in", "is", "it", "you", "that", "he", "was", "for", "on",
    "are", "with", "as", "his", "they", "be", "at", "one", "have", "this", "from", "or", "had",
    "by", "word", "but", "what", "some", "we", "can", "out", "other", "were", "all", "there",
    "when", "up", "use", "your", "how", "said", "an", "each", "she", "which", "do", "their",
    "time", "if", "will", "way", "about", "many", "then", "them", "write", "would", "like",
    "so", "these", "her", "long", "make", "thing", "see", "him", "two", "has", "look", "more",
    "day", "could", "go", "come", "did", "number", "sound", "no", "most", "people", "my",
    "over", "know", "water", "than", "call", "first", "who", "may", "down", "side", "been",
    "now", "find", "any", "new", "work", "part", "take", "get", "place", "made", "live",
    "where", "after", "back", "little", "only", "round", "man", "year", "came", "show",
    "every", "good", "report", "system", "file",
};

const std::array<double, vocabulary.size()>& zipf_cdf() {
    static const auto cdf = [] {
        std::array<double, vocabulary.size()> c{};
        double total = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) total += 1.0 / static_cast<double>(i + 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            acc += 1.0 / static_cast<double>(i + 1) / total;
            c[i] = acc;
        }
        c.back() = 1.0;
        return c;
    }();
    return cdf;
}

std::string_view pick_word(keystream& rng) {
    const auto& cdf = zipf_cdf();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.unit());
    return vocabulary[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(vocabulary.size() - 1)))];
}

std::vector<std::uint8_t> make_text(keystream& rng, std::uint64_t size) {
    std::string out;
    out.reserve(size + 128);
    int sentences_in_paragraph = 0;
    while (out.size() < size) {
        const auto words = 5 + rng.below(16);
        for (std::uint64_t w = 0; w < words; ++w) {
            std::string word(pick_word(rng));
            if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
            if (rng.below(40) == 0) word = std::to_string(rng.below(2000));
            out += word;
            if (w + 1 < words) out += rng.below(10) == 0 ? ", " : " ";
        }
        static constexpr std::array<std::string_view, 4> endings{".", ".", "?", "!"};
        out += endings[rng.below(endings.size())];
        if (++sentences_in_paragraph >= 3 + static_cast<int>(rng.below(5))) {
            out += "\n\n";
            sentences_in_paragraph = 0;
        } else {
            out += ' ';
        }
    }
    out.resize(size);
    return {out.begin(), out.end()};
}

std::vector<std::uint8_t> make_structured(keystream& rng, std::uint64_t size) {
    static constexpr std::array<std::string_view, 6> kinds{
        "alpha", "beta", "gamma", "delta", "invoice", "shipment"};
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<records>\n";
    std::uint64_t id = rng.below(100000);
    char line[192];
    while (out.size() < size) {
        std::snprintf(line, sizeof line,
                      "  <record id=\"%08llu\" kind=\"%s\" qty=\"%llu\" price=\"%llu.%02llu\" "
                      "active=\"%s\"/>\n",
                      static_cast<unsigned long long>(id++),
                      std::string(kinds[rng.below(kinds.size())]).c_str(),
                      static_cast<unsigned long long>(rng.below(500)),
                      static_cast<unsigned long long>(rng.below(10000)),
                      static_cast<unsigned long long>(rng.below(100)),
                      rng.below(4) == 0 ? "false" : "true");
        out += line;
    }
    out.resize(size);
    return {out.begin(), out.end()};
}

// Splits text into tokens of one alphanumeric run plus its trailing
// separators ("word, "), or a bare separator run.
std::vector<std::string_view> word_tokens(std::string_view text) {
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        while (i < text.size() && alnum(text[i])) ++i;
        while (i < text.size() && !alnum(text[i])) ++i;
        tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

// Order-0 Huffman over word tokens. Coding whole tokens removes the
// word-level repetition a dictionary compressor would, leaving output with
// near-maximal but measurably non-uniform byte statistics.
std::vector<std::uint8_t> entropy_code_text(std::string_view text) {
    auto tokens = word_tokens(text);
    std::map<std::string_view, std::uint32_t> ids;
    for (auto t : tokens) ids.emplace(t, 0);
    std::uint32_t next = 0;
    for (auto& [token, id] : ids) id = next++;

    std::vector<std::uint32_t> symbols;
    symbols.reserve(tokens.size());
    std::vector<std::uint64_t> freq(ids.size(), 0);
    for (auto t : tokens) {
        auto id = ids.at(t);
        symbols.push_back(id);
        ++freq[id];
    }
    return huffman::encode_symbols(symbols, huffman::build_code_lengths(freq));
}

std::vector<std::uint8_t> make_entropy_coded(keystream& rng, std::uint64_t size) {
    std::vector<std::uint8_t> text;
    std::uint64_t text_len = std::max<std::uint64_t>(size * 5, 256);
    for (;;) {
        auto more = make_text(rng, text_len - text.size());
        text.insert(text.end(), more.begin(), more.end());
        auto coded = entropy_code_text(
            std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
        if (coded.size() >= size) {
            coded.resize(size);
            return coded;
        }
        text_len += text_len / 2;
    }
}

} // namespace

fs::path corpus_manifest::resolve(const corpus_entry& entry) const {
    fs::path p(entry.path);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

void validate_manifest(const corpus_manifest& manifest) {
    if (manifest.schema_version != manifest_schema_version) {
        throw error(errc::validation_error,
                    "unsupported manifest version " + std::to_string(manifest.schema_version));
    }
    std::set<std::string> paths;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        const std::string where = "manifest entry " + std::to_string(i + 1) + ": ";
        if (e.path.empty()) throw error(errc::validation_error, where + "empty path");
        if (e.type_tag.empty()) throw error(errc::validation_error, where + "empty type tag");
        if (has_ransomware_prefix(e.type_tag) && e.label != verdict::encrypted) {
            throw error(errc::validation_error,
                        where + "ransomware type '" + e.type_tag + "' must be labeled encrypted");
        }
        auto key = fs::path(e.path).lexically_normal().string();
        if (!paths.insert(key).second) {
            throw error(errc::validation_error, where + "duplicate path '" + e.path + "'");
        }
    }
}

corpus_manifest parse_manifest(std::string_view text, const fs::path& base_dir) {
    corpus_manifest m;
    m.base_dir = base_dir;
    std::set<std::string> paths;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (!header_seen) {
            auto sp = line.find(' ');
            if (sp == std::string_view::npos || line.substr(0, sp) != manifest_magic) {
                manifest_error(line_no, "expected header 'encscan-manifest <version>'");
            }
            auto version = detail::parse_u64(detail::trim(line.substr(sp + 1)), "manifest version");
            if (version != static_cast<std::uint64_t>(manifest_schema_version)) {
                manifest_error(line_no, "unsupported version " + std::to_string(version));
            }
            m.schema_version = static_cast<int>(version);
            header_seen = true;
            continue;
        }
        if (detail::trim(line).empty() || line.front() == '#') continue;

        auto t1 = line.find('\t');
        auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos) {
            manifest_error(line_no, "expected <label>\\t<type_tag>\\t<path>");
        }
        auto label = line.substr(0, t1);
        corpus_entry e;
        if (label == "encrypted") e.label = verdict::encrypted;
        else if (label == "not_encrypted") e.label = verdict::not_encrypted;
        else manifest_error(line_no, "unknown label '" + std::string(label) + "'");
        e.type_tag = std::string(line.substr(t1 + 1, t2 - t1 - 1));
        e.path = std::string(line.substr(t2 + 1));

        if (e.type_tag.empty()) manifest_error(line_no, "empty type tag");
        if (e.path.empty()) manifest_error(line_no, "empty path");
        if (has_ransomware_prefix(e.type_tag) && e.label != verdict::encrypted) {
            manifest_error(line_no, "ransomware type '" + e.type_tag + "' must be labeled encrypted");
        }
        if (!paths.insert(fs::path(e.path).lexically_normal().string()).second) {
            manifest_error(line_no, "duplicate path '" + e.path + "'");
        }
        m.entries.push_back(std::move(e));
    }
    if (!header_seen) manifest_error(1, "empty manifest");
    return m;
}

corpus_manifest load_manifest(const fs::path& path) {
    return parse_manifest(detail::read_text_file(path), path.parent_path());
}

std::string format_manifest(const corpus_manifest& manifest) {
    std::ostringstream out;
    out << manifest_magic << ' ' << manifest.schema_version << '\n';
    for (const auto& e : manifest.entries) {
        out << to_string(e.label) << '\t' << e.type_tag << '\t' << e.path << '\n';
    }
    return std::move(out).str();
}

void save_manifest(const corpus_manifest& manifest, const fs::path& path) {
    validate_manifest(manifest);
    detail::write_text_file(path, format_manifest(manifest));
}

std::string_view to_string(synth_category c) noexcept {
    switch (c) {
    case synth_category::text: return "TEXT";
    case synth_category::structured: return "STRUCTURED";
    case synth_category::entropy_coded: return "ENTROPY-CODED";
    case synth_category::pseudo_encrypted: return "PSEUDO-ENCRYPTED";
    }
    return "UNKNOWN";
}

std::optional<synth_category> parse_synth_category(std::string_view name) noexcept {
    for (auto c : {synth_category::text, synth_category::structured,
                   synth_category::entropy_coded, synth_category::pseudo_encrypted}) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

std::vector<std::uint8_t> synthesize_file(synth_category category, std::uint64_t size_bytes,
                                          std::uint64_t seed, std::uint64_t index) {
    if (size_bytes == 0) {
        throw error(errc::parameter_error, "synthetic file size must be positive");
    }
    keystream rng(seed, index, static_cast<std::uint32_t>(category) + 1);
    switch (category) {
    case synth_category::text: return make_text(rng, size_bytes);
    case synth_category::structured: return make_structured(rng, size_bytes);
    case synth_category::entropy_coded: return make_entropy_coded(rng, size_bytes);
    case synth_category::pseudo_encrypted: {
        std::vector<std::uint8_t> out(size_bytes);
        rng.fill(out);
        return out;
    }
    }
    throw error(errc::parameter_error, "unknown synthetic category");
}

corpus_manifest synthesize_corpus(const synth_spec& spec, std::uint64_t seed,
                                  const fs::path& out_dir) {
    corpus_manifest manifest;
    manifest.base_dir = out_dir;
    std::error_code ec;
    for (const auto& [category, request] : spec) {
        if (request.count == 0 || request.size_bytes == 0) {
            throw error(errc::parameter_error, "synthetic counts and sizes must be positive");
        }
        std::string dir_name(to_string(category));
        std::transform(dir_name.begin(), dir_name.end(), dir_name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        fs::create_directories(out_dir / dir_name, ec);
        if (ec) throw error(errc::io_error, "cannot create " + (out_dir / dir_name).string());

        for (std::uint64_t i = 0; i < request.count; ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "%s_%05llu.bin", std::string(to_string(category)).c_str(),
                          static_cast<unsigned long long>(i));
            const std::string rel = dir_name + "/" + name;
            auto body = synthesize_file(category, request.size_bytes, seed, i);
            detail::write_text_file(out_dir / rel,
                                    std::string_view(reinterpret_cast<const char*>(body.data()),
                                                     body.size()));
            manifest.entries.push_back(corpus_entry{
                rel, std::string(to_string(category)),
                category == synth_category::pseudo_encrypted ? verdict::encrypted
                                                             : verdict::not_encrypted});
        }
    }
    save_manifest(manifest, out_dir / manifest_file_name);
    return manifest;
}

} // namespace encscan
