#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "encscan/classifier.hpp"

namespace encscan {

/// Type tags starting with this prefix (case-insensitive) must be labeled encrypted.
inline constexpr std::string_view ransomware_prefix = "RANSOMWARE-";
inline constexpr int manifest_schema_version = 1;

struct corpus_entry {
    std::string path;
    std::string type_tag;
    verdict label = verdict::not_encrypted;
};

struct corpus_manifest {
    int schema_version = manifest_schema_version;
    std::vector<corpus_entry> entries;
    /// Relative entry paths are resolved against this directory.
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const corpus_entry& entry) const;
};

// Manifest grammar (UTF-8, '\n' line endings):
//
//   manifest := header { line }
//   header   := "encscan-manifest" SP version LF
//   line     := comment | blank | record
//   comment  := "#" { any } LF
//   record   := label TAB type_tag TAB path LF
//   label    := "encrypted" | "not_encrypted"
//
// The path is the remainder of the line and may contain spaces.

corpus_manifest parse_manifest(std::string_view text,
                               const std::filesystem::path& base_dir = {});
corpus_manifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const corpus_manifest& manifest);
void save_manifest(const corpus_manifest& manifest, const std::filesystem::path& path);

/// Throws validation_error on duplicate paths, empty type tags, or a
/// ransomware-tagged entry labeled not_encrypted.
void validate_manifest(const corpus_manifest& manifest);

enum class synth_category { text, structured, entropy_coded, pseudo_encrypted };

std::string_view to_string(synth_category c) noexcept;
std::optional<synth_category> parse_synth_category(std::string_view name) noexcept;

struct synth_request {
    std::uint64_t count = 0;
    std::uint64_t size_bytes = 0;
};

using synth_spec = std::map<synth_category, synth_request>;

/// Generates one synthetic file body. Deterministic in (category, seed, index).
std::vector<std::uint8_t> synthesize_file(synth_category category, std::uint64_t size_bytes,
                                          std::uint64_t seed, std::uint64_t index);

inline constexpr std::string_view manifest_file_name = "manifest.txt";

/// Writes `<out_dir>/<category>/<category>_<index>.bin` for every requested
/// file plus `<out_dir>/manifest.txt`, and returns the manifest (paths
/// relative to out_dir). Only PSEUDO-ENCRYPTED files are labeled encrypted.
corpus_manifest synthesize_corpus(const synth_spec& spec, std::uint64_t seed,
                                  const std::filesystem::path& out_dir);

} // namespace encscan
