#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fosbench/corpus.hpp"

namespace fosbench {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t value);
// FNV-1a of the canonical (sorted-key, compact) JSON dump.
std::string config_hash(const nlohmann::json& config);
std::string file_hash(const std::filesystem::path& path);

// "# fosbench config_hash=<hex> seed=<n>\n"
std::string metadata_header(const std::string& hash, std::uint64_t seed);

std::string csv_escape(std::string_view field);
// Splits one CSV record; handles double-quoted fields.
std::vector<std::string> split_csv(std::string_view line);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames into place.
void write_file(const std::filesystem::path& path, std::string_view content);

std::ifstream open_input(const std::filesystem::path& path);

// `field_id,display_name,level`, sorted by field id.
void write_nodes(std::ostream& out, const ConceptCatalog& catalog);
// Field ids of a nodes file, validated sorted and unique.
std::vector<std::string> read_nodes(std::istream& in, const std::string& source = "<nodes>");

// Records `files` (relative to `dir`) with their hashes under `command` in
// dir/manifest.json, keeping entries of other commands.
void update_run_manifest(const std::filesystem::path& dir, const std::string& command,
                         const std::string& hash, std::uint64_t seed, const std::vector<std::string>& files);

}  // namespace fosbench
