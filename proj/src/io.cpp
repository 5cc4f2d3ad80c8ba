#include "fosbench/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fosbench/error.hpp"

namespace fosbench {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (const unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ull;
  }
  return state;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
  return out;
}

std::string config_hash(const nlohmann::json& config) { return hex64(fnv1a64(config.dump())); }

std::string file_hash(const std::filesystem::path& path) { return hex64(fnv1a64(read_file(path))); }

std::string metadata_header(const std::string& hash, std::uint64_t seed) {
  return "# fosbench config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void write_nodes(std::ostream& out, const ConceptCatalog& catalog) {
  out << "field_id,display_name,level\n";
  for (const auto& r : catalog.records()) {
    out << csv_escape(r.field_id) << ',' << csv_escape(r.display_name) << ',' << r.level << '\n';
  }
}

std::vector<std::string> read_nodes(std::istream& in, const std::string& source) {
  std::vector<std::string> ids;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (split_csv(line).at(0) != "field_id") throw data_error_at(source, number, "expected header field_id,...");
      header = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != 3) throw data_error_at(source, number, "expected 3 fields");
    if (!ids.empty() && !(ids.back() < fields[0])) {
      throw data_error_at(source, number, "field ids must be sorted and unique");
    }
    ids.push_back(std::move(fields[0]));
  }
  if (!header) throw DataError(source + ": empty nodes file");
  return ids;
}

void update_run_manifest(const std::filesystem::path& dir, const std::string& command, const std::string& hash,
                         std::uint64_t seed, const std::vector<std::string>& files) {
  const auto path = dir / "manifest.json";
  nlohmann::json manifest = nlohmann::json::object();
  if (std::filesystem::exists(path)) {
    manifest = nlohmann::json::parse(read_file(path), nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object()) manifest = nlohmann::json::object();
  }
  manifest["format"] = "fosbench-run";
  nlohmann::json entry;
  entry["config_hash"] = hash;
  entry["seed"] = seed;
  entry["files"] = nlohmann::json::object();
  for (const auto& f : files) entry["files"][f] = file_hash(dir / f);
  manifest["commands"][command] = entry;
  write_file(path, manifest.dump(2) + "\n");
}

}  // namespace fosbench
