#include "fosbench/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <string_view>

#include <json.hpp>

#include "fosbench/error.hpp"

namespace fosbench {

using nlohmann::json;

namespace {

constexpr std::string_view kOpenAlexPrefix = "https://openalex.org/";

void warn(std::vector<std::string>& warnings, const ParseOptions& options, std::size_t line,
          const std::string& what) {
  if (warnings.size() < options.max_warnings) {
    warnings.push_back(options.source + ":" + std::to_string(line) + ": " + what);
  }
}

// Reads an id out of either "C123" or {"id": "C123", ...}.
std::optional<std::string> id_of(const json& item) {
  if (item.is_string()) return normalize_id(item.get<std::string>());
  if (item.is_object()) {
    auto it = item.find("id");
    if (it != item.end() && it->is_string()) return normalize_id(it->get<std::string>());
  }
  return std::nullopt;
}

std::optional<std::string> text_of(const json& item) {
  if (item.is_string()) return item.get<std::string>();
  if (item.is_object()) {
    auto it = item.find("display_name");
    if (it != item.end() && it->is_string()) return it->get<std::string>();
  }
  return std::nullopt;
}

// Returns an error message, or nullopt when the record is well formed.
std::optional<std::string> read_concept(const json& obj, ConceptRecord& out) {
  if (!obj.is_object()) return "not a JSON object";
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    return "missing string field 'id'";
  }
  auto name = obj.find("display_name");
  if (name == obj.end() || !name->is_string()) return "missing string field 'display_name'";
  auto level = obj.find("level");
  if (level == obj.end() || !level->is_number_integer()) return "missing integer field 'level'";
  if (level->get<long long>() < 0) return "negative level";

  out.field_id = normalize_id(id->get<std::string>());
  out.display_name = name->get<std::string>();
  out.level = static_cast<int>(level->get<long long>());

  if (auto anc = obj.find("ancestors"); anc != obj.end() && !anc->is_null()) {
    if (!anc->is_array()) return "'ancestors' is not an array";
    for (const auto& item : *anc) {
      auto aid = id_of(item);
      if (!aid) return "unreadable ancestor entry";
      out.ancestor_ids.push_back(*aid);
    }
  }
  if (auto rel = obj.find("related_concepts"); rel != obj.end() && !rel->is_null()) {
    if (!rel->is_array()) return "'related_concepts' is not an array";
    for (const auto& item : *rel) {
      auto text = text_of(item);
      if (!text) return "unreadable related concept entry";
      out.related_texts.push_back(*text);
    }
  }
  if (auto desc = obj.find("description"); desc != obj.end() && !desc->is_null()) {
    if (!desc->is_string()) return "'description' is not a string";
    if (!desc->get<std::string>().empty()) out.description = desc->get<std::string>();
  }
  if ((out.level == 0) != out.ancestor_ids.empty()) {
    return out.level == 0 ? "level-0 concept lists ancestors"
                          : "non-root concept lists no ancestors";
  }
  return std::nullopt;
}

std::optional<int> parse_year(const json& value) {
  if (value.is_number_integer()) return static_cast<int>(value.get<long long>());
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    int year = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), year);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return year;
  }
  return std::nullopt;
}

}  // namespace

std::string normalize_id(std::string_view id) {
  if (id.substr(0, kOpenAlexPrefix.size()) == kOpenAlexPrefix) id.remove_prefix(kOpenAlexPrefix.size());
  return std::string(id);
}

ConceptCatalog::ConceptCatalog(std::vector<ConceptRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const ConceptRecord& a, const ConceptRecord& b) { return a.field_id < b.field_id; });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!index_.emplace(records_[i].field_id, i).second) {
      throw DataError("duplicate field_id '" + records_[i].field_id + "'");
    }
  }
  for (auto& rec : records_) {
    const auto before = rec.ancestor_ids.size();
    std::erase_if(rec.ancestor_ids, [&](const std::string& a) { return !index_.count(a) || a == rec.field_id; });
    dangling_ += before - rec.ancestor_ids.size();
    if (rec.level == 0) {
      root_ids_.push_back(rec.field_id);
    } else if (rec.ancestor_ids.empty()) {
      ++orphans_;
    }
  }

  // Depth-first closure; state 1 marks nodes on the current path.
  closure_.assign(records_.size(), {});
  std::vector<int> state(records_.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    state[i] = 1;
    std::vector<std::string> acc;
    for (const auto& a : records_[i].ancestor_ids) {
      const auto j = index_.at(a);
      if (state[j] == 1) throw DataError("ancestor cycle through '" + records_[i].field_id + "'");
      if (state[j] == 0) visit(j);
      acc.push_back(a);
      acc.insert(acc.end(), closure_[j].begin(), closure_[j].end());
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    closure_[i] = std::move(acc);
    state[i] = 2;
  };
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (state[i] == 0) visit(i);
  }
}

const ConceptRecord& ConceptCatalog::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("unknown field_id '" + id + "'");
  return records_[it->second];
}

const std::vector<std::string>& ConceptCatalog::ancestor_closure(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("unknown field_id '" + id + "'");
  return closure_[it->second];
}

bool ConceptCatalog::is_ancestor(const std::string& ancestor, const std::string& id) const {
  const auto& c = ancestor_closure(id);
  return std::binary_search(c.begin(), c.end(), ancestor);
}

ConceptCatalog parse_concepts(std::istream& in, const ParseOptions& options,
                              ConceptParseStats* stats) {
  ConceptParseStats local;
  ConceptParseStats& st = stats ? *stats : local;
  std::vector<ConceptRecord> records;
  std::unordered_map<std::string, std::size_t> seen_at;
  std::string line;
  while (std::getline(in, line)) {
    ++st.lines;
    ConceptRecord rec;
    std::optional<std::string> problem;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      problem = "blank line";
    } else {
      json obj = json::parse(line, nullptr, false);
      problem = obj.is_discarded() ? std::optional<std::string>("invalid JSON") : read_concept(obj, rec);
    }
    if (problem) {
      if (options.strict) throw data_error_at(options.source, st.lines, *problem);
      warn(st.warnings, options, st.lines, *problem);
      ++st.skipped;
      continue;
    }
    if (auto [it, fresh] = seen_at.emplace(rec.field_id, st.lines); !fresh) {
      throw data_error_at(options.source, st.lines,
                          "duplicate field_id '" + rec.field_id + "' (first seen at line " +
                              std::to_string(it->second) + ")");
    }
    records.push_back(std::move(rec));
    ++st.parsed;
  }
  ConceptCatalog catalog(std::move(records));
  if (catalog.dangling_ancestors() > 0) {
    st.warnings.push_back(options.source + ": dropped " + std::to_string(catalog.dangling_ancestors()) +
                          " unresolvable ancestor id(s)");
  }
  return catalog;
}

std::vector<std::string> propagate_ancestors(const ConceptCatalog& catalog,
                                             const std::vector<std::string>& tags,
                                             std::size_t* unknown) {
  std::vector<std::string> out;
  for (const auto& tag : tags) {
    if (!catalog.contains(tag)) {
      if (unknown) ++*unknown;
      continue;
    }
    out.push_back(tag);
    const auto& anc = catalog.ancestor_closure(tag);
    out.insert(out.end(), anc.begin(), anc.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void for_each_work(std::istream& in, const ConceptCatalog& catalog, YearRange horizon,
                   const ParseOptions& options, const std::function<void(WorkRecord&&)>& sink,
                   WorkParseStats* stats) {
  WorkParseStats local;
  WorkParseStats& st = stats ? *stats : local;
  std::string line;
  auto reject = [&](std::size_t& counter, const std::string& what) {
    if (options.strict) throw data_error_at(options.source, st.lines, what);
    warn(st.warnings, options, st.lines, what);
    ++counter;
  };
  while (std::getline(in, line)) {
    ++st.lines;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      reject(st.malformed, "invalid JSON object");
      continue;
    }
    auto id = obj.find("id");
    auto concepts = obj.find("concepts");
    if (id == obj.end() || !id->is_string() || concepts == obj.end() || !concepts->is_array()) {
      reject(st.malformed, "missing 'id' or 'concepts'");
      continue;
    }
    auto year_field = obj.find("publication_year");
    std::optional<int> year;
    if (year_field != obj.end()) year = parse_year(*year_field);
    if (!year) {
      reject(st.bad_year, "unparseable publication_year");
      continue;
    }
    if (!horizon.contains(*year)) {
      ++st.outside_horizon;
      continue;
    }
    std::vector<std::string> tags;
    bool readable = true;
    for (const auto& item : *concepts) {
      auto cid = id_of(item);
      if (!cid) {
        readable = false;
        break;
      }
      tags.push_back(std::move(*cid));
    }
    if (!readable) {
      reject(st.malformed, "unreadable concept entry");
      continue;
    }
    WorkRecord work{normalize_id(id->get<std::string>()), *year,
                    propagate_ancestors(catalog, tags, &st.unknown_tags)};
    if (work.field_ids.empty()) {
      ++st.empty_closure;
      continue;
    }
    ++st.kept;
    sink(std::move(work));
  }
}

std::vector<WorkRecord> parse_works(std::istream& in, const ConceptCatalog& catalog,
                                    YearRange horizon, const ParseOptions& options,
                                    WorkParseStats* stats) {
  std::vector<WorkRecord> works;
  for_each_work(in, catalog, horizon, options,
                [&](WorkRecord&& w) { works.push_back(std::move(w)); }, stats);
  return works;
}

ConceptCatalog filter_domain(const ConceptCatalog& catalog, const std::set<std::string>& roots) {
  const auto& all_roots = catalog.root_ids();
  for (const auto& r : roots) {
    if (!std::binary_search(all_roots.begin(), all_roots.end(), r)) {
      throw UsageError("'" + r + "' is not a root of the catalog");
    }
  }
  std::vector<ConceptRecord> kept;
  std::set<std::string> kept_ids;
  for (const auto& rec : catalog.records()) {
    const auto& anc = catalog.ancestor_closure(rec.field_id);
    const bool in_domain = roots.count(rec.field_id) ||
                           std::any_of(anc.begin(), anc.end(), [&](const auto& a) { return roots.count(a) != 0; });
    if (in_domain) {
      kept.push_back(rec);
      kept_ids.insert(rec.field_id);
    }
  }
  for (auto& rec : kept) {
    std::erase_if(rec.ancestor_ids, [&](const std::string& a) { return !kept_ids.count(a); });
  }
  return ConceptCatalog(std::move(kept));
}

}  // namespace fosbench
