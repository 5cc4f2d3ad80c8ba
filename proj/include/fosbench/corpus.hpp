#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fosbench/types.hpp"

namespace fosbench {

struct ConceptRecord {
  std::string field_id;
  std::string display_name;
  int level = 0;
  std::vector<std::string> ancestor_ids;
  std::vector<std::string> related_texts;
  std::optional<std::string> description;
};

struct WorkRecord {
  std::string work_id;
  int year = 0;
  // Sorted, closed under ancestor propagation within the catalog.
  std::vector<std::string> field_ids;
};

// Field taxonomy. Immutable once built; records are kept in field_id order.
class ConceptCatalog {
 public:
  ConceptCatalog() = default;
  // Validates uniqueness, resolves ancestors and rejects cycles. Dangling
  // ancestor ids are dropped and counted in dangling_ancestors().
  explicit ConceptCatalog(std::vector<ConceptRecord> records);

  std::size_t size() const { return records_.size(); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  const ConceptRecord& at(const std::string& id) const;
  const std::vector<ConceptRecord>& records() const { return records_; }
  const std::vector<std::string>& root_ids() const { return root_ids_; }

  // Transitive ancestor closure (excluding the node itself), sorted.
  const std::vector<std::string>& ancestor_closure(const std::string& id) const;
  bool is_ancestor(const std::string& ancestor, const std::string& id) const;

  std::size_t dangling_ancestors() const { return dangling_; }
  // Non-root records left without any resolvable ancestor.
  std::size_t orphans() const { return orphans_; }

 private:
  std::vector<ConceptRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> closure_;
  std::vector<std::string> root_ids_;
  std::size_t dangling_ = 0;
  std::size_t orphans_ = 0;
};

struct ParseOptions {
  bool strict = false;
  // Name used in diagnostics ("concepts.jsonl").
  std::string source = "<stream>";
  // Warnings beyond this count are tallied but not stored.
  std::size_t max_warnings = 50;
};

struct ConceptParseStats {
  std::size_t lines = 0;
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

struct WorkParseStats {
  std::size_t lines = 0;
  std::size_t kept = 0;
  std::size_t malformed = 0;
  std::size_t bad_year = 0;
  std::size_t outside_horizon = 0;
  std::size_t empty_closure = 0;
  // Tags pointing outside the catalog (dropped, work kept if others remain).
  std::size_t unknown_tags = 0;
  std::vector<std::string> warnings;

  std::size_t dropped() const { return malformed + bad_year + outside_horizon + empty_closure; }
};

// Strips the "https://openalex.org/" prefix so ids read as "C41008148".
std::string normalize_id(std::string_view id);

ConceptCatalog parse_concepts(std::istream& in, const ParseOptions& options,
                              ConceptParseStats* stats = nullptr);

// Streams works one at a time to `sink`; nothing is retained.
void for_each_work(std::istream& in, const ConceptCatalog& catalog, YearRange horizon,
                   const ParseOptions& options, const std::function<void(WorkRecord&&)>& sink,
                   WorkParseStats* stats = nullptr);

std::vector<WorkRecord> parse_works(std::istream& in, const ConceptCatalog& catalog,
                                    YearRange horizon, const ParseOptions& options,
                                    WorkParseStats* stats = nullptr);

// Ancestor closure of a tag set restricted to the catalog; unknown tags are
// ignored. Result sorted and unique.
std::vector<std::string> propagate_ancestors(const ConceptCatalog& catalog,
                                             const std::vector<std::string>& tags,
                                             std::size_t* unknown = nullptr);

// Sub-catalog of every node with an ancestor path into `roots` (roots
// included). Ancestor lists are trimmed to the retained nodes.
ConceptCatalog filter_domain(const ConceptCatalog& catalog, const std::set<std::string>& roots);

}  // namespace fosbench
