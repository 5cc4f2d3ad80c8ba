#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fosbench/corpus.hpp"
#include "fosbench/types.hpp"

namespace fosbench {

// One (pair, year) aggregate: `weight` papers of that year carry both fields.
// Orientation is canonical: u < v by vertex index.
struct EdgeEvent {
  NodeId u = 0;
  NodeId v = 0;
  int year = 0;
  std::uint32_t weight = 1;

  bool operator==(const EdgeEvent&) const = default;
};

struct SplitManifest {
  YearRange train;
  YearRange val;
  YearRange test;

  // Ranges must be non-empty, ordered train < val < test and disjoint.
  void validate() const;
  YearRange span() const { return {train.first, test.last}; }
};

struct SplitStreams {
  std::span<const EdgeEvent> train;
  std::span<const EdgeEvent> val;
  std::span<const EdgeEvent> test;
};

// Yearly co-occurrence graph over a fixed vertex set. Events are stored
// sorted by (year, u, v) with a per-year offset index; adjacency views are
// answered from that index rather than materialized.
class TemporalGraph {
 public:
  TemporalGraph() = default;
  // Validates ordering, canonical orientation and uniqueness of events.
  TemporalGraph(std::vector<std::string> vertices, YearRange horizon, std::vector<EdgeEvent> events);

  const std::vector<std::string>& vertices() const { return vertices_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  const std::string& vertex(NodeId id) const { return vertices_.at(id); }
  NodeId index_of(const std::string& field_id) const;
  bool has_vertex(const std::string& field_id) const { return index_.count(field_id) != 0; }

  YearRange horizon() const { return horizon_; }
  std::span<const EdgeEvent> events() const { return events_; }
  // Events of a single year, sorted by (u, v). Empty outside the horizon.
  std::span<const EdgeEvent> events_in(int year) const;
  std::span<const EdgeEvent> events_in(YearRange years) const;

  // w_t(u, v); 0 when the pair did not co-occur in `year`.
  std::uint32_t weight(NodeId u, NodeId v, int year) const;
  // A_t(u, v). Throws UsageError when `year` lies outside the horizon.
  bool binary_adjacency(NodeId u, NodeId v, int year) const;
  // A_{<=t}(u, v).
  bool cumulative_adjacency(NodeId u, NodeId v, int year) const;
  // Earliest year the pair co-occurs, or kNeverObserved. Throws for u == v.
  int first_observation(NodeId u, NodeId v) const;
  int last_observation(NodeId u, NodeId v) const;

  // Number of distinct pairs ever observed.
  std::size_t distinct_pairs() const { return observed_.size(); }
  // Sum of event weights (paper-level pair multiplicity).
  std::uint64_t total_weight() const;

 private:
  void check_year(int year) const;
  void check_pair(NodeId u, NodeId v) const;

  struct Span {
    int first;
    int last;
  };

  std::vector<std::string> vertices_;
  std::unordered_map<std::string, NodeId> index_;
  YearRange horizon_;
  std::vector<EdgeEvent> events_;
  std::vector<std::size_t> year_offsets_;
  std::unordered_map<std::uint64_t, Span> observed_;
};

struct BuildOptions {
  // Skip pairs where one field is an ancestor of the other.
  bool drop_ancestor_pairs = false;
};

// Streaming accumulator of per-paper field pairs. The vertex set is the
// catalog's full record list.
class GraphBuilder {
 public:
  GraphBuilder(const ConceptCatalog& catalog, YearRange horizon, BuildOptions options = {});

  void add(const WorkRecord& work);
  std::size_t works_added() const { return works_; }
  TemporalGraph finish() &&;

 private:
  const ConceptCatalog& catalog_;
  YearRange horizon_;
  BuildOptions options_;
  std::vector<std::string> vertices_;
  std::unordered_map<std::string, NodeId> index_;
  std::unordered_map<std::uint64_t, std::uint32_t> counts_;
  std::size_t works_ = 0;
};

TemporalGraph build_graph(const std::vector<WorkRecord>& works, const ConceptCatalog& catalog,
                          YearRange horizon, BuildOptions options = {});

SplitStreams split(const TemporalGraph& graph, const SplitManifest& manifest);

// CSV `u,v,year,weight` with field ids, sorted by (year, u, v). Lines
// starting with '#' are metadata.
void write_edge_stream(std::ostream& out, const TemporalGraph& graph);
// Rebuilds a graph over `vertices` (sorted field ids) from an edge stream.
TemporalGraph read_edge_stream(std::istream& in, std::vector<std::string> vertices,
                               YearRange horizon, const std::string& source_name = "<edges>");

}  // namespace fosbench
