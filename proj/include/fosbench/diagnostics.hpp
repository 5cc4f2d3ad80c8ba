#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fosbench/temporal_graph.hpp"

namespace fosbench {

// Statistics that may be undefined (null) or unbounded (+infinity).
using Stat = std::optional<double>;

// Mean over years after the window's first of the share of E_t never seen
// earlier in the window. Years without edges are skipped.
double novelty(const TemporalGraph& graph, YearRange window);

struct RecurrenceSurprise {
  double recurrence = 0.0;  // |E_train ∩ E_test| / |E_train|
  double surprise = 0.0;    // |E_test \ E_train| / |E_test|
  // |E_train ∩ E_test| / |E_test|, the test-denominator reading.
  double recurrence_test_share = 0.0;
  std::size_t train_edges = 0;
  std::size_t test_edges = 0;
  std::size_t shared_edges = 0;
};

// Over the distinct unordered pairs of each stream. Throws UsageError when
// either stream is empty.
RecurrenceSurprise recurrence_surprise(std::span<const EdgeEvent> train, std::span<const EdgeEvent> test);

struct TeaRow {
  int year = 0;
  std::size_t new_edges = 0;
  std::size_t repeated_edges = 0;
};

// New (first observed that year) vs repeated edges per horizon year.
std::vector<TeaRow> tea_data(const TemporalGraph& graph);

enum class TetTag { kTrainSeen, kTestOnly, kOther };
const char* tet_tag_name(TetTag tag);

struct TetRow {
  NodeId u = 0;
  NodeId v = 0;
  int first = 0;
  int last = 0;
  std::vector<int> years;
  TetTag tag = TetTag::kOther;
};

// Every observed pair ordered by (first, last, u, v).
std::vector<TetRow> tet_data(const TemporalGraph& graph, const SplitManifest& manifest);

struct NodeYear {
  int year = 0;
  std::size_t active_nodes = 0;
  Stat mean_degree;
  // (active_t - active_{t-1}) / active_{t-1}; null for the first year or
  // when the previous year had no active nodes.
  Stat growth_rate;
  // Mean local clustering over active nodes, degree < 2 counted as 0.
  Stat clustering;
  // Mean local clustering over nodes with degree >= 2 only.
  Stat clustering_deg2;
};

struct NodeStats {
  std::vector<NodeYear> years;
  Stat mean_growth_rate;
  // last active - first active + 1 -> node count.
  std::map<int, std::size_t> persistence;
  // Last active year -> node count.
  std::map<int, std::size_t> last_activity;
};

struct EdgeYear {
  int year = 0;
  std::size_t edges = 0;
  double density = 0.0;
  // Share of E_t with first observation before t; null without edges.
  Stat repetition_rate;
};

struct EdgeStats {
  std::vector<EdgeYear> years;
  std::map<int, std::size_t> frequency;      // years present -> edges
  std::map<int, std::size_t> lifetime;       // last - first + 1 -> edges
  std::map<int, std::size_t> lifetime_span;  // last - first -> edges
  std::map<int, std::size_t> last_appearance;
  // Mean over edges with >= 2 appearances of their mean gap.
  Stat mean_inter_event;
  std::map<double, std::size_t> inter_event;  // per-edge mean gap -> edges
};

struct GraphYear {
  int year = 0;
  std::optional<std::size_t> components;
  std::optional<std::size_t> largest_component;
  std::optional<int> diameter;
  bool diameter_approximate = false;
};

struct TemporalYear {
  int year = 0;
  Stat assortativity;
  // |E_t \ E_{t-1}| / |E_{t-1} \ E_t|; +inf when nothing was lost, null on
  // 0/0 and for the first year.
  Stat churn;
  std::size_t gained = 0;
  std::size_t lost = 0;
};

struct DiagnosticsOptions {
  int threads = 1;
  // Largest component size still measured with all-pairs BFS.
  std::size_t exact_diameter_limit = 5000;
  std::size_t diameter_samples = 64;
  std::uint64_t seed = 0;
};

NodeStats node_stats(const TemporalGraph& graph, const DiagnosticsOptions& options = {});
EdgeStats edge_stats(const TemporalGraph& graph);
std::vector<GraphYear> graph_stats(const TemporalGraph& graph, const DiagnosticsOptions& options = {});
std::vector<TemporalYear> temporal_stats(const TemporalGraph& graph, const DiagnosticsOptions& options = {});

// Exact diameter of the connected graph given as sorted adjacency lists.
int exact_diameter(const std::vector<std::vector<NodeId>>& adjacency);

struct DiagnosticsReport {
  YearRange window;
  double novelty = 0.0;
  RecurrenceSurprise recurrence;
  std::vector<TeaRow> tea;
  std::vector<TetRow> tet;
  NodeStats nodes;
  EdgeStats edges;
  std::vector<GraphYear> graph;
  std::vector<TemporalYear> temporal;
};

// Throws UsageError on a graph without events or with fewer than two
// years in the manifest span.
DiagnosticsReport diagnose(const TemporalGraph& graph, const SplitManifest& manifest,
                           const DiagnosticsOptions& options = {});

// null for missing values, "inf" for +infinity.
nlohmann::json stat_json(Stat value);
std::string stat_csv(Stat value);

nlohmann::json summary_json(const DiagnosticsReport& report);

// summary.json, node_series.csv, edge_series.csv, graph_series.csv,
// temporal_series.csv, hist_*.csv, tea.csv, tet.csv. Every CSV starts with
// `header` (lines already prefixed by '#').
void write_diagnostics(const std::filesystem::path& dir, const TemporalGraph& graph,
                       const DiagnosticsReport& report, const std::string& header = "");

}  // namespace fosbench
