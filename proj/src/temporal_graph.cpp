#include "fosbench/temporal_graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "fosbench/error.hpp"

namespace fosbench {

void SplitManifest::validate() const {
  if (train.empty() || val.empty() || test.empty()) throw UsageError("split ranges must be non-empty");
  if (!(train.last < val.first && val.last < test.first)) {
    throw UsageError("split ranges overlap or are out of order: train " + train.to_string() + ", val " +
                     val.to_string() + ", test " + test.to_string());
  }
}

TemporalGraph::TemporalGraph(std::vector<std::string> vertices, YearRange horizon,
                             std::vector<EdgeEvent> events)
    : vertices_(std::move(vertices)), horizon_(horizon), events_(std::move(events)) {
  if (horizon_.empty()) throw UsageError("empty horizon");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (i > 0 && !(vertices_[i - 1] < vertices_[i])) {
      throw DataError("vertex list not strictly sorted at '" + vertices_[i] + "'");
    }
    index_.emplace(vertices_[i], static_cast<NodeId>(i));
  }
  const auto n = vertices_.size();
  year_offsets_.assign(static_cast<std::size_t>(horizon_.size()) + 1, 0);
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (e.u >= e.v || e.v >= n) throw DataError("edge event with invalid or non-canonical endpoints");
    if (!horizon_.contains(e.year)) throw DataError("edge event year " + std::to_string(e.year) + " outside horizon");
    if (e.weight == 0) throw DataError("edge event with zero weight");
    if (i > 0) {
      const auto& p = events_[i - 1];
      if (std::tie(p.year, p.u, p.v) >= std::tie(e.year, e.u, e.v)) {
        throw DataError("edge events not strictly sorted by (year, u, v)");
      }
    }
    ++year_offsets_[static_cast<std::size_t>(e.year - horizon_.first) + 1];
    auto [it, fresh] = observed_.try_emplace(pair_key(e.u, e.v), Span{e.year, e.year});
    if (!fresh) it->second.last = e.year;
  }
  for (std::size_t i = 1; i < year_offsets_.size(); ++i) year_offsets_[i] += year_offsets_[i - 1];
}

NodeId TemporalGraph::index_of(const std::string& field_id) const {
  auto it = index_.find(field_id);
  if (it == index_.end()) throw DataError("unknown vertex '" + field_id + "'");
  return it->second;
}

std::span<const EdgeEvent> TemporalGraph::events_in(int year) const {
  if (!horizon_.contains(year)) return {};
  const auto k = static_cast<std::size_t>(year - horizon_.first);
  return std::span<const EdgeEvent>(events_).subspan(year_offsets_[k], year_offsets_[k + 1] - year_offsets_[k]);
}

std::span<const EdgeEvent> TemporalGraph::events_in(YearRange years) const {
  const int lo = std::max(years.first, horizon_.first);
  const int hi = std::min(years.last, horizon_.last);
  if (hi < lo) return {};
  const auto a = year_offsets_[static_cast<std::size_t>(lo - horizon_.first)];
  const auto b = year_offsets_[static_cast<std::size_t>(hi - horizon_.first) + 1];
  return std::span<const EdgeEvent>(events_).subspan(a, b - a);
}

void TemporalGraph::check_year(int year) const {
  if (!horizon_.contains(year)) {
    throw UsageError("year " + std::to_string(year) + " outside horizon " + horizon_.to_string());
  }
}

void TemporalGraph::check_pair(NodeId u, NodeId v) const {
  if (u >= vertices_.size() || v >= vertices_.size()) throw UsageError("vertex index out of range");
  if (u == v) throw UsageError("pair query with identical endpoints");
}

std::uint32_t TemporalGraph::weight(NodeId u, NodeId v, int year) const {
  check_year(year);
  check_pair(u, v);
  if (u > v) std::swap(u, v);
  const auto evs = events_in(year);
  auto it = std::lower_bound(evs.begin(), evs.end(), std::pair{u, v}, [](const EdgeEvent& e, const auto& key) {
    return std::pair{e.u, e.v} < key;
  });
  return (it != evs.end() && it->u == u && it->v == v) ? it->weight : 0;
}

bool TemporalGraph::binary_adjacency(NodeId u, NodeId v, int year) const { return weight(u, v, year) > 0; }

bool TemporalGraph::cumulative_adjacency(NodeId u, NodeId v, int year) const {
  check_year(year);
  return first_observation(u, v) <= year;
}

int TemporalGraph::first_observation(NodeId u, NodeId v) const {
  check_pair(u, v);
  auto it = observed_.find(pair_key(u, v));
  return it == observed_.end() ? kNeverObserved : it->second.first;
}

int TemporalGraph::last_observation(NodeId u, NodeId v) const {
  check_pair(u, v);
  auto it = observed_.find(pair_key(u, v));
  return it == observed_.end() ? kNeverObserved : it->second.last;
}

std::uint64_t TemporalGraph::total_weight() const {
  std::uint64_t total = 0;
  for (const auto& e : events_) total += e.weight;
  return total;
}

namespace {
constexpr int kYearBits = 16;
constexpr int kNodeBits = 24;

std::uint64_t event_key(NodeId u, NodeId v, int year_offset) {
  return (static_cast<std::uint64_t>(u) << (kNodeBits + kYearBits)) |
         (static_cast<std::uint64_t>(v) << kYearBits) | static_cast<std::uint64_t>(year_offset);
}
}  // namespace

GraphBuilder::GraphBuilder(const ConceptCatalog& catalog, YearRange horizon, BuildOptions options)
    : catalog_(catalog), horizon_(horizon), options_(options) {
  if (horizon_.empty() || horizon_.size() >= (1 << kYearBits)) throw UsageError("invalid horizon");
  if (catalog.size() >= (std::size_t{1} << kNodeBits)) throw UsageError("catalog too large");
  for (const auto& rec : catalog.records()) {
    index_.emplace(rec.field_id, static_cast<NodeId>(vertices_.size()));
    vertices_.push_back(rec.field_id);
  }
}

void GraphBuilder::add(const WorkRecord& work) {
  if (!horizon_.contains(work.year)) return;
  std::vector<NodeId> ids;
  ids.reserve(work.field_ids.size());
  for (const auto& f : work.field_ids) {
    auto it = index_.find(f);
    if (it != index_.end()) ids.push_back(it->second);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const int offset = work.year - horizon_.first;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (options_.drop_ancestor_pairs &&
          (catalog_.is_ancestor(vertices_[ids[i]], vertices_[ids[j]]) ||
           catalog_.is_ancestor(vertices_[ids[j]], vertices_[ids[i]]))) {
        continue;
      }
      ++counts_[event_key(ids[i], ids[j], offset)];
    }
  }
  ++works_;
}

TemporalGraph GraphBuilder::finish() && {
  std::vector<EdgeEvent> events;
  events.reserve(counts_.size());
  constexpr std::uint64_t node_mask = (std::uint64_t{1} << kNodeBits) - 1;
  constexpr std::uint64_t year_mask = (std::uint64_t{1} << kYearBits) - 1;
  for (const auto& [key, count] : counts_) {
    events.push_back(EdgeEvent{static_cast<NodeId>(key >> (kNodeBits + kYearBits)),
                               static_cast<NodeId>((key >> kYearBits) & node_mask),
                               horizon_.first + static_cast<int>(key & year_mask), count});
  }
  counts_.clear();
  std::sort(events.begin(), events.end(),
            [](const EdgeEvent& a, const EdgeEvent& b) { return std::tie(a.year, a.u, a.v) < std::tie(b.year, b.u, b.v); });
  return TemporalGraph(std::move(vertices_), horizon_, std::move(events));
}

TemporalGraph build_graph(const std::vector<WorkRecord>& works, const ConceptCatalog& catalog,
                          YearRange horizon, BuildOptions options) {
  GraphBuilder builder(catalog, horizon, options);
  for (const auto& w : works) builder.add(w);
  return std::move(builder).finish();
}

SplitStreams split(const TemporalGraph& graph, const SplitManifest& manifest) {
  manifest.validate();
  if (!graph.horizon().contains(manifest.span())) {
    throw UsageError("split manifest " + manifest.span().to_string() + " exceeds horizon " +
                     graph.horizon().to_string());
  }
  return {graph.events_in(manifest.train), graph.events_in(manifest.val), graph.events_in(manifest.test)};
}

void write_edge_stream(std::ostream& out, const TemporalGraph& graph) {
  out << "u,v,year,weight\n";
  for (const auto& e : graph.events()) {
    out << graph.vertex(e.u) << ',' << graph.vertex(e.v) << ',' << e.year << ',' << e.weight << '\n';
  }
}

TemporalGraph read_edge_stream(std::istream& in, std::vector<std::string> vertices, YearRange horizon,
                               const std::string& source_name) {
  std::unordered_map<std::string, NodeId> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) index.emplace(vertices[i], static_cast<NodeId>(i));
  std::vector<EdgeEvent> events;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "u,v,year,weight") throw data_error_at(source_name, line_no, "expected header u,v,year,weight");
      header = true;
      continue;
    }
    std::string fields[4];
    std::stringstream ss(line);
    for (auto& f : fields) {
      if (!std::getline(ss, f, ',')) throw data_error_at(source_name, line_no, "expected 4 columns");
    }
    auto u = index.find(fields[0]);
    auto v = index.find(fields[1]);
    if (u == index.end() || v == index.end()) throw data_error_at(source_name, line_no, "unknown vertex");
    EdgeEvent e{u->second, v->second, 0, 0};
    auto parse = [&](const std::string& s, auto& value) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw data_error_at(source_name, line_no, "invalid number '" + s + "'");
      }
    };
    parse(fields[2], e.year);
    parse(fields[3], e.weight);
    events.push_back(e);
  }
  try {
    return TemporalGraph(std::move(vertices), horizon, std::move(events));
  } catch (const DataError& err) {
    throw DataError(source_name + ": " + err.what());
  }
}

}  // namespace fosbench
