#include "fosbench/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <queue>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "fosbench/error.hpp"
#include "fosbench/random.hpp"

namespace fosbench {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex mu;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::unordered_set<std::uint64_t> pair_set(std::span<const EdgeEvent> events) {
  std::unordered_set<std::uint64_t> out;
  out.reserve(events.size());
  for (const auto& e : events) out.insert(pair_key(e.u, e.v));
  return out;
}

// Active nodes of one year relabeled 0..n-1 with sorted adjacency lists.
struct Snapshot {
  std::vector<NodeId> nodes;
  std::vector<std::vector<NodeId>> adj;

  explicit Snapshot(std::span<const EdgeEvent> events) {
    nodes.reserve(2 * events.size());
    for (const auto& e : events) {
      nodes.push_back(e.u);
      nodes.push_back(e.v);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    adj.resize(nodes.size());
    for (const auto& e : events) {
      const auto a = local(e.u), b = local(e.v);
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
  }

  NodeId local(NodeId global) const {
    return static_cast<NodeId>(std::lower_bound(nodes.begin(), nodes.end(), global) - nodes.begin());
  }
  std::size_t size() const { return nodes.size(); }
};

std::size_t common_count(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::size_t n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// Distances from `source`; -1 for unreachable.
std::vector<int> bfs(const std::vector<std::vector<NodeId>>& adj, NodeId source) {
  std::vector<int> dist(adj.size(), -1);
  std::vector<NodeId> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto x = queue[head];
    for (const auto y : adj[x]) {
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

std::pair<NodeId, int> farthest(const std::vector<int>& dist) {
  NodeId best = 0;
  int far = -1;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > far) {
      far = dist[i];
      best = static_cast<NodeId>(i);
    }
  }
  return {best, far};
}

std::vector<int> horizon_years(const TemporalGraph& graph) {
  std::vector<int> years;
  for (int y = graph.horizon().first; y <= graph.horizon().last; ++y) years.push_back(y);
  return years;
}

std::string num(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

double novelty(const TemporalGraph& graph, YearRange window) {
  if (window.size() < 2) throw UsageError("novelty needs at least two years");
  std::unordered_set<std::uint64_t> seen;
  double sum = 0.0;
  std::size_t years = 0;
  for (int year = window.first; year <= window.last; ++year) {
    const auto events = graph.events_in(year);
    if (year > window.first && !events.empty()) {
      std::size_t fresh = 0;
      for (const auto& e : events) fresh += seen.count(pair_key(e.u, e.v)) == 0;
      sum += static_cast<double>(fresh) / static_cast<double>(events.size());
      ++years;
    }
    for (const auto& e : events) seen.insert(pair_key(e.u, e.v));
  }
  return years ? sum / static_cast<double>(years) : 0.0;
}

RecurrenceSurprise recurrence_surprise(std::span<const EdgeEvent> train, std::span<const EdgeEvent> test) {
  if (train.empty() || test.empty()) throw UsageError("recurrence and surprise need non-empty train and test streams");
  const auto a = pair_set(train);
  const auto b = pair_set(test);
  RecurrenceSurprise r;
  r.train_edges = a.size();
  r.test_edges = b.size();
  for (const auto k : b) r.shared_edges += a.count(k);
  r.recurrence = static_cast<double>(r.shared_edges) / static_cast<double>(r.train_edges);
  r.surprise = static_cast<double>(r.test_edges - r.shared_edges) / static_cast<double>(r.test_edges);
  r.recurrence_test_share = static_cast<double>(r.shared_edges) / static_cast<double>(r.test_edges);
  return r;
}

std::vector<TeaRow> tea_data(const TemporalGraph& graph) {
  std::vector<TeaRow> rows;
  for (const int year : horizon_years(graph)) {
    TeaRow row{year, 0, 0};
    for (const auto& e : graph.events_in(year)) {
      if (graph.first_observation(e.u, e.v) == year) {
        ++row.new_edges;
      } else {
        ++row.repeated_edges;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

const char* tet_tag_name(TetTag tag) {
  switch (tag) {
    case TetTag::kTrainSeen:
      return "train_seen";
    case TetTag::kTestOnly:
      return "test_only";
    case TetTag::kOther:
      break;
  }
  return "other";
}

std::vector<TetRow> tet_data(const TemporalGraph& graph, const SplitManifest& manifest) {
  std::unordered_map<std::uint64_t, std::vector<int>> years;
  for (const auto& e : graph.events()) years[pair_key(e.u, e.v)].push_back(e.year);
  std::vector<TetRow> rows;
  rows.reserve(years.size());
  for (auto& [key, list] : years) {
    TetRow row;
    row.u = pair_first(key);
    row.v = pair_second(key);
    row.first = list.front();
    row.last = list.back();
    const bool in_train = std::any_of(list.begin(), list.end(), [&](int y) { return manifest.train.contains(y); });
    const bool in_test = std::any_of(list.begin(), list.end(), [&](int y) { return manifest.test.contains(y); });
    row.tag = in_train ? TetTag::kTrainSeen : (in_test ? TetTag::kTestOnly : TetTag::kOther);
    row.years = std::move(list);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const TetRow& a, const TetRow& b) {
    return std::tie(a.first, a.last, a.u, a.v) < std::tie(b.first, b.last, b.u, b.v);
  });
  return rows;
}

NodeStats node_stats(const TemporalGraph& graph, const DiagnosticsOptions& options) {
  const auto years = horizon_years(graph);
  NodeStats out;
  out.years.resize(years.size());
  parallel_for(years.size(), options.threads, [&](std::size_t i) {
    const Snapshot s(graph.events_in(years[i]));
    auto& row = out.years[i];
    row.year = years[i];
    row.active_nodes = s.size();
    if (s.size() == 0) return;
    double degree = 0.0, clustering = 0.0;
    std::size_t eligible = 0;
    for (std::size_t x = 0; x < s.size(); ++x) {
      const auto& nx = s.adj[x];
      degree += static_cast<double>(nx.size());
      if (nx.size() < 2) continue;
      std::size_t links = 0;
      for (const auto y : nx) links += common_count(nx, s.adj[y]);
      const double k = static_cast<double>(nx.size());
      clustering += static_cast<double>(links) / (k * (k - 1.0));
      ++eligible;
    }
    const double n = static_cast<double>(s.size());
    row.mean_degree = degree / n;
    row.clustering = clustering / n;
    if (eligible) row.clustering_deg2 = clustering / static_cast<double>(eligible);
  });

  double growth = 0.0;
  std::size_t growth_years = 0;
  for (std::size_t i = 1; i < out.years.size(); ++i) {
    const auto prev = out.years[i - 1].active_nodes;
    if (prev == 0) continue;
    const double g =
        (static_cast<double>(out.years[i].active_nodes) - static_cast<double>(prev)) / static_cast<double>(prev);
    out.years[i].growth_rate = g;
    growth += g;
    ++growth_years;
  }
  if (growth_years) out.mean_growth_rate = growth / static_cast<double>(growth_years);

  std::vector<int> first(graph.num_vertices(), kNeverObserved), last(graph.num_vertices(), kNeverObserved);
  for (const auto& e : graph.events()) {
    for (const auto x : {e.u, e.v}) {
      if (first[x] == kNeverObserved) first[x] = e.year;
      last[x] = e.year;
    }
  }
  for (std::size_t x = 0; x < first.size(); ++x) {
    if (first[x] == kNeverObserved) continue;
    ++out.persistence[last[x] - first[x] + 1];
    ++out.last_activity[last[x]];
  }
  return out;
}

EdgeStats edge_stats(const TemporalGraph& graph) {
  EdgeStats out;
  const double n = static_cast<double>(graph.num_vertices());
  const double possible = n * (n - 1.0) / 2.0;
  for (const int year : horizon_years(graph)) {
    const auto events = graph.events_in(year);
    EdgeYear row{year, events.size(), 0.0, std::nullopt};
    if (possible > 0) row.density = static_cast<double>(events.size()) / possible;
    if (!events.empty()) {
      std::size_t repeated = 0;
      for (const auto& e : events) repeated += graph.first_observation(e.u, e.v) < year;
      row.repetition_rate = static_cast<double>(repeated) / static_cast<double>(events.size());
    }
    out.years.push_back(row);
  }

  std::unordered_map<std::uint64_t, std::size_t> counts;
  for (const auto& e : graph.events()) ++counts[pair_key(e.u, e.v)];
  std::vector<std::uint64_t> keys;
  keys.reserve(counts.size());
  for (const auto& [k, c] : counts) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  double gap_sum = 0.0;
  std::size_t multi = 0;
  for (const auto k : keys) {
    const auto u = pair_first(k), v = pair_second(k);
    const int first = graph.first_observation(u, v), last = graph.last_observation(u, v);
    const auto c = counts[k];
    ++out.frequency[static_cast<int>(c)];
    ++out.lifetime[last - first + 1];
    ++out.lifetime_span[last - first];
    ++out.last_appearance[last];
    if (c >= 2) {
      const double gap = static_cast<double>(last - first) / static_cast<double>(c - 1);
      gap_sum += gap;
      ++multi;
      ++out.inter_event[gap];
    }
  }
  if (multi) out.mean_inter_event = gap_sum / static_cast<double>(multi);
  return out;
}

int exact_diameter(const std::vector<std::vector<NodeId>>& adjacency) {
  int diameter = 0;
  for (std::size_t x = 0; x < adjacency.size(); ++x) {
    diameter = std::max(diameter, farthest(bfs(adjacency, static_cast<NodeId>(x))).second);
  }
  return diameter;
}

std::vector<GraphYear> graph_stats(const TemporalGraph& graph, const DiagnosticsOptions& options) {
  const auto years = horizon_years(graph);
  std::vector<GraphYear> out(years.size());
  parallel_for(years.size(), options.threads, [&](std::size_t i) {
    const Snapshot s(graph.events_in(years[i]));
    auto& row = out[i];
    row.year = years[i];
    if (s.size() == 0) return;
    std::vector<int> component(s.size(), -1);
    std::vector<std::size_t> sizes;
    for (std::size_t x = 0; x < s.size(); ++x) {
      if (component[x] >= 0) continue;
      const auto dist = bfs(s.adj, static_cast<NodeId>(x));
      std::size_t size = 0;
      for (std::size_t y = 0; y < dist.size(); ++y) {
        if (dist[y] >= 0) {
          component[y] = static_cast<int>(sizes.size());
          ++size;
        }
      }
      sizes.push_back(size);
    }
    // Lowest-labelled component among the largest ones.
    const auto largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    row.components = sizes.size();
    row.largest_component = sizes[static_cast<std::size_t>(largest)];

    std::vector<NodeId> members;
    std::vector<NodeId> relabel(s.size(), 0);
    for (std::size_t x = 0; x < s.size(); ++x) {
      if (component[x] == largest) {
        relabel[x] = static_cast<NodeId>(members.size());
        members.push_back(static_cast<NodeId>(x));
      }
    }
    std::vector<std::vector<NodeId>> adj(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
      for (const auto y : s.adj[members[j]]) adj[j].push_back(relabel[y]);
    }
    if (members.size() <= options.exact_diameter_limit) {
      row.diameter = exact_diameter(adj);
      return;
    }
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(years[i])));
    auto [a, ecc] = farthest(bfs(adj, static_cast<NodeId>(rng.uniform_index(adj.size()))));
    int estimate = std::max(ecc, farthest(bfs(adj, a)).second);
    for (std::size_t k = 0; k < options.diameter_samples; ++k) {
      estimate = std::max(estimate, farthest(bfs(adj, static_cast<NodeId>(rng.uniform_index(adj.size())))).second);
    }
    row.diameter = estimate;
    row.diameter_approximate = true;
  });
  return out;
}

std::vector<TemporalYear> temporal_stats(const TemporalGraph& graph, const DiagnosticsOptions& options) {
  const auto years = horizon_years(graph);
  std::vector<TemporalYear> out(years.size());
  parallel_for(years.size(), options.threads, [&](std::size_t i) {
    const auto events = graph.events_in(years[i]);
    auto& row = out[i];
    row.year = years[i];
    if (!events.empty()) {
      std::unordered_map<NodeId, double> degree;
      for (const auto& e : events) {
        degree[e.u] += 1.0;
        degree[e.v] += 1.0;
      }
      // Both orientations of every edge: x and y share one distribution.
      double sx = 0.0, sxx = 0.0, sxy = 0.0;
      for (const auto& e : events) {
        const double a = degree[e.u], b = degree[e.v];
        sx += a + b;
        sxx += a * a + b * b;
        sxy += 2.0 * a * b;
      }
      const double m = 2.0 * static_cast<double>(events.size());
      const double mean = sx / m;
      const double var = sxx / m - mean * mean;
      const double cov = sxy / m - mean * mean;
      if (var > 1e-12 * std::max(1.0, mean * mean)) row.assortativity = cov / var;
    }
    if (i == 0) return;
    const auto prev = pair_set(graph.events_in(years[i - 1]));
    const auto curr = pair_set(events);
    for (const auto k : curr) row.gained += prev.count(k) == 0;
    for (const auto k : prev) row.lost += curr.count(k) == 0;
    if (row.lost > 0) {
      row.churn = static_cast<double>(row.gained) / static_cast<double>(row.lost);
    } else if (row.gained > 0) {
      row.churn = std::numeric_limits<double>::infinity();
    }
  });
  return out;
}

DiagnosticsReport diagnose(const TemporalGraph& graph, const SplitManifest& manifest,
                           const DiagnosticsOptions& options) {
  if (graph.events().empty()) throw UsageError("cannot diagnose a graph without events");
  const auto streams = split(graph, manifest);
  DiagnosticsReport r;
  r.window = manifest.span();
  r.novelty = novelty(graph, r.window);
  r.recurrence = recurrence_surprise(streams.train, streams.test);
  r.tea = tea_data(graph);
  r.tet = tet_data(graph, manifest);
  r.nodes = node_stats(graph, options);
  r.edges = edge_stats(graph);
  r.graph = graph_stats(graph, options);
  r.temporal = temporal_stats(graph, options);
  return r;
}

nlohmann::json stat_json(Stat value) {
  if (!value || std::isnan(*value)) return nullptr;
  if (std::isinf(*value)) return *value > 0 ? "inf" : "-inf";
  return *value;
}

std::string stat_csv(Stat value) {
  if (!value || std::isnan(*value)) return "";
  if (std::isinf(*value)) return *value > 0 ? "inf" : "-inf";
  return num(*value);
}

nlohmann::json summary_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  j["window"] = r.window.to_string();
  j["novelty"] = r.novelty;
  j["recurrence"] = r.recurrence.recurrence;
  j["surprise"] = r.recurrence.surprise;
  j["recurrence_test_share"] = r.recurrence.recurrence_test_share;
  j["train_edges"] = r.recurrence.train_edges;
  j["test_edges"] = r.recurrence.test_edges;
  j["shared_edges"] = r.recurrence.shared_edges;
  j["mean_growth_rate"] = stat_json(r.nodes.mean_growth_rate);
  j["mean_inter_event"] = stat_json(r.edges.mean_inter_event);
  j["distinct_edges"] = r.tet.size();
  j["clustering_convention"] = "clustering: active nodes with degree < 2 count as 0; clustering_deg2: degree >= 2 only";
  j["lifetime_convention"] = "lifetime = last - first + 1; lifetime_span = last - first";
  j["diameter_approximate_years"] = nlohmann::json::array();
  for (const auto& g : r.graph) {
    if (g.diameter_approximate) j["diameter_approximate_years"].push_back(g.year);
  }
  return j;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path, const std::string& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << header;
  return out;
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  return v ? std::to_string(*v) : "";
}

template <typename Key>
void write_histogram(const std::filesystem::path& path, const std::string& header, const char* bin,
                     const std::map<Key, std::size_t>& h) {
  auto out = open_csv(path, header);
  out << bin << ",count\n";
  for (const auto& [k, c] : h) {
    if constexpr (std::is_floating_point_v<Key>) {
      out << num(k) << ',' << c << '\n';
    } else {
      out << k << ',' << c << '\n';
    }
  }
}

}  // namespace

void write_diagnostics(const std::filesystem::path& dir, const TemporalGraph& graph,
                       const DiagnosticsReport& r, const std::string& header) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / "summary.json").string());
    out << summary_json(r).dump(2) << '\n';
  }
  {
    auto out = open_csv(dir / "node_series.csv", header);
    out << "year,active_nodes,mean_degree,growth_rate,clustering,clustering_deg2\n";
    for (const auto& y : r.nodes.years) {
      out << y.year << ',' << y.active_nodes << ',' << stat_csv(y.mean_degree) << ',' << stat_csv(y.growth_rate)
          << ',' << stat_csv(y.clustering) << ',' << stat_csv(y.clustering_deg2) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "edge_series.csv", header);
    out << "year,edges,density,repetition_rate\n";
    for (const auto& y : r.edges.years) {
      out << y.year << ',' << y.edges << ',' << num(y.density) << ',' << stat_csv(y.repetition_rate) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "graph_series.csv", header);
    out << "year,components,largest_component,diameter,diameter_approximate\n";
    for (const auto& y : r.graph) {
      out << y.year << ',' << opt(y.components) << ',' << opt(y.largest_component) << ',' << opt(y.diameter) << ','
          << (y.diameter_approximate ? 1 : 0) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "temporal_series.csv", header);
    out << "year,assortativity,churn,gained,lost\n";
    for (const auto& y : r.temporal) {
      out << y.year << ',' << stat_csv(y.assortativity) << ',' << stat_csv(y.churn) << ',' << y.gained << ','
          << y.lost << '\n';
    }
  }
  write_histogram(dir / "hist_persistence.csv", header, "span", r.nodes.persistence);
  write_histogram(dir / "hist_last_activity.csv", header, "year", r.nodes.last_activity);
  write_histogram(dir / "hist_frequency.csv", header, "years_present", r.edges.frequency);
  write_histogram(dir / "hist_lifetime.csv", header, "lifetime", r.edges.lifetime);
  write_histogram(dir / "hist_lifetime_span.csv", header, "span", r.edges.lifetime_span);
  write_histogram(dir / "hist_last_appearance.csv", header, "year", r.edges.last_appearance);
  write_histogram(dir / "hist_inter_event.csv", header, "mean_gap", r.edges.inter_event);
  {
    auto out = open_csv(dir / "tea.csv", header);
    out << "year,new,repeated\n";
    for (const auto& t : r.tea) out << t.year << ',' << t.new_edges << ',' << t.repeated_edges << '\n';
  }
  {
    auto out = open_csv(dir / "tet.csv", header);
    out << "order,u,v,year,first,last,tag\n";
    for (std::size_t i = 0; i < r.tet.size(); ++i) {
      const auto& t = r.tet[i];
      for (const int y : t.years) {
        out << i << ',' << graph.vertex(t.u) << ',' << graph.vertex(t.v) << ',' << y << ',' << t.first << ','
            << t.last << ',' << tet_tag_name(t.tag) << '\n';
      }
    }
  }
}

}  // namespace fosbench
