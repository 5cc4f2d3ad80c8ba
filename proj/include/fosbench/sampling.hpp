#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fosbench/random.hpp"
#include "fosbench/temporal_graph.hpp"

namespace fosbench {

enum class NegativeRegime { kRandom, kHistorical, kInductive };
enum class NeighborStrategy { kUniform, kRecent, kTimeAware };

NegativeRegime parse_regime(const std::string& name);
const char* regime_name(NegativeRegime regime);
NeighborStrategy parse_neighbor_strategy(const std::string& name);
const char* neighbor_strategy_name(NeighborStrategy strategy);

struct SamplerConfig {
  NegativeRegime regime = NegativeRegime::kRandom;
  int negatives_per_positive = 1;
  std::uint64_t seed = 0;
  NeighborStrategy neighbor_strategy = NeighborStrategy::kUniform;
  int neighbor_budget = 20;  // S
  double alpha = 1e-6;       // recency factor of the time-aware sampler

  void validate() const;
};

// Candidate pools for one evaluated split: unordered pairs of the training
// stream, pairs of the evaluated stream absent from training, and the
// per-year active pair sets of the evaluated stream.
class NegativePools {
 public:
  NegativePools() = default;
  NegativePools(std::size_t num_vertices, std::span<const EdgeEvent> train, std::span<const EdgeEvent> eval);

  std::size_t num_vertices() const { return num_vertices_; }
  bool in_train(NodeId u, NodeId v) const { return train_.count(pair_key(u, v)) != 0; }
  bool in_test_only(NodeId u, NodeId v) const { return test_only_.count(pair_key(u, v)) != 0; }
  // (u, v) in E_t of the evaluated stream.
  bool active_at(NodeId u, NodeId v, int year) const;

  // Partners of u under the training / test-only pools, sorted.
  std::span<const NodeId> historical_partners(NodeId u) const { return historical_adj_.at(u); }
  std::span<const NodeId> inductive_partners(NodeId u) const { return inductive_adj_.at(u); }

  std::size_t train_pairs() const { return train_.size(); }
  std::size_t test_only_pairs() const { return test_only_.size(); }

 private:
  std::size_t num_vertices_ = 0;
  std::unordered_set<std::uint64_t> train_;
  std::unordered_set<std::uint64_t> test_only_;
  std::unordered_map<int, std::unordered_set<std::uint64_t>> active_;
  std::vector<std::vector<NodeId>> historical_adj_;
  std::vector<std::vector<NodeId>> inductive_adj_;
};

struct Negative {
  NodeId u = 0;
  NodeId v = 0;
  int year = 0;
  // Drawn from the random pool because the regime pool ran short.
  bool fallback = false;
};

// Destination-corrupted negatives for the positive (u, v, year). Draws
// within one call are without replacement.
std::vector<Negative> sample_negatives(NodeId u, NodeId v, int year, const NegativePools& pools,
                                       const SamplerConfig& config, Rng& rng);

struct Interaction {
  NodeId neighbor = 0;
  int year = 0;

  bool operator==(const Interaction&) const = default;
};

struct NeighborSample {
  std::vector<Interaction> neighbors;
  // Null-embedding slots needed to reach the budget S.
  int pad_count = 0;
};

// Throws UsageError if any history entry is not strictly before `year`.
NeighborSample sample_neighbors(std::span<const Interaction> history, int year, const SamplerConfig& config,
                                Rng& rng);

// Per-node interaction lists fed year by year in chronological order.
class InteractionHistory {
 public:
  explicit InteractionHistory(std::size_t num_vertices = 0) : lists_(num_vertices) {}

  // Events must not precede anything observed earlier.
  void observe(std::span<const EdgeEvent> events);
  // Interactions of `node` with year < `year`.
  std::span<const Interaction> before(NodeId node, int year) const;
  void clear();
  // Latest year observed so far, or INT_MIN.
  int latest_year() const { return latest_; }

 private:
  std::vector<std::vector<Interaction>> lists_;
  int latest_ = std::numeric_limits<int>::min();
};

}  // namespace fosbench
