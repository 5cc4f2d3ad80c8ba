#include "fosbench/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "fosbench/error.hpp"

namespace fosbench {

NegativeRegime parse_regime(const std::string& name) {
  if (name == "random") return NegativeRegime::kRandom;
  if (name == "historical") return NegativeRegime::kHistorical;
  if (name == "inductive") return NegativeRegime::kInductive;
  throw UsageError("unknown negative-sampling regime '" + name + "'");
}

const char* regime_name(NegativeRegime regime) {
  switch (regime) {
    case NegativeRegime::kRandom: return "random";
    case NegativeRegime::kHistorical: return "historical";
    case NegativeRegime::kInductive: return "inductive";
  }
  return "?";
}

NeighborStrategy parse_neighbor_strategy(const std::string& name) {
  if (name == "uniform") return NeighborStrategy::kUniform;
  if (name == "recent") return NeighborStrategy::kRecent;
  if (name == "time_aware" || name == "time-aware") return NeighborStrategy::kTimeAware;
  throw UsageError("unknown neighbor strategy '" + name + "'");
}

const char* neighbor_strategy_name(NeighborStrategy strategy) {
  switch (strategy) {
    case NeighborStrategy::kUniform: return "uniform";
    case NeighborStrategy::kRecent: return "recent";
    case NeighborStrategy::kTimeAware: return "time_aware";
  }
  return "?";
}

void SamplerConfig::validate() const {
  if (negatives_per_positive < 1) throw UsageError("negatives_per_positive must be >= 1");
  if (neighbor_budget < 1) throw UsageError("neighbor budget S must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw UsageError("alpha must be finite and >= 0");
}

NegativePools::NegativePools(std::size_t num_vertices, std::span<const EdgeEvent> train,
                             std::span<const EdgeEvent> eval)
    : num_vertices_(num_vertices), historical_adj_(num_vertices), inductive_adj_(num_vertices) {
  for (const auto& e : train) {
    if (train_.insert(pair_key(e.u, e.v)).second) {
      historical_adj_.at(e.u).push_back(e.v);
      historical_adj_.at(e.v).push_back(e.u);
    }
  }
  for (const auto& e : eval) {
    const auto key = pair_key(e.u, e.v);
    active_[e.year].insert(key);
    if (!train_.count(key) && test_only_.insert(key).second) {
      inductive_adj_.at(e.u).push_back(e.v);
      inductive_adj_.at(e.v).push_back(e.u);
    }
  }
  for (auto& a : historical_adj_) std::sort(a.begin(), a.end());
  for (auto& a : inductive_adj_) std::sort(a.begin(), a.end());
}

bool NegativePools::active_at(NodeId u, NodeId v, int year) const {
  auto it = active_.find(year);
  return it != active_.end() && it->second.count(pair_key(u, v)) != 0;
}

std::vector<Negative> sample_negatives(NodeId u, NodeId v, int year, const NegativePools& pools,
                                       const SamplerConfig& config, Rng& rng) {
  const auto n = pools.num_vertices();
  if (u >= n || v >= n) throw UsageError("positive endpoint outside the vertex set");
  if (n < 2) throw UsageError("vertex set has no destination other than the positive's");
  const auto wanted = static_cast<std::size_t>(config.negatives_per_positive);
  std::vector<Negative> out;
  out.reserve(wanted);

  if (config.regime != NegativeRegime::kRandom) {
    const auto partners = config.regime == NegativeRegime::kHistorical ? pools.historical_partners(u)
                                                                       : pools.inductive_partners(u);
    std::vector<NodeId> candidates;
    for (NodeId p : partners) {
      if (p != v && !pools.active_at(u, p, year)) candidates.push_back(p);
    }
    const auto take = std::min(wanted, candidates.size());
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = i + rng.uniform_index(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
      out.push_back({u, candidates[i], year, false});
    }
  }

  // Random pool V \ {v}, without replacement against what is already drawn.
  const auto pool_size = n - 1;
  while (out.size() < wanted && out.size() < pool_size) {
    auto idx = static_cast<NodeId>(rng.uniform_index(pool_size));
    if (idx >= v) ++idx;
    const bool repeat = std::any_of(out.begin(), out.end(), [&](const Negative& x) { return x.v == idx; });
    if (repeat) continue;
    out.push_back({u, idx, year, config.regime != NegativeRegime::kRandom});
  }
  return out;
}

NeighborSample sample_neighbors(std::span<const Interaction> history, int year, const SamplerConfig& config,
                                Rng& rng) {
  for (const auto& h : history) {
    if (h.year >= year) {
      throw UsageError("neighbor history contains an interaction at " + std::to_string(h.year) +
                       ", not strictly before " + std::to_string(year));
    }
  }
  const auto budget = static_cast<std::size_t>(config.neighbor_budget);
  NeighborSample sample;
  if (history.size() <= budget) {
    sample.neighbors.assign(history.begin(), history.end());
    if (config.neighbor_strategy == NeighborStrategy::kRecent) {
      std::sort(sample.neighbors.begin(), sample.neighbors.end(), [](const Interaction& a, const Interaction& b) {
        return std::tie(b.year, a.neighbor) < std::tie(a.year, b.neighbor);
      });
    }
    sample.pad_count = static_cast<int>(budget - history.size());
    return sample;
  }

  std::vector<Interaction> pool(history.begin(), history.end());
  switch (config.neighbor_strategy) {
    case NeighborStrategy::kRecent:
      std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(budget), pool.end(),
                        [](const Interaction& a, const Interaction& b) {
                          return std::tie(b.year, a.neighbor) < std::tie(a.year, b.neighbor);
                        });
      pool.resize(budget);
      sample.neighbors = std::move(pool);
      break;
    case NeighborStrategy::kUniform:
      for (std::size_t i = 0; i < budget; ++i) {
        std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
      }
      pool.resize(budget);
      sample.neighbors = std::move(pool);
      break;
    case NeighborStrategy::kTimeAware: {
      // exp(-alpha (t - t_i)) shifted by the most recent interaction so the
      // largest weight is exactly 1.
      int newest = pool.front().year;
      for (const auto& h : pool) newest = std::max(newest, h.year);
      std::vector<double> weights(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) {
        weights[i] = std::exp(-config.alpha * static_cast<double>(newest - pool[i].year));
      }
      for (std::size_t step = 0; step < budget; ++step) {
        double total = 0.0;
        for (std::size_t i = step; i < pool.size(); ++i) total += weights[i];
        const double target = rng.uniform01() * total;
        std::size_t pick = pool.size() - 1;
        double acc = 0.0;
        for (std::size_t i = step; i < pool.size(); ++i) {
          acc += weights[i];
          if (target < acc) {
            pick = i;
            break;
          }
        }
        std::swap(pool[step], pool[pick]);
        std::swap(weights[step], weights[pick]);
      }
      pool.resize(budget);
      sample.neighbors = std::move(pool);
      break;
    }
  }
  return sample;
}

void InteractionHistory::observe(std::span<const EdgeEvent> events) {
  for (const auto& e : events) {
    if (e.year < latest_) throw UsageError("interaction history fed out of chronological order");
    latest_ = e.year;
    lists_.at(e.u).push_back({e.v, e.year});
    lists_.at(e.v).push_back({e.u, e.year});
  }
}

std::span<const Interaction> InteractionHistory::before(NodeId node, int year) const {
  const auto& list = lists_.at(node);
  auto end = std::partition_point(list.begin(), list.end(), [&](const Interaction& i) { return i.year < year; });
  return {list.data(), static_cast<std::size_t>(end - list.begin())};
}

void InteractionHistory::clear() {
  for (auto& l : lists_) l.clear();
  latest_ = std::numeric_limits<int>::min();
}

}  // namespace fosbench
