#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fosbench/metrics.hpp"
#include "fosbench/sampling.hpp"
#include "fosbench/scorer.hpp"

namespace fosbench {

struct EvalConfig {
  SamplerConfig sampler;
  int batch_size = 300;
  // Optional CSV sink recording every sampled negative.
  std::ostream* audit = nullptr;
};

struct BatchResult {
  int year = 0;
  std::size_t index = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t fallback_negatives = 0;
  double ap = 0.0;
  double auc = 0.0;
};

struct YearResult {
  int year = 0;
  std::size_t batches = 0;
  double mean_ap = 0.0;
  double mean_auc = 0.0;
};

struct EvalReport {
  std::string scorer;
  NegativeRegime regime = NegativeRegime::kRandom;
  std::vector<BatchResult> batches;
  std::vector<YearResult> years;
  // Mean over batches within a year, then over years.
  double mean_ap = 0.0;
  double mean_auc = 0.0;
  // Plain mean over all batches.
  double flat_mean_ap = 0.0;
  double flat_mean_auc = 0.0;
  std::size_t fallback_negatives = 0;
};

// Scores the positives of `eval_years` in chronological batches (batches do
// not straddle years), one negative set per positive from `pools`. The
// scorer is reset and fed every event before a year ahead of scoring it.
EvalReport evaluate(LinkScorer& scorer, const TemporalGraph& graph, YearRange eval_years,
                    const NegativePools& pools, const EvalConfig& config);

nlohmann::json to_json(const EvalReport& report);
// Fixed-width table, one row per year plus the aggregates.
std::string format_report(const EvalReport& report);

struct RankOptions {
  int top_k = 20;
  // Above this many candidate pairs, candidates are drawn per source.
  std::size_t candidate_budget = 2'000'000;
  std::uint64_t seed = 0;
};

struct RankedPair {
  int rank = 0;
  NodeId u = 0;
  NodeId v = 0;
  double score = 0.0;
};

// Pairs never observed up to and including `year`, scored for `year + 1`
// after feeding the scorer all events through `year`. Sorted by score
// descending, ties by (u, v).
std::vector<RankedPair> rank_emerging(LinkScorer& scorer, const TemporalGraph& graph, int year,
                                      const RankOptions& options);

// CSV `rank,u,v,score` with field ids.
void write_ranking(std::ostream& out, const TemporalGraph& graph, const std::vector<RankedPair>& ranking);

}  // namespace fosbench
