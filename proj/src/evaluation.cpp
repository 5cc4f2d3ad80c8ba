#include "fosbench/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fosbench/error.hpp"
#include "fosbench/random.hpp"

namespace fosbench {

namespace {

// Feeds the scorer year by year and refuses to hand it anything at or after
// the year being scored.
class HistoryFeed {
 public:
  HistoryFeed(LinkScorer& scorer, const TemporalGraph& graph) : scorer_(scorer), graph_(graph) {
    scorer_.reset();
    next_ = graph.horizon().first;
  }

  void advance_to(int year) {
    for (; next_ < year; ++next_) {
      const auto evs = graph_.events_in(next_);
      for (const auto& e : evs) {
        if (e.year >= year) throw std::logic_error("temporal leakage: event at or after the scored year");
      }
      scorer_.observe(evs);
    }
  }

 private:
  LinkScorer& scorer_;
  const TemporalGraph& graph_;
  int next_;
};

void check_scores(const std::vector<double>& scores, std::size_t expected) {
  if (scores.size() != expected) throw std::logic_error("scorer returned the wrong number of scores");
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) throw NumericError("scorer produced a score outside [0, 1]");
  }
}

}  // namespace

EvalReport evaluate(LinkScorer& scorer, const TemporalGraph& graph, YearRange eval_years,
                    const NegativePools& pools, const EvalConfig& config) {
  config.sampler.validate();
  if (config.batch_size < 1) throw UsageError("batch size must be positive");
  if (graph.events_in(eval_years).empty()) throw UsageError("no positives in evaluation years " + eval_years.to_string());

  EvalReport report;
  report.scorer = scorer.name();
  report.regime = config.sampler.regime;
  HistoryFeed feed(scorer, graph);
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  std::size_t batch_index = 0;
  if (config.audit) *config.audit << "year,batch,u,v_positive,v_negative,source\n";

  for (int year = eval_years.first; year <= eval_years.last; ++year) {
    const auto positives = graph.events_in(year);
    if (positives.empty()) continue;
    feed.advance_to(year);
    YearResult yr{year, 0, 0.0, 0.0};
    for (std::size_t start = 0; start < positives.size(); start += batch_size, ++batch_index) {
      const auto chunk = positives.subspan(start, std::min(batch_size, positives.size() - start));
      Rng rng = stream_rng(config.sampler.seed, batch_index);
      std::vector<PairQuery> queries;
      std::vector<int> labels;
      BatchResult br{year, batch_index, chunk.size(), 0, 0, 0.0, 0.0};
      for (const auto& e : chunk) {
        queries.push_back({e.u, e.v});
        labels.push_back(1);
      }
      for (const auto& e : chunk) {
        for (const auto& neg : sample_negatives(e.u, e.v, year, pools, config.sampler, rng)) {
          queries.push_back({neg.u, neg.v});
          labels.push_back(0);
          ++br.negatives;
          br.fallback_negatives += neg.fallback ? 1 : 0;
          if (config.audit) {
            *config.audit << year << ',' << batch_index << ',' << graph.vertex(e.u) << ',' << graph.vertex(e.v)
                          << ',' << graph.vertex(neg.v) << ','
                          << (config.sampler.regime == NegativeRegime::kRandom ? "random"
                              : neg.fallback                                   ? "fallback"
                                                                               : "pool")
                          << '\n';
          }
        }
      }
      const auto scores = scorer.score(queries, year, derive_seed(config.sampler.seed, batch_index));
      check_scores(scores, queries.size());
      std::vector<ScoredLabel> scored(queries.size());
      for (std::size_t i = 0; i < scored.size(); ++i) scored[i] = {scores[i], labels[i]};
      br.ap = average_precision(scored);
      br.auc = auc_roc(scored);
      yr.mean_ap += br.ap;
      yr.mean_auc += br.auc;
      ++yr.batches;
      report.flat_mean_ap += br.ap;
      report.flat_mean_auc += br.auc;
      report.fallback_negatives += br.fallback_negatives;
      report.batches.push_back(br);
    }
    yr.mean_ap /= static_cast<double>(yr.batches);
    yr.mean_auc /= static_cast<double>(yr.batches);
    report.mean_ap += yr.mean_ap;
    report.mean_auc += yr.mean_auc;
    report.years.push_back(yr);
  }
  report.mean_ap /= static_cast<double>(report.years.size());
  report.mean_auc /= static_cast<double>(report.years.size());
  report.flat_mean_ap /= static_cast<double>(report.batches.size());
  report.flat_mean_auc /= static_cast<double>(report.batches.size());
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["scorer"] = report.scorer;
  j["regime"] = regime_name(report.regime);
  j["mean_ap"] = report.mean_ap;
  j["mean_auc"] = report.mean_auc;
  j["flat_mean_ap"] = report.flat_mean_ap;
  j["flat_mean_auc"] = report.flat_mean_auc;
  j["aggregation"] = "mean_* averages batches within each year, then years; flat_mean_* averages all batches";
  j["batch_count"] = report.batches.size();
  j["fallback_negatives"] = report.fallback_negatives;
  auto& years = j["per_year"] = nlohmann::json::array();
  for (const auto& y : report.years) {
    years.push_back({{"year", y.year}, {"batches", y.batches}, {"mean_ap", y.mean_ap}, {"mean_auc", y.mean_auc}});
  }
  auto& batches = j["batches"] = nlohmann::json::array();
  for (const auto& b : report.batches) {
    batches.push_back({{"year", b.year},
                       {"index", b.index},
                       {"positives", b.positives},
                       {"negatives", b.negatives},
                       {"fallback_negatives", b.fallback_negatives},
                       {"ap", b.ap},
                       {"auc", b.auc}});
  }
  return j;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << report.scorer << " / " << regime_name(report.regime) << '\n';
  out << std::fixed << std::setprecision(4);
  out << "  year  batches      AP     AUC\n";
  for (const auto& y : report.years) {
    out << "  " << std::setw(4) << y.year << "  " << std::setw(7) << y.batches << "  " << y.mean_ap << "  "
        << y.mean_auc << '\n';
  }
  out << "  mean (year-averaged)   " << report.mean_ap << "  " << report.mean_auc << '\n';
  out << "  mean (flat)            " << report.flat_mean_ap << "  " << report.flat_mean_auc << '\n';
  return out.str();
}

std::vector<RankedPair> rank_emerging(LinkScorer& scorer, const TemporalGraph& graph, int year,
                                      const RankOptions& options) {
  if (options.top_k <= 0) throw UsageError("top_k must be positive");
  if (!graph.horizon().contains(year)) throw UsageError("reference year outside the graph horizon");
  HistoryFeed feed(scorer, graph);
  feed.advance_to(year + 1);

  const auto n = static_cast<NodeId>(graph.num_vertices());
  const std::uint64_t all_pairs = static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  std::vector<PairQuery> candidates;
  auto unseen = [&](NodeId u, NodeId v) { return graph.first_observation(u, v) > year; };
  if (all_pairs <= options.candidate_budget) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (unseen(u, v)) candidates.push_back({u, v});
      }
    }
  } else {
    const std::uint64_t per_source = std::max<std::uint64_t>(1, options.candidate_budget / n);
    std::vector<std::uint64_t> keys;
    Rng rng(derive_seed(options.seed, 0x72616e6b));
    for (NodeId u = 0; u < n; ++u) {
      for (std::uint64_t i = 0; i < per_source; ++i) {
        auto v = static_cast<NodeId>(rng.uniform_index(n - 1));
        if (v >= u) ++v;
        if (unseen(u, v)) keys.push_back(pair_key(u, v));
      }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto k : keys) candidates.push_back({pair_first(k), pair_second(k)});
  }

  std::vector<RankedPair> scored;
  scored.reserve(candidates.size());
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0, chunk = 0; start < candidates.size(); start += kChunk, ++chunk) {
    const auto part = std::span<const PairQuery>(candidates).subspan(start, std::min(kChunk, candidates.size() - start));
    const auto s = scorer.score(part, year + 1, derive_seed(options.seed, chunk));
    check_scores(s, part.size());
    for (std::size_t i = 0; i < part.size(); ++i) scored.push_back({0, part[i].u, part[i].v, s[i]});
  }
  const auto keep = std::min(scored.size(), static_cast<std::size_t>(options.top_k));
  auto order = [](const RankedPair& a, const RankedPair& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), order);
  scored.resize(keep);
  for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i + 1);
  return scored;
}

void write_ranking(std::ostream& out, const TemporalGraph& graph, const std::vector<RankedPair>& ranking) {
  out << "rank,u,v,score\n";
  char buf[64];
  for (const auto& r : ranking) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), r.score);
    out << r.rank << ',' << graph.vertex(r.u) << ',' << graph.vertex(r.v) << ',' << std::string_view(buf, ptr - buf)
        << '\n';
  }
}

}  // namespace fosbench
