#include <doctest.h>

#include <sstream>

#include "fosbench/edgebank.hpp"
#include "fosbench/error.hpp"
#include "fosbench/evaluation.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace fosbench;

namespace {

// Records every observed event and scores a constant.
class SpyScorer final : public LinkScorer {
 public:
  std::string name() const override { return "spy"; }
  void reset() override { seen.clear(); }
  void observe(std::span<const EdgeEvent> events) override { seen.insert(seen.end(), events.begin(), events.end()); }
  std::vector<double> score(std::span<const PairQuery> queries, int year, std::uint64_t) override {
    for (const auto& e : seen) CHECK(e.year < year);
    return std::vector<double>(queries.size(), value);
  }
  std::vector<EdgeEvent> seen;
  double value = 0.5;
};

struct Setup {
  TemporalGraph graph;
  SplitManifest m{{2000, 2006}, {2007, 2008}, {2009, 2011}};
  NegativePools pools;

  Setup() {
    Rng rng(17);
    graph = synth::make_graph(20, {2000, 2011}, synth::random_stream(rng, 20, {2000, 2011}, 25, 0.6));
    const auto s = split(graph, m);
    pools = NegativePools(20, s.train, s.test);
  }
};

}  // namespace

TEST_CASE("evaluation feeds only the past and batches within years") {
  Setup s;
  SpyScorer spy;
  EvalConfig cfg;
  cfg.batch_size = 7;
  const auto r = evaluate(spy, s.graph, s.m.test, s.pools, cfg);
  std::size_t positives = 0;
  for (const auto& b : r.batches) {
    CHECK(s.m.test.contains(b.year));
    CHECK(b.positives <= 7);
    CHECK(b.negatives == b.positives);
    positives += b.positives;
    CHECK(b.ap == doctest::Approx(0.5));
    CHECK(b.auc == doctest::Approx(0.5));
  }
  CHECK(positives == s.graph.events_in(s.m.test).size());
  CHECK(r.years.size() == 3);
  CHECK(r.mean_ap == doctest::Approx(0.5));
}

TEST_CASE("scores outside the unit interval are rejected") {
  Setup s;
  SpyScorer spy;
  spy.value = 1.5;
  CHECK_THROWS_AS(evaluate(spy, s.graph, s.m.test, s.pools, EvalConfig{}), NumericError);
}

TEST_CASE("hierarchical and flat aggregation are both reported") {
  Setup s;
  EdgeBankScorer eb;
  EvalConfig cfg;
  cfg.batch_size = 5;
  const auto r = evaluate(eb, s.graph, s.m.test, s.pools, cfg);
  double flat = 0;
  for (const auto& b : r.batches) flat += b.ap;
  CHECK(r.flat_mean_ap == doctest::Approx(flat / r.batches.size()));
  double nested = 0;
  for (const auto& y : r.years) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& b : r.batches) {
      if (b.year == y.year) {
        sum += b.ap;
        ++count;
      }
    }
    CHECK(y.mean_ap == doctest::Approx(sum / count));
    nested += y.mean_ap;
  }
  CHECK(r.mean_ap == doctest::Approx(nested / r.years.size()));
  const auto j = to_json(r);
  CHECK(j.contains("aggregation"));
  CHECK(format_report(r).find("edgebank_inf") != std::string::npos);
}

TEST_CASE("evaluation is reproducible and the audit log lists every negative") {
  Setup s;
  EdgeBankScorer eb;
  EvalConfig cfg;
  cfg.sampler.regime = NegativeRegime::kHistorical;
  std::ostringstream a1, a2;
  cfg.audit = &a1;
  const auto r1 = evaluate(eb, s.graph, s.m.test, s.pools, cfg);
  cfg.audit = &a2;
  const auto r2 = evaluate(eb, s.graph, s.m.test, s.pools, cfg);
  CHECK(to_json(r1).dump() == to_json(r2).dump());
  CHECK(a1.str() == a2.str());
  std::size_t lines = 0;
  for (char c : a1.str()) lines += c == '\n';
  CHECK(lines == 1 + s.graph.events_in(s.m.test).size());
}

TEST_CASE("edgebank separates regimes as expected on a repeating stream") {
  Setup s;
  EdgeBankScorer eb;
  EvalConfig cfg;
  const auto random = evaluate(eb, s.graph, s.m.test, s.pools, cfg);
  cfg.sampler.regime = NegativeRegime::kHistorical;
  const auto hist = evaluate(eb, s.graph, s.m.test, s.pools, cfg);
  CHECK(random.mean_ap > hist.mean_ap);
}

TEST_CASE("emerging-pair ranking") {
  const TemporalGraph g(synth::vertex_names(4), {2000, 2002},
                        {{0, 1, 2000, 1}, {1, 2, 2001, 1}, {0, 3, 2002, 1}});
  SpyScorer spy;
  RankOptions opts;
  opts.top_k = 100;
  const auto ranking = rank_emerging(spy, g, 2001, opts);
  // Pairs never seen through 2001: (0,2) (0,3) (1,3) (2,3).
  REQUIRE(ranking.size() == 4);
  CHECK(ranking[0].u == 0);
  CHECK(ranking[0].v == 2);
  CHECK(ranking[3].rank == 4);
  opts.top_k = 0;
  CHECK_THROWS_AS(rank_emerging(spy, g, 2001, opts), UsageError);
  std::ostringstream out;
  write_ranking(out, g, ranking);
  CHECK(out.str().rfind("rank,u,v,score\n1,v0000,v0002,0.5", 0) == 0);
}
