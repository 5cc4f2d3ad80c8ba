#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fosbench/error.hpp"
#include "fosbench/evaluation.hpp"
#include "fosbench/neural_scorer.hpp"
#include "support/synthetic.hpp"

using namespace fosbench;

namespace {

ScorerParams random_params(const ScorerShape& shape, std::uint64_t seed) {
  ScorerParams p(shape);
  Rng rng(seed);
  for (auto& x : p.values()) x = 0.5 * synth::normal(rng);
  return p;
}

std::vector<TrainingExample> random_batch(const ScorerShape& shape, std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<TrainingExample> out;
  for (int i = 0; i < n; ++i) {
    TrainingExample ex;
    for (int j = 0; j < shape.input_dim(); ++j) {
      ex.source_input.push_back(synth::normal(rng));
      ex.destination_input.push_back(synth::normal(rng));
    }
    ex.label = i % 2;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

TEST_CASE("untrained scorer outputs one half") {
  ScorerShape shape;
  shape.feature_dim = 4;
  const auto p = ScorerParams::initialize(shape, 3);
  const std::vector<double> z(static_cast<std::size_t>(shape.embed_dim), 0.7);
  CHECK(score_pair(p, z, z) == 0.5);
  CHECK(p.size() == static_cast<std::size_t>(32 * 16 + 32 + 32 * 64 + 32 + 32 + 1));
}

TEST_CASE("encoder input layout") {
  NodeFeatureMatrix f(3, 2);
  f.row(0)[0] = 1;
  f.row(1)[1] = 4;
  f.row(2)[0] = 2;
  NeighborSample s;
  s.neighbors = {{1, 2008}, {2, 2006}};
  s.pad_count = 2;
  const auto x = encoder_input(0, 2010, f, s, 4, 2);
  REQUIRE(x.size() == 6);
  CHECK(x[0] == 1);
  CHECK(x[2] == doctest::Approx(0.5));
  CHECK(x[3] == doctest::Approx(1.0));
  CHECK(x[4] == doctest::Approx(std::sin(3.0)));
  CHECK(x[5] == doctest::Approx(std::cos(3.0)));
  const auto empty = encoder_input(2, 2010, f, NeighborSample{{}, 4}, 4, 2);
  CHECK(empty[2] == 0);
  CHECK(empty[4] == 0);
  CHECK(empty[5] == 1);
}

TEST_CASE("analytic gradients match central differences") {
  for (const bool relu : {true, false}) {
    ScorerShape shape{3, 4, 5, 6, relu};
    const auto p = random_params(shape, relu ? 1 : 2);
    const auto batch = random_batch(shape, 9, 12);
    const auto r = gradient_check(p, batch, p.size(), 4);
    CHECK(r.coordinates == p.size());
    CHECK(r.max_relative_error < 1e-4);
  }
}

TEST_CASE("loss of a constant one-half scorer is log 2") {
  ScorerShape shape{3, 2, 4, 4, true};
  const auto p = ScorerParams::initialize(shape, 1);
  const auto batch = random_batch(shape, 2, 8);
  CHECK(loss_and_gradient(p, batch, nullptr) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("checkpoint round trip") {
  ScorerShape shape{3, 2, 4, 4, true};
  Checkpoint ck{random_params(shape, 5), TrainConfig{}, SamplerConfig{}, 7};
  ck.train.seed = 99;
  ck.sampler.neighbor_strategy = NeighborStrategy::kRecent;
  std::stringstream io;
  write_checkpoint(io, ck);
  const auto back = read_checkpoint(io);
  CHECK(std::equal(back.params.values().begin(), back.params.values().end(), ck.params.values().begin()));
  CHECK(back.best_epoch == 7);
  CHECK(back.train.seed == 99);
  CHECK(back.sampler.neighbor_strategy == NeighborStrategy::kRecent);
  std::istringstream bad("{\"format\": \"other\"}");
  CHECK_THROWS_AS(read_checkpoint(bad), DataError);
}

TEST_CASE("training config validation") {
  TrainConfig t;
  CHECK_NOTHROW(t.validate());
  t.dropout = 1.0;
  CHECK_THROWS_AS(t.validate(), UsageError);
  t = TrainConfig{};
  t.learning_rate = 0;
  CHECK_THROWS_AS(t.validate(), UsageError);
}

TEST_CASE("short training run improves on the planted graph and is reproducible") {
  const auto planted = synth::planted_two_cluster(4, 30);
  const auto features = NodeFeatureMatrix::from_table(planted.features, planted.graph.vertices());
  ScorerShape shape;
  shape.feature_dim = features.dim();
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.max_epochs = 3;
  cfg.seed = 1;
  SamplerConfig sampler;
  const auto a = train(planted.graph, planted.manifest, features, shape, cfg, sampler);
  const auto b = train(planted.graph, planted.manifest, features, shape, cfg, sampler);
  REQUIRE(a.log.size() == 3);
  CHECK(a.log.back().val_ap > 0.6);
  CHECK(std::equal(a.best.values().begin(), a.best.values().end(), b.best.values().begin()));
  std::ostringstream log;
  write_train_log(log, a.log);
  CHECK(log.str().rfind("epoch,loss,val_ap,val_auc\n1,", 0) == 0);
}

TEST_CASE("zero patience trains exactly one epoch") {
  const auto planted = synth::planted_two_cluster(4, 10);
  const auto features = NodeFeatureMatrix::from_table(planted.features, planted.graph.vertices());
  ScorerShape shape;
  shape.feature_dim = features.dim();
  TrainConfig cfg;
  cfg.patience = 0;
  const auto r = train(planted.graph, planted.manifest, features, shape, cfg, SamplerConfig{});
  CHECK(r.log.size() == 1);
  CHECK(r.best_epoch == 1);
}

TEST_CASE("divergent learning rates abort with a numeric error") {
  const auto planted = synth::planted_two_cluster(4, 10);
  auto table = planted.features;
  EmbeddingTable huge(table.dim());
  for (const auto& k : table.keys()) {
    auto v = table.at(k);
    for (auto& x : v) x *= 1e300;
    huge.insert(k, v);
  }
  const auto features = NodeFeatureMatrix::from_table(huge, planted.graph.vertices());
  ScorerShape shape;
  shape.feature_dim = features.dim();
  TrainConfig cfg;
  cfg.learning_rate = 1e10;
  cfg.max_epochs = 2;
  CHECK_THROWS_AS(train(planted.graph, planted.manifest, features, shape, cfg, SamplerConfig{}), NumericError);
}
