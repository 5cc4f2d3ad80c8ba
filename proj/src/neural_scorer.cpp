#include "fosbench/neural_scorer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "fosbench/error.hpp"
#include "fosbench/evaluation.hpp"

namespace fosbench {

NodeFeatureMatrix NodeFeatureMatrix::from_table(const EmbeddingTable& table, const std::vector<std::string>& vertices) {
  NodeFeatureMatrix m(vertices.size(), table.dim());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& v = table.at(vertices[i]);
    std::copy(v.begin(), v.end(), m.row(static_cast<NodeId>(i)).begin());
  }
  return m;
}

std::span<const double> NodeFeatureMatrix::row(NodeId id) const {
  if (id >= rows()) throw UsageError("feature row out of range");
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(id) * dim_, static_cast<std::size_t>(dim_));
}

std::span<double> NodeFeatureMatrix::row(NodeId id) {
  if (id >= rows()) throw UsageError("feature row out of range");
  return std::span<double>(data_).subspan(static_cast<std::size_t>(id) * dim_, static_cast<std::size_t>(dim_));
}

void ScorerShape::validate() const {
  if (feature_dim < 1 || embed_dim < 1 || hidden_dim < 1) throw UsageError("scorer dimensions must be positive");
  if (time_dim < 2 || time_dim % 2 != 0) throw UsageError("time encoding dimension must be even and >= 2");
}

namespace {

struct Layout {
  std::size_t enc_w, enc_b, hid_w, hid_b, out_w, out_b, total;
};

Layout layout_of(const ScorerShape& s) {
  const auto e = static_cast<std::size_t>(s.embed_dim);
  const auto h = static_cast<std::size_t>(s.hidden_dim);
  const auto in = static_cast<std::size_t>(s.input_dim());
  Layout l{};
  l.enc_w = 0;
  l.enc_b = l.enc_w + e * in;
  l.hid_w = l.enc_b + e;
  l.hid_b = l.hid_w + h * 2 * e;
  l.out_w = l.hid_b + h;
  l.out_b = l.out_w + h;
  l.total = l.out_b + 1;
  return l;
}

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

}  // namespace

ScorerParams::ScorerParams(const ScorerShape& shape) : shape_(shape) {
  shape.validate();
  values_.assign(layout_of(shape).total, 0.0);
}

ScorerParams ScorerParams::initialize(const ScorerShape& shape, std::uint64_t seed) {
  ScorerParams p(shape);
  Rng rng(derive_seed(seed, 0x696e6974));
  auto xavier = [&](Eigen::Map<Eigen::MatrixXd> w) {
    const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = (2.0 * rng.uniform01() - 1.0) * a;
    }
  };
  xavier(p.encoder_weight());
  xavier(p.hidden_weight());
  return p;
}

bool ScorerParams::finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

Eigen::Map<Eigen::MatrixXd> ScorerParams::encoder_weight() {
  return {values_.data() + layout_of(shape_).enc_w, shape_.embed_dim, shape_.input_dim()};
}
Eigen::Map<Eigen::VectorXd> ScorerParams::encoder_bias() {
  return {values_.data() + layout_of(shape_).enc_b, shape_.embed_dim};
}
Eigen::Map<Eigen::MatrixXd> ScorerParams::hidden_weight() {
  return {values_.data() + layout_of(shape_).hid_w, shape_.hidden_dim, 2 * shape_.embed_dim};
}
Eigen::Map<Eigen::VectorXd> ScorerParams::hidden_bias() {
  return {values_.data() + layout_of(shape_).hid_b, shape_.hidden_dim};
}
Eigen::Map<Eigen::VectorXd> ScorerParams::output_weight() {
  return {values_.data() + layout_of(shape_).out_w, shape_.hidden_dim};
}
double& ScorerParams::output_bias() { return values_[layout_of(shape_).out_b]; }

Eigen::Map<const Eigen::MatrixXd> ScorerParams::encoder_weight() const {
  return {values_.data() + layout_of(shape_).enc_w, shape_.embed_dim, shape_.input_dim()};
}
Eigen::Map<const Eigen::VectorXd> ScorerParams::encoder_bias() const {
  return {values_.data() + layout_of(shape_).enc_b, shape_.embed_dim};
}
Eigen::Map<const Eigen::MatrixXd> ScorerParams::hidden_weight() const {
  return {values_.data() + layout_of(shape_).hid_w, shape_.hidden_dim, 2 * shape_.embed_dim};
}
Eigen::Map<const Eigen::VectorXd> ScorerParams::hidden_bias() const {
  return {values_.data() + layout_of(shape_).hid_b, shape_.hidden_dim};
}
Eigen::Map<const Eigen::VectorXd> ScorerParams::output_weight() const {
  return {values_.data() + layout_of(shape_).out_w, shape_.hidden_dim};
}
double ScorerParams::output_bias() const { return values_[layout_of(shape_).out_b]; }

std::vector<double> encoder_input(NodeId node, int year, const NodeFeatureMatrix& features,
                                  const NeighborSample& neighbors, int neighbor_budget, int time_dim) {
  const auto k = static_cast<std::size_t>(features.dim());
  std::vector<double> x(2 * k + static_cast<std::size_t>(time_dim), 0.0);
  const auto own = features.row(node);
  std::copy(own.begin(), own.end(), x.begin());

  const auto slots = static_cast<double>(std::max<std::size_t>(
      static_cast<std::size_t>(neighbor_budget), neighbors.neighbors.size() + static_cast<std::size_t>(neighbors.pad_count)));
  double elapsed = 0.0;
  for (const auto& n : neighbors.neighbors) {
    const auto row = features.row(n.neighbor);
    for (std::size_t i = 0; i < k; ++i) x[k + i] += row[i];
    elapsed += static_cast<double>(year - n.year);
  }
  for (std::size_t i = 0; i < k; ++i) x[k + i] /= slots;
  if (!neighbors.neighbors.empty()) elapsed /= static_cast<double>(neighbors.neighbors.size());
  const auto time = sinusoidal_encoding(elapsed, time_dim);
  std::copy(time.begin(), time.end(), x.begin() + static_cast<std::ptrdiff_t>(2 * k));
  return x;
}

Eigen::VectorXd encode(const ScorerParams& params, std::span<const double> input) {
  if (static_cast<int>(input.size()) != params.shape().input_dim()) {
    throw DataError("encoder input has length " + std::to_string(input.size()) + ", expected " +
                    std::to_string(params.shape().input_dim()));
  }
  const Eigen::Map<const Eigen::VectorXd> x(input.data(), static_cast<Eigen::Index>(input.size()));
  return params.encoder_weight() * x + params.encoder_bias();
}

Eigen::VectorXd encode_node(const ScorerParams& params, NodeId node, int year, const NodeFeatureMatrix& features,
                            const NeighborSample& neighbors, int neighbor_budget) {
  if (features.dim() != params.shape().feature_dim) throw DataError("feature dimension does not match the scorer");
  return encode(params, encoder_input(node, year, features, neighbors, neighbor_budget, params.shape().time_dim));
}

double score_pair(const ScorerParams& params, std::span<const double> z_u, std::span<const double> z_v) {
  const auto e = static_cast<std::size_t>(params.shape().embed_dim);
  if (z_u.size() != e || z_v.size() != e) throw DataError("node embedding has the wrong length");
  Eigen::VectorXd c(2 * static_cast<Eigen::Index>(e));
  c << Eigen::Map<const Eigen::VectorXd>(z_u.data(), static_cast<Eigen::Index>(e)),
      Eigen::Map<const Eigen::VectorXd>(z_v.data(), static_cast<Eigen::Index>(e));
  Eigen::VectorXd h = params.hidden_weight() * c + params.hidden_bias();
  if (params.shape().relu) h = h.cwiseMax(0.0);
  const double s = params.output_weight().dot(h) + params.output_bias();
  if (!std::isfinite(s)) throw NumericError("non-finite logit in score_pair");
  return sigmoid(s);
}

double loss_and_gradient(const ScorerParams& params, std::span<const TrainingExample> batch, ScorerParams* grad,
                         double dropout, Rng* dropout_rng) {
  if (batch.empty()) throw UsageError("empty training batch");
  const auto& shape = params.shape();
  if (grad) {
    if (grad->size() != params.size()) *grad = ScorerParams(shape);
    std::fill(grad->values().begin(), grad->values().end(), 0.0);
  }
  const auto we = params.encoder_weight();
  const auto be = params.encoder_bias();
  const auto w1 = params.hidden_weight();
  const auto b1 = params.hidden_bias();
  const auto w2 = params.output_weight();
  const double b2 = params.output_bias();
  const auto e = shape.embed_dim;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const double keep_scale = dropout > 0.0 ? 1.0 / (1.0 - dropout) : 1.0;

  double loss = 0.0;
  Eigen::VectorXd c(2 * e);
  Eigen::VectorXd mask(shape.hidden_dim);
  for (const auto& ex : batch) {
    if (static_cast<int>(ex.source_input.size()) != shape.input_dim() ||
        static_cast<int>(ex.destination_input.size()) != shape.input_dim()) {
      throw DataError("training example has the wrong input length");
    }
    const Eigen::Map<const Eigen::VectorXd> xu(ex.source_input.data(), shape.input_dim());
    const Eigen::Map<const Eigen::VectorXd> xv(ex.destination_input.data(), shape.input_dim());
    c.head(e) = we * xu + be;
    c.tail(e) = we * xv + be;
    const Eigen::VectorXd a = w1 * c + b1;
    Eigen::VectorXd h = shape.relu ? Eigen::VectorXd(a.cwiseMax(0.0)) : a;
    mask.setOnes();
    if (dropout_rng && dropout > 0.0) {
      for (Eigen::Index i = 0; i < mask.size(); ++i) mask[i] = dropout_rng->uniform01() < dropout ? 0.0 : keep_scale;
      h = h.cwiseProduct(mask);
    }
    const double s = w2.dot(h) + b2;
    const double y = static_cast<double>(ex.label);
    loss += softplus(s) - y * s;
    if (!grad) continue;

    const double ds = (sigmoid(s) - y) * inv_n;
    grad->output_weight() += ds * h;
    grad->output_bias() += ds;
    Eigen::VectorXd da = ds * w2.cwiseProduct(mask);
    if (shape.relu) {
      for (Eigen::Index i = 0; i < da.size(); ++i) {
        if (a[i] <= 0.0) da[i] = 0.0;
      }
    }
    grad->hidden_weight().noalias() += da * c.transpose();
    grad->hidden_bias() += da;
    const Eigen::VectorXd dc = w1.transpose() * da;
    grad->encoder_weight().noalias() += dc.head(e) * xu.transpose() + dc.tail(e) * xv.transpose();
    grad->encoder_bias() += dc.head(e) + dc.tail(e);
  }
  loss *= inv_n;
  if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
  return loss;
}

GradientCheckResult gradient_check(const ScorerParams& params, std::span<const TrainingExample> batch,
                                   std::size_t coordinates, std::uint64_t seed, double step, double floor) {
  if (batch.empty()) throw UsageError("gradient check needs a non-empty minibatch");
  ScorerParams grad(params.shape());
  loss_and_gradient(params, batch, &grad);

  std::vector<std::size_t> idx(params.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  const auto count = std::min(coordinates, idx.size());
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);

  GradientCheckResult result;
  ScorerParams probe = params;
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = idx[i];
    const double original = probe.values()[j];
    probe.values()[j] = original + step;
    const double up = loss_and_gradient(probe, batch, nullptr);
    probe.values()[j] = original - step;
    const double down = loss_and_gradient(probe, batch, nullptr);
    probe.values()[j] = original;
    const double numeric = (up - down) / (2.0 * step);
    const double analytic = grad.values()[j];
    const double diff = std::abs(numeric - analytic);
    ++result.coordinates;
    if (diff <= floor) {
      ++result.below_floor;
      continue;
    }
    result.max_relative_error =
        std::max(result.max_relative_error, diff / std::max(std::abs(numeric), std::abs(analytic)));
  }
  return result;
}

NeuralScorer::NeuralScorer(ScorerParams params, const NodeFeatureMatrix& features, SamplerConfig sampler)
    : params_(std::move(params)), features_(features), sampler_(sampler), history_(features.rows()) {
  sampler_.validate();
  if (features.dim() != params_.shape().feature_dim) throw DataError("feature dimension does not match the scorer");
  if (!params_.finite()) throw NumericError("scorer parameters are not finite");
}

std::vector<double> NeuralScorer::score(std::span<const PairQuery> queries, int year, std::uint64_t stream) {
  Rng rng(stream);
  std::unordered_map<NodeId, Eigen::VectorXd> cache;
  auto embed = [&](NodeId node) -> const Eigen::VectorXd& {
    auto it = cache.find(node);
    if (it != cache.end()) return it->second;
    const auto sample = sample_neighbors(history_.before(node, year), year, sampler_, rng);
    return cache.emplace(node, encode_node(params_, node, year, features_, sample, sampler_.neighbor_budget))
        .first->second;
  };
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    const Eigen::VectorXd zu = embed(q.u);
    const Eigen::VectorXd& zv = embed(q.v);
    out.push_back(score_pair(params_, std::span<const double>(zu.data(), static_cast<std::size_t>(zu.size())),
                             std::span<const double>(zv.data(), static_cast<std::size_t>(zv.size()))));
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("dropout must lie in [0, 1)");
  if (max_epochs < 1) throw UsageError("max_epochs must be >= 1");
  if (patience < 0) throw UsageError("patience must be >= 0");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
}

namespace {

class Adam {
 public:
  explicit Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  double lr_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

}  // namespace

TrainResult train(const TemporalGraph& graph, const SplitManifest& manifest, const NodeFeatureMatrix& features,
                  const ScorerShape& shape, const TrainConfig& config, const SamplerConfig& sampler) {
  config.validate();
  sampler.validate();
  const auto streams = split(graph, manifest);
  if (streams.train.empty() || streams.val.empty()) throw UsageError("training needs non-empty train and val streams");
  if (features.rows() != graph.num_vertices()) throw DataError("feature rows do not match the vertex set");

  SamplerConfig negatives = sampler;
  negatives.regime = NegativeRegime::kRandom;
  negatives.negatives_per_positive = 1;
  const NegativePools random_pool(graph.num_vertices(), {}, {});
  const NegativePools val_pools(graph.num_vertices(), streams.train, streams.val);

  TrainResult result;
  ScorerParams params = ScorerParams::initialize(shape, config.seed);
  ScorerParams grad(shape);
  Adam adam(params.size(), config.learning_rate);
  double best_ap = -1.0;
  int stale = 0;
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  InteractionHistory history(graph.num_vertices());

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto epoch_seed = derive_seed(config.seed, static_cast<std::uint64_t>(epoch));
    history.clear();
    history.observe(graph.events_in(YearRange{graph.horizon().first, manifest.train.first - 1}));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (int year = manifest.train.first; year <= manifest.train.last; ++year) {
      const auto positives = graph.events_in(year);
      for (std::size_t start = 0; start < positives.size(); start += batch_size) {
        const auto chunk = positives.subspan(start, std::min(batch_size, positives.size() - start));
        Rng rng = stream_rng(epoch_seed, batches);
        auto input = [&](NodeId node) {
          const auto sample = sample_neighbors(history.before(node, year), year, sampler, rng);
          return encoder_input(node, year, features, sample, sampler.neighbor_budget, shape.time_dim);
        };
        std::vector<TrainingExample> examples;
        examples.reserve(2 * chunk.size());
        for (const auto& e : chunk) {
          auto source = input(e.u);
          const auto neg = sample_negatives(e.u, e.v, year, random_pool, negatives, rng).front();
          examples.push_back({source, input(e.v), 1});
          examples.push_back({std::move(source), input(neg.v), 0});
        }
        double loss = 0.0;
        try {
          loss = loss_and_gradient(params, examples, &grad, config.dropout, &rng);
        } catch (const NumericError&) {
          throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", year " +
                             std::to_string(year) + ", batch " + std::to_string(batches));
        }
        adam.step(params.values(), grad.values());
        if (!params.finite()) throw NumericError("training diverged: non-finite parameters at epoch " + std::to_string(epoch));
        loss_sum += loss;
        ++batches;
      }
      history.observe(positives);
    }

    NeuralScorer scorer(params, features, sampler);
    EvalConfig eval;
    eval.sampler = negatives;
    eval.sampler.seed = config.seed;
    eval.batch_size = config.batch_size;
    const auto report = evaluate(scorer, graph, manifest.val, val_pools, eval);
    result.log.push_back({epoch, batches ? loss_sum / static_cast<double>(batches) : 0.0, report.mean_ap,
                          report.mean_auc});
    if (report.mean_ap > best_ap) {
      best_ap = report.mean_ap;
      result.best = params;
      result.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
    }
    if (stale >= config.patience) break;
  }
  return result;
}

void write_train_log(std::ostream& out, const std::vector<TrainLogEntry>& log) {
  out << "epoch,loss,val_ap,val_auc\n";
  char buf[64];
  auto num = [&](double x) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
  };
  for (const auto& e : log) out << e.epoch << ',' << num(e.loss) << ',' << num(e.val_ap) << ',' << num(e.val_auc) << '\n';
}

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const auto& s = ck.params.shape();
  nlohmann::json j;
  j["format"] = "fosbench-scorer";
  j["version"] = 1;
  j["shape"] = {{"feature_dim", s.feature_dim}, {"time_dim", s.time_dim}, {"embed_dim", s.embed_dim},
                {"hidden_dim", s.hidden_dim}, {"relu", s.relu}};
  j["train"] = {{"learning_rate", ck.train.learning_rate}, {"dropout", ck.train.dropout},
                {"max_epochs", ck.train.max_epochs},       {"patience", ck.train.patience},
                {"batch_size", ck.train.batch_size},       {"seed", ck.train.seed}};
  j["sampler"] = {{"neighbors", neighbor_strategy_name(ck.sampler.neighbor_strategy)},
                  {"S", ck.sampler.neighbor_budget},
                  {"alpha", ck.sampler.alpha},
                  {"seed", ck.sampler.seed}};
  j["best_epoch"] = ck.best_epoch;
  j["params"] = std::vector<double>(ck.params.values().begin(), ck.params.values().end());
  out << j.dump() << '\n';
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "fosbench-scorer") {
    throw DataError(source + ": not a scorer checkpoint");
  }
  if (j.value("version", 0) != 1) throw DataError(source + ": unsupported checkpoint version");
  Checkpoint ck;
  try {
    ScorerShape shape;
    const auto& s = j.at("shape");
    shape.feature_dim = s.at("feature_dim").get<int>();
    shape.time_dim = s.at("time_dim").get<int>();
    shape.embed_dim = s.at("embed_dim").get<int>();
    shape.hidden_dim = s.at("hidden_dim").get<int>();
    shape.relu = s.at("relu").get<bool>();
    ck.params = ScorerParams(shape);
    const auto values = j.at("params").get<std::vector<double>>();
    if (values.size() != ck.params.size()) throw DataError(source + ": parameter count does not match shape");
    std::copy(values.begin(), values.end(), ck.params.values().begin());
    const auto& t = j.at("train");
    ck.train.learning_rate = t.at("learning_rate").get<double>();
    ck.train.dropout = t.at("dropout").get<double>();
    ck.train.max_epochs = t.at("max_epochs").get<int>();
    ck.train.patience = t.at("patience").get<int>();
    ck.train.batch_size = t.at("batch_size").get<int>();
    ck.train.seed = t.at("seed").get<std::uint64_t>();
    const auto& sm = j.at("sampler");
    ck.sampler.neighbor_strategy = parse_neighbor_strategy(sm.at("neighbors").get<std::string>());
    ck.sampler.neighbor_budget = sm.at("S").get<int>();
    ck.sampler.alpha = sm.at("alpha").get<double>();
    ck.sampler.seed = sm.at("seed").get<std::uint64_t>();
    ck.best_epoch = j.at("best_epoch").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
  if (!ck.params.finite()) throw DataError(source + ": non-finite parameters");
  return ck;
}

}  // namespace fosbench
