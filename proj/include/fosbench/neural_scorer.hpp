#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fosbench/features.hpp"
#include "fosbench/sampling.hpp"
#include "fosbench/scorer.hpp"

namespace fosbench {

// Dense per-vertex feature rows aligned with a graph's vertex indices.
class NodeFeatureMatrix {
 public:
  NodeFeatureMatrix() = default;
  NodeFeatureMatrix(std::size_t rows, int dim) : dim_(dim), data_(rows * static_cast<std::size_t>(dim), 0.0) {}
  // Throws DataError when a vertex has no row in `table`.
  static NodeFeatureMatrix from_table(const EmbeddingTable& table, const std::vector<std::string>& vertices);

  int dim() const { return dim_; }
  std::size_t rows() const { return dim_ ? data_.size() / static_cast<std::size_t>(dim_) : 0; }
  std::span<const double> row(NodeId id) const;
  std::span<double> row(NodeId id);

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

struct ScorerShape {
  int feature_dim = 0;
  int time_dim = 8;
  int embed_dim = 32;
  int hidden_dim = 32;
  // false turns the head's hidden layer into an identity map.
  bool relu = true;

  int input_dim() const { return 2 * feature_dim + time_dim; }
  void validate() const;
};

// Encoder projection (embed x input), encoder bias, head layer 1
// (hidden x 2*embed), its bias, head output weights and bias, stored in one
// flat buffer so optimizers and gradient checks can walk every coordinate.
class ScorerParams {
 public:
  ScorerParams() = default;
  explicit ScorerParams(const ScorerShape& shape);

  // Xavier-uniform encoder and hidden weights; zero biases and a zero output
  // layer so an untrained scorer returns exactly 0.5.
  static ScorerParams initialize(const ScorerShape& shape, std::uint64_t seed);

  const ScorerShape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  bool finite() const;

  Eigen::Map<Eigen::MatrixXd> encoder_weight();
  Eigen::Map<Eigen::VectorXd> encoder_bias();
  Eigen::Map<Eigen::MatrixXd> hidden_weight();
  Eigen::Map<Eigen::VectorXd> hidden_bias();
  Eigen::Map<Eigen::VectorXd> output_weight();
  double& output_bias();

  Eigen::Map<const Eigen::MatrixXd> encoder_weight() const;
  Eigen::Map<const Eigen::VectorXd> encoder_bias() const;
  Eigen::Map<const Eigen::MatrixXd> hidden_weight() const;
  Eigen::Map<const Eigen::VectorXd> hidden_bias() const;
  Eigen::Map<const Eigen::VectorXd> output_weight() const;
  double output_bias() const;

 private:
  ScorerShape shape_;
  std::vector<double> values_;
};

// [own features | mean over S slots of neighbor features, pads as zero |
//  sinusoidal encoding of the mean elapsed years to the sampled neighbors].
std::vector<double> encoder_input(NodeId node, int year, const NodeFeatureMatrix& features,
                                  const NeighborSample& neighbors, int neighbor_budget, int time_dim);

Eigen::VectorXd encode(const ScorerParams& params, std::span<const double> input);

Eigen::VectorXd encode_node(const ScorerParams& params, NodeId node, int year, const NodeFeatureMatrix& features,
                            const NeighborSample& neighbors, int neighbor_budget);

// sigmoid(MLP([z_u | z_v])). Throws NumericError on non-finite
// intermediates.
double score_pair(const ScorerParams& params, std::span<const double> z_u, std::span<const double> z_v);

struct TrainingExample {
  std::vector<double> source_input;
  std::vector<double> destination_input;
  int label = 0;
};

// Mean binary cross-entropy over `batch`; writes the gradient into `grad`
// when given. Dropout is applied to the hidden layer only when `dropout_rng`
// is non-null.
double loss_and_gradient(const ScorerParams& params, std::span<const TrainingExample> batch, ScorerParams* grad,
                         double dropout = 0.0, Rng* dropout_rng = nullptr);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::size_t below_floor = 0;
};

// Central differences against the analytic gradient on `coordinates`
// randomly chosen parameters (all of them when larger than the count).
// Differences below `floor` count as exact.
GradientCheckResult gradient_check(const ScorerParams& params, std::span<const TrainingExample> batch,
                                   std::size_t coordinates, std::uint64_t seed, double step = 1e-5,
                                   double floor = 1e-8);

class NeuralScorer final : public LinkScorer {
 public:
  NeuralScorer(ScorerParams params, const NodeFeatureMatrix& features, SamplerConfig sampler);

  std::string name() const override { return "neural"; }
  void reset() override { history_.clear(); }
  void observe(std::span<const EdgeEvent> events) override { history_.observe(events); }
  std::vector<double> score(std::span<const PairQuery> queries, int year, std::uint64_t stream) override;

  const ScorerParams& params() const { return params_; }

 private:
  ScorerParams params_;
  const NodeFeatureMatrix& features_;
  SamplerConfig sampler_;
  InteractionHistory history_;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double dropout = 0.1;
  int max_epochs = 30;
  int patience = 20;
  int batch_size = 300;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainLogEntry {
  int epoch = 0;
  double loss = 0.0;
  double val_ap = 0.0;
  double val_auc = 0.0;
};

struct TrainResult {
  ScorerParams best;
  int best_epoch = 0;
  std::vector<TrainLogEntry> log;
};

// Adam on binary cross-entropy over chronological batches of the training
// years with one random negative per positive. Keeps the parameters with the
// best validation AP; stops once `patience` epochs pass without improvement.
TrainResult train(const TemporalGraph& graph, const SplitManifest& manifest, const NodeFeatureMatrix& features,
                  const ScorerShape& shape, const TrainConfig& config, const SamplerConfig& sampler);

void write_train_log(std::ostream& out, const std::vector<TrainLogEntry>& log);

struct Checkpoint {
  ScorerParams params;
  TrainConfig train;
  SamplerConfig sampler;
  int best_epoch = 0;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");

}  // namespace fosbench
