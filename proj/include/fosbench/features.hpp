#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fosbench/corpus.hpp"

namespace fosbench {

// Text (or field id) keyed dense vectors of one fixed dimension, kept in
// insertion order so writes are reproducible.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 0);

  int dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }

  // Rejects duplicate keys, wrong lengths and non-finite entries.
  void insert(std::string key, std::vector<double> vector);
  bool contains(const std::string& key) const { return rows_.count(key) != 0; }
  const std::vector<double>* find(const std::string& key) const;
  // Throws DataError naming the missing key.
  const std::vector<double>& at(const std::string& key) const;

 private:
  int dim_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::vector<double>> rows_;
};

// Format: optional leading "# ..." metadata lines, a `dim=<d>` header, then
// one `key<TAB>x1 x2 ... xd` record per line. Doubles are written in
// shortest round-trip form.
EmbeddingTable read_embedding_table(std::istream& in, const std::string& source = "<embeddings>");
void write_embedding_table(std::ostream& out, const EmbeddingTable& table);

// Sinusoidal encoding of a real position: entry 2j = sin(pos / 10000^(2j/d)),
// entry 2j+1 = cos(same). d must be even and >= 2.
std::vector<double> sinusoidal_encoding(double position, int d);
// Hierarchy-level feature f1.
std::vector<double> level_encoding(int level, int d);

// Mean of the keys' vectors, or the zero vector when `keys` is empty.
std::vector<double> mean_aggregate(std::span<const std::string> keys, const EmbeddingTable& table);

enum class FeatureTerm { kLevel = 0, kName = 1, kDescription = 2, kAncestors = 3, kRelated = 4 };

// Which of the five terms enter the node vector.
struct FeatureMask {
  std::array<bool, 5> enabled{true, true, true, true, true};

  bool has(FeatureTerm t) const { return enabled[static_cast<int>(t)]; }
  FeatureMask without(FeatureTerm t) const;
  // "full", or "w/o desc", "w/o level+name" ...
  std::string label() const;
  // Comma-separated ablation list drawn from level,name,desc,ancestor,related.
  static FeatureMask from_ablation(const std::string& list);
};

const char* term_name(FeatureTerm t);

// The five per-node terms in FeatureTerm order. Ancestor labels are the
// display names of the full ancestor closure; a missing description gives
// the zero vector.
std::array<std::vector<double>, 5> feature_terms(const ConceptRecord& record, const ConceptCatalog& catalog,
                                                 const EmbeddingTable& table);

// e_v for each of `node_ids` (all catalog records when empty), keyed by
// field id.
EmbeddingTable compose(const ConceptCatalog& catalog, const EmbeddingTable& table, const FeatureMask& mask = {},
                       std::span<const std::string> node_ids = {});

struct PcaBasis {
  int dim = 0;
  std::vector<double> mean;
  // Unit-norm principal directions, largest variance first.
  std::vector<std::vector<double>> components;
  // Sample variance (n - 1 denominator) along each component.
  std::vector<double> explained_variance;

  int k() const { return static_cast<int>(components.size()); }
};

// Top-k principal directions of the mean-centered rows. Each component's
// largest-magnitude entry is made positive (first index wins ties).
PcaBasis pca_fit(const std::vector<std::vector<double>>& rows, int k);
PcaBasis pca_fit(const EmbeddingTable& table, int k);

std::vector<double> pca_transform(std::span<const double> x, const PcaBasis& basis);
std::vector<double> pca_inverse(std::span<const double> y, const PcaBasis& basis);
// Mean squared norm of x - inverse(transform(x)) over the rows.
double reconstruction_error(const std::vector<std::vector<double>>& rows, const PcaBasis& basis);

EmbeddingTable pca_reduce(const EmbeddingTable& table, const PcaBasis& basis);

void write_pca_basis(std::ostream& out, const PcaBasis& basis);
PcaBasis read_pca_basis(std::istream& in, const std::string& source = "<basis>");

}  // namespace fosbench
