#include "fosbench/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "fosbench/error.hpp"

namespace fosbench {

EmbeddingTable::EmbeddingTable(int dim) : dim_(dim) {
  if (dim < 0) throw UsageError("negative embedding dimension");
}

void EmbeddingTable::insert(std::string key, std::vector<double> vector) {
  if (static_cast<int>(vector.size()) != dim_) {
    throw DataError("vector for '" + key + "' has length " + std::to_string(vector.size()) + ", expected " +
                    std::to_string(dim_));
  }
  if (!std::all_of(vector.begin(), vector.end(), [](double x) { return std::isfinite(x); })) {
    throw DataError("vector for '" + key + "' has non-finite entries");
  }
  if (rows_.count(key)) throw DataError("duplicate embedding key '" + key + "'");
  keys_.push_back(key);
  rows_.emplace(std::move(key), std::move(vector));
}

const std::vector<double>* EmbeddingTable::find(const std::string& key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

const std::vector<double>& EmbeddingTable::at(const std::string& key) const {
  auto it = rows_.find(key);
  if (it == rows_.end()) throw DataError("embedding table has no entry for '" + key + "'");
  return it->second;
}

EmbeddingTable read_embedding_table(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("dim=", 0) != 0) throw data_error_at(source, line_no, "expected 'dim=<d>' header");
    const char* first = line.data() + 4;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, dim);
    if (ec != std::errc() || ptr != last || dim <= 0) throw data_error_at(source, line_no, "invalid dimension");
    break;
  }
  if (dim <= 0) throw DataError(source + ": empty embedding file (no 'dim=' header)");

  EmbeddingTable table(dim);
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw data_error_at(source, line_no, "missing tab after key");
    values.clear();
    values.reserve(static_cast<std::size_t>(dim));
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0.0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        throw data_error_at(source, line_no, "invalid number");
      }
      values.push_back(x);
      p = next;
    }
    if (static_cast<int>(values.size()) != dim) {
      throw data_error_at(source, line_no,
                          "expected " + std::to_string(dim) + " values, found " + std::to_string(values.size()));
    }
    try {
      table.insert(line.substr(0, tab), values);
    } catch (const DataError& e) {
      throw data_error_at(source, line_no, e.what());
    }
  }
  return table;
}

void write_embedding_table(std::ostream& out, const EmbeddingTable& table) {
  out << "dim=" << table.dim() << '\n';
  char buf[64];
  for (const auto& key : table.keys()) {
    out << key << '\t';
    const auto& v = table.at(key);
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v[i]);
      if (i) out << ' ';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

std::vector<double> sinusoidal_encoding(double position, int d) {
  if (d < 2 || d % 2 != 0) throw UsageError("encoding dimension must be even and >= 2, got " + std::to_string(d));
  std::vector<double> out(static_cast<std::size_t>(d));
  for (int j = 0; j < d / 2; ++j) {
    const double angle = position / std::pow(10000.0, 2.0 * j / d);
    out[2 * j] = std::sin(angle);
    out[2 * j + 1] = std::cos(angle);
  }
  return out;
}

std::vector<double> level_encoding(int level, int d) {
  if (level < 0) throw UsageError("negative hierarchy level");
  return sinusoidal_encoding(static_cast<double>(level), d);
}

std::vector<double> mean_aggregate(std::span<const std::string> keys, const EmbeddingTable& table) {
  std::vector<double> out(static_cast<std::size_t>(table.dim()), 0.0);
  if (keys.empty()) return out;
  for (const auto& k : keys) {
    const auto& v = table.at(k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  const double n = static_cast<double>(keys.size());
  for (auto& x : out) x /= n;
  return out;
}

const char* term_name(FeatureTerm t) {
  switch (t) {
    case FeatureTerm::kLevel: return "level";
    case FeatureTerm::kName: return "name";
    case FeatureTerm::kDescription: return "desc";
    case FeatureTerm::kAncestors: return "ancestor";
    case FeatureTerm::kRelated: return "related";
  }
  return "?";
}

FeatureMask FeatureMask::without(FeatureTerm t) const {
  FeatureMask m = *this;
  m.enabled[static_cast<int>(t)] = false;
  return m;
}

std::string FeatureMask::label() const {
  std::string dropped;
  for (int i = 0; i < 5; ++i) {
    if (!enabled[i]) {
      if (!dropped.empty()) dropped += '+';
      dropped += term_name(static_cast<FeatureTerm>(i));
    }
  }
  return dropped.empty() ? "full" : "w/o " + dropped;
}

FeatureMask FeatureMask::from_ablation(const std::string& list) {
  FeatureMask mask;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    bool found = false;
    for (int i = 0; i < 5; ++i) {
      if (item == term_name(static_cast<FeatureTerm>(i))) {
        mask.enabled[i] = false;
        found = true;
      }
    }
    if (!found) throw UsageError("unknown feature '" + item + "' (expected level,name,desc,ancestor,related)");
  }
  return mask;
}

std::array<std::vector<double>, 5> feature_terms(const ConceptRecord& record, const ConceptCatalog& catalog,
                                                 const EmbeddingTable& table) {
  const int d = table.dim();
  std::vector<std::string> ancestor_labels;
  for (const auto& a : catalog.ancestor_closure(record.field_id)) ancestor_labels.push_back(catalog.at(a).display_name);
  return {
      level_encoding(record.level, d),
      table.at(record.display_name),
      record.description ? table.at(*record.description) : std::vector<double>(static_cast<std::size_t>(d), 0.0),
      mean_aggregate(ancestor_labels, table),
      mean_aggregate(record.related_texts, table),
  };
}

EmbeddingTable compose(const ConceptCatalog& catalog, const EmbeddingTable& table, const FeatureMask& mask,
                       std::span<const std::string> node_ids) {
  if (table.dim() < 2 || table.dim() % 2 != 0) {
    throw DataError("embedding dimension " + std::to_string(table.dim()) + " cannot host the level encoding");
  }
  std::vector<std::string> all;
  if (node_ids.empty()) {
    for (const auto& r : catalog.records()) all.push_back(r.field_id);
    node_ids = all;
  }
  EmbeddingTable out(table.dim());
  for (const auto& id : node_ids) {
    const auto terms = feature_terms(catalog.at(id), catalog, table);
    std::vector<double> sum(static_cast<std::size_t>(table.dim()), 0.0);
    for (int j = 0; j < 5; ++j) {
      if (!mask.enabled[j]) continue;
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += terms[j][i];
    }
    out.insert(id, std::move(sum));
  }
  return out;
}

PcaBasis pca_fit(const std::vector<std::vector<double>>& rows, int k) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n < 2) throw UsageError("PCA needs at least 2 rows");
  const auto d = static_cast<Eigen::Index>(rows[0].size());
  if (k < 1 || k > std::min(n, d)) {
    throw UsageError("PCA rank " + std::to_string(k) + " outside [1, min(rows, dim)]");
  }
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != d) throw DataError("PCA rows of unequal length");
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), d);
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");

  // Eigen returns ascending eigenvalues; order descending, ties by index.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  const auto& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });

  PcaBasis basis;
  basis.dim = static_cast<int>(d);
  basis.mean.assign(mean.data(), mean.data() + d);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
      if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
    }
    if (v[pivot] < 0) v = -v;
    basis.components.emplace_back(v.data(), v.data() + d);
    basis.explained_variance.push_back(std::max(0.0, values[order[static_cast<std::size_t>(c)]]));
  }
  return basis;
}

PcaBasis pca_fit(const EmbeddingTable& table, int k) {
  std::vector<std::vector<double>> rows;
  rows.reserve(table.size());
  for (const auto& key : table.keys()) rows.push_back(table.at(key));
  return pca_fit(rows, k);
}

std::vector<double> pca_transform(std::span<const double> x, const PcaBasis& basis) {
  if (static_cast<int>(x.size()) != basis.dim) {
    throw DataError("PCA input has length " + std::to_string(x.size()) + ", basis expects " +
                    std::to_string(basis.dim));
  }
  std::vector<double> y(static_cast<std::size_t>(basis.k()), 0.0);
  for (int c = 0; c < basis.k(); ++c) {
    const auto& comp = basis.components[static_cast<std::size_t>(c)];
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - basis.mean[i]) * comp[i];
    y[static_cast<std::size_t>(c)] = acc;
  }
  return y;
}

std::vector<double> pca_inverse(std::span<const double> y, const PcaBasis& basis) {
  if (static_cast<int>(y.size()) != basis.k()) throw DataError("PCA coordinates have the wrong length");
  std::vector<double> x = basis.mean;
  for (int c = 0; c < basis.k(); ++c) {
    const auto& comp = basis.components[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[static_cast<std::size_t>(c)] * comp[i];
  }
  return x;
}

double reconstruction_error(const std::vector<std::vector<double>>& rows, const PcaBasis& basis) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : rows) {
    const auto back = pca_inverse(pca_transform(r, basis), basis);
    for (std::size_t i = 0; i < r.size(); ++i) total += (r[i] - back[i]) * (r[i] - back[i]);
  }
  return total / static_cast<double>(rows.size());
}

EmbeddingTable pca_reduce(const EmbeddingTable& table, const PcaBasis& basis) {
  EmbeddingTable out(basis.k());
  for (const auto& key : table.keys()) out.insert(key, pca_transform(table.at(key), basis));
  return out;
}

void write_pca_basis(std::ostream& out, const PcaBasis& basis) {
  nlohmann::json j;
  j["dim"] = basis.dim;
  j["k"] = basis.k();
  j["mean"] = basis.mean;
  j["components"] = basis.components;
  j["explained_variance"] = basis.explained_variance;
  out << j.dump() << '\n';
}

PcaBasis read_pca_basis(std::istream& in, const std::string& source) {
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError(source + ": not a PCA basis JSON document");
  PcaBasis b;
  try {
    b.dim = j.at("dim").get<int>();
    b.mean = j.at("mean").get<std::vector<double>>();
    b.components = j.at("components").get<std::vector<std::vector<double>>>();
    b.explained_variance = j.at("explained_variance").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
  const bool consistent =
      static_cast<int>(b.mean.size()) == b.dim && b.explained_variance.size() == b.components.size() &&
      std::all_of(b.components.begin(), b.components.end(),
                  [&](const auto& c) { return static_cast<int>(c.size()) == b.dim; });
  if (!consistent) throw DataError(source + ": inconsistent basis shapes");
  return b;
}

}  // namespace fosbench
