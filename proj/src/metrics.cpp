#include "fosbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fosbench/error.hpp"

namespace fosbench {

namespace {
std::vector<ScoredLabel> sorted_copy(std::span<const ScoredLabel> batch) {
  std::vector<ScoredLabel> s(batch.begin(), batch.end());
  for (const auto& x : s) {
    if (std::isnan(x.score)) throw NumericError("NaN score in metric input");
    if (x.label != 0 && x.label != 1) throw UsageError("labels must be 0 or 1");
  }
  std::sort(s.begin(), s.end(), [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
  return s;
}
}  // namespace

double average_precision(std::span<const ScoredLabel> batch) {
  const auto s = sorted_copy(batch);
  std::size_t positives = 0;
  for (const auto& x : s) positives += static_cast<std::size_t>(x.label);
  if (positives == 0) throw UsageError("average precision undefined without positive labels");

  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j].score == s[i].score) {
      tp += static_cast<std::size_t>(s[j].label);
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(j);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double auc_roc(std::span<const ScoredLabel> batch) {
  auto s = sorted_copy(batch);
  std::reverse(s.begin(), s.end());
  std::size_t pos = 0;
  for (const auto& x : s) pos += static_cast<std::size_t>(x.label);
  const std::size_t neg = s.size() - pos;
  if (pos == 0 || neg == 0) throw UsageError("AUC-ROC needs both positive and negative labels");

  // Mann-Whitney: count negatives strictly below each positive, plus half of
  // the negatives tied with it.
  double wins = 0.0;
  std::size_t negatives_below = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    std::size_t group_pos = 0;
    while (j < s.size() && s[j].score == s[i].score) {
      group_pos += static_cast<std::size_t>(s[j].label);
      ++j;
    }
    const std::size_t group_neg = (j - i) - group_pos;
    wins += static_cast<double>(group_pos) *
            (static_cast<double>(negatives_below) + 0.5 * static_cast<double>(group_neg));
    negatives_below += group_neg;
    i = j;
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace fosbench
