#pragma once

#include <span>
#include <vector>

namespace fosbench {

struct ScoredLabel {
  double score = 0.0;
  int label = 0;  // 1 positive, 0 negative
};

// Threshold-sum average precision: sum over distinct score thresholds
// (descending) of (R_n - R_{n-1}) * P_n. Tied scores share one threshold.
// Throws UsageError when there is no positive label.
double average_precision(std::span<const ScoredLabel> batch);

// Probability a random positive outscores a random negative, ties counting
// one half. Throws UsageError for single-class input.
double auc_roc(std::span<const ScoredLabel> batch);

}  // namespace fosbench
