#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fosbench/temporal_graph.hpp"

namespace fosbench {

struct PairQuery {
  NodeId u = 0;
  NodeId v = 0;
};

// Extension point for link predictors. The harness feeds history one
// completed year at a time and then queries pairs for a later year.
class LinkScorer {
 public:
  virtual ~LinkScorer() = default;

  virtual std::string name() const = 0;
  // Forget all observed history.
  virtual void reset() = 0;
  // Events of one or more completed years, in chronological order.
  virtual void observe(std::span<const EdgeEvent> events) = 0;
  // Scores in [0, 1] for pairs at `year`. `stream` seeds any sampling the
  // scorer does (one stream per batch keeps parallel runs reproducible).
  virtual std::vector<double> score(std::span<const PairQuery> queries, int year, std::uint64_t stream) = 0;
};

}  // namespace fosbench
