#pragma once

#include <unordered_map>

#include "fosbench/scorer.hpp"

namespace fosbench {

enum class EdgeBankMode { kInfinite, kTimeWindow };

// Memorization baseline: a pair scores 1 when it was seen before (within the
// trailing window in time-window mode) and 0 otherwise.
class EdgeBankMemory {
 public:
  explicit EdgeBankMemory(EdgeBankMode mode = EdgeBankMode::kInfinite, int window_years = 0);

  EdgeBankMode mode() const { return mode_; }
  int window_years() const { return window_; }

  void update(const EdgeEvent& event);
  void clear() { last_seen_.clear(); }
  // Time-window mode remembers pairs last seen in [year - window, year).
  double score(NodeId u, NodeId v, int year) const;
  std::size_t size() const { return last_seen_.size(); }

 private:
  EdgeBankMode mode_;
  int window_;
  std::unordered_map<std::uint64_t, int> last_seen_;
};

class EdgeBankScorer final : public LinkScorer {
 public:
  explicit EdgeBankScorer(EdgeBankMode mode = EdgeBankMode::kInfinite, int window_years = 0)
      : memory_(mode, window_years) {}

  std::string name() const override;
  void reset() override { memory_.clear(); }
  void observe(std::span<const EdgeEvent> events) override;
  std::vector<double> score(std::span<const PairQuery> queries, int year, std::uint64_t stream) override;

  const EdgeBankMemory& memory() const { return memory_; }

 private:
  EdgeBankMemory memory_;
};

}  // namespace fosbench
