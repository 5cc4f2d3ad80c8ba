#include "fosbench/edgebank.hpp"

#include "fosbench/error.hpp"

namespace fosbench {

EdgeBankMemory::EdgeBankMemory(EdgeBankMode mode, int window_years) : mode_(mode), window_(window_years) {
  if (mode == EdgeBankMode::kTimeWindow && window_years < 1) {
    throw UsageError("EdgeBank time window must be at least one year");
  }
}

void EdgeBankMemory::update(const EdgeEvent& event) {
  auto [it, fresh] = last_seen_.try_emplace(pair_key(event.u, event.v), event.year);
  if (!fresh && event.year > it->second) it->second = event.year;
}

double EdgeBankMemory::score(NodeId u, NodeId v, int year) const {
  auto it = last_seen_.find(pair_key(u, v));
  if (it == last_seen_.end()) return 0.0;
  if (mode_ == EdgeBankMode::kInfinite) return 1.0;
  return it->second >= year - window_ ? 1.0 : 0.0;
}

std::string EdgeBankScorer::name() const {
  return memory_.mode() == EdgeBankMode::kInfinite ? "edgebank_inf"
                                                   : "edgebank_tw" + std::to_string(memory_.window_years());
}

void EdgeBankScorer::observe(std::span<const EdgeEvent> events) {
  for (const auto& e : events) memory_.update(e);
}

std::vector<double> EdgeBankScorer::score(std::span<const PairQuery> queries, int year, std::uint64_t) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(memory_.score(q.u, q.v, year));
  return out;
}

}  // namespace fosbench
