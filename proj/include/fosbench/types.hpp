#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

namespace fosbench {

using NodeId = std::uint32_t;

// First-observation time of a pair that never co-occurs.
inline constexpr int kNeverObserved = std::numeric_limits<int>::max();

// Inclusive range of years.
struct YearRange {
  int first = 0;
  int last = -1;

  bool empty() const { return last < first; }
  bool contains(int year) const { return year >= first && year <= last; }
  bool contains(const YearRange& other) const {
    return other.empty() || (contains(other.first) && contains(other.last));
  }
  int size() const { return empty() ? 0 : last - first + 1; }
  bool operator==(const YearRange&) const = default;

  // Parses "2002:2017" or a single year "2010".
  static YearRange parse(std::string_view text);
  std::string to_string() const;
};

// Unordered pair packed into one key, smaller id in the high half.
inline std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}
inline NodeId pair_first(std::uint64_t key) { return static_cast<NodeId>(key >> 32); }
inline NodeId pair_second(std::uint64_t key) { return static_cast<NodeId>(key & 0xffffffffu); }

// "inf" for kNeverObserved, the decimal year otherwise.
std::string format_observation(int year);

}  // namespace fosbench
