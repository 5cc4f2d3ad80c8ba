#include "fosbench/types.hpp"

#include <charconv>
#include <string>

#include "fosbench/error.hpp"

namespace fosbench {

YearRange YearRange::parse(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw UsageError("invalid year range '" + std::string(text) + "'");
    }
    return value;
  };
  const auto colon = text.find(':');
  YearRange range;
  if (colon == std::string_view::npos) {
    range.first = range.last = parse_int(text);
  } else {
    range.first = parse_int(text.substr(0, colon));
    range.last = parse_int(text.substr(colon + 1));
  }
  if (range.empty()) {
    throw UsageError("year range '" + std::string(text) + "' is empty");
  }
  return range;
}

std::string YearRange::to_string() const {
  return std::to_string(first) + ":" + std::to_string(last);
}

std::string format_observation(int year) {
  return year == kNeverObserved ? std::string("inf") : std::to_string(year);
}

}  // namespace fosbench
