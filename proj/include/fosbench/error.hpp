#pragma once

#include <stdexcept>
#include <string>

namespace fosbench {

// Malformed or inconsistent input data (exit code 2 at the CLI).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration (exit code 1).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values during scoring or training (exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data error annotated with the offending file and line.
inline DataError data_error_at(const std::string& source, std::size_t line,
                               const std::string& what) {
  return DataError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace fosbench
