#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace fosbench::cli {

// Defaults for every configuration key.
nlohmann::json default_config();

// Runs `fosbench <args...>` and returns the process exit code: 0 ok,
// 1 usage, 2 data error, 3 numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fosbench::cli
