#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "fosbench/error.hpp"
#include "fosbench/io.hpp"

using namespace fosbench;

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hex64(0xabcull) == "0000000000000abc");
  CHECK(config_hash(nlohmann::json{{"b", 1}, {"a", 2}}) == config_hash(nlohmann::json{{"a", 2}, {"b", 1}}));
}

TEST_CASE("CSV quoting round trip") {
  const std::vector<std::string> fields{"plain", "with, comma", "with \"quote\"", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_escape(fields[i]);
  CHECK(split_csv(line) == fields);
}

TEST_CASE("nodes file validation") {
  std::istringstream ok("# meta\nfield_id,display_name,level\nC1,\"Art, visual\",0\nC2,Business,0\n");
  CHECK(read_nodes(ok) == std::vector<std::string>{"C1", "C2"});
  std::istringstream unsorted("field_id,display_name,level\nC2,b,0\nC1,a,0\n");
  CHECK_THROWS_AS(read_nodes(unsorted), DataError);
}

TEST_CASE("run manifest keeps entries of earlier commands") {
  const auto dir = std::filesystem::temp_directory_path() / "fosbench_io_test";
  std::filesystem::remove_all(dir);
  write_file(dir / "a.txt", "alpha");
  write_file(dir / "b.txt", "beta");
  update_run_manifest(dir, "one", "h1", 1, {"a.txt"});
  update_run_manifest(dir, "two", "h2", 2, {"b.txt"});
  const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(m["commands"]["one"]["files"]["a.txt"] == hex64(fnv1a64("alpha")));
  CHECK(m["commands"]["two"]["seed"] == 2);
  CHECK_THROWS_AS(read_file(dir / "missing"), DataError);
  std::filesystem::remove_all(dir);
}
