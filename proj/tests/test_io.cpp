#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "chaos/error.hpp"
#include "chaos/io.hpp"
#include "support.hpp"

using namespace chaos;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("chaos_io_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

}  // namespace

TEST_CASE("tensor JSON round trip") {
  const auto a = testing::random_tensor(3, 3, 2);
  const auto j = tensor_to_json(a);
  CHECK(j.at("order") == 3);
  CHECK(j.at("entries")[0].at("idx")[0].get<int>() >= 1);
  const auto b = tensor_from_json(json::parse(j.dump()));
  CHECK(max_abs_difference(a, b) == 0.0);
  const auto s = symmetrize(a);
  CHECK(tensor_from_json(tensor_to_json(s)).symmetric());
}

TEST_CASE("tensor JSON validation") {
  auto bad = [](const char* text) { return tensor_from_json(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"([1,2])"), ParseError);
  CHECK_THROWS_AS(bad(R"({"dim": 2, "entries": []})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"order": 1, "dim": 0, "entries": []})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"order": 1, "dim": 2, "entries": [{"idx": [3], "val": 1}]})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"order": 1, "dim": 2, "entries": [{"idx": [0], "val": 1}]})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"order": 2, "dim": 2, "entries": [{"idx": [1], "val": 1}]})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"order": 1, "dim": 2, "entries": [{"idx": [1], "val": 1}, {"idx": [1], "val": 2}]})"),
                  ParseError);
  CHECK_THROWS_AS(bad(R"({"order": 1, "dim": 2, "entries": [{"idx": [1], "val": "x"}]})"), ParseError);
  CHECK_THROWS_AS(bad(R"({"order": 2, "dim": 2, "symmetric": true, "entries": [{"idx": [1, 2], "val": 1}]})"),
                  ParseError);
  const auto ok = bad(R"({"order": 2, "dim": 2, "entries": [{"idx": [1, 2], "val": 0.5}]})");
  CHECK(ok.at({0, 1}) == 0.5);
}

TEST_CASE("file loading") {
  const auto good = write_temp("good.json", R"({"order": 1, "dim": 1, "entries": [{"idx": [1], "val": 2}]})");
  CHECK(load_tensor(good).at({0}) == 2.0);
  const auto broken = write_temp("broken.json", R"({"order": 1, "dim": )");
  try {
    load_tensor(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(load_tensor("/nonexistent/tensor.json"), Error);
  const auto prof = write_temp("profile.json", R"({"profile": {"v": [1.0, 0.5]}})");
  CHECK(load_profile(prof) == std::vector<double>{1.0, 0.5});
  const auto flat = write_temp("flat.json", R"({"v": [2]})");
  CHECK(load_profile(flat) == std::vector<double>{2.0});
  CHECK_THROWS_AS(load_profile(write_temp("empty.json", R"({"v": []})")), ParseError);
}

TEST_CASE("profile serialization") {
  const auto p = norm_profile(testing::random_tensor(2, 2, 3));
  const auto j = profile_to_json(p);
  CHECK(j.at("v").size() == 2);
  CHECK(j.at("partitions").size() == 2);
  for (const auto& e : j.at("exact")) CHECK(e.get<bool>());
  const auto path = write_temp("roundtrip.json", json{{"profile", j}}.dump());
  CHECK(load_profile(path) == p.v);
}

TEST_CASE("hashing and number formatting") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
