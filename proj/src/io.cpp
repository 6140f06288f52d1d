#include "chaos/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "chaos/error.hpp"

namespace chaos {

using nlohmann::json;

namespace {

int require_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing key \"" + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

}  // namespace

CoefficientTensor tensor_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("tensor: expected a JSON object");
  const int order = require_int(j, "order", "tensor");
  const int dim = require_int(j, "dim", "tensor");
  if (order < 0) throw ParseError("tensor.order: must be >= 0");
  if (dim < 1) throw ParseError("tensor.dim: must be >= 1");
  bool symmetric = false;
  if (j.contains("symmetric")) {
    if (!j.at("symmetric").is_boolean()) throw ParseError("tensor.symmetric: expected a boolean");
    symmetric = j.at("symmetric").get<bool>();
  }
  if (!j.contains("entries") || !j.at("entries").is_array()) throw ParseError("tensor.entries: expected an array");
  CoefficientTensor::Entries entries;
  std::size_t pos = 0;
  for (const auto& e : j.at("entries")) {
    const std::string where = "tensor.entries[" + std::to_string(pos++) + "]";
    if (!e.is_object() || !e.contains("idx") || !e.contains("val"))
      throw ParseError(where + ": expected {\"idx\": [...], \"val\": number}");
    const auto& idx_json = e.at("idx");
    if (!idx_json.is_array() || static_cast<int>(idx_json.size()) != order)
      throw ParseError(where + ".idx: expected " + std::to_string(order) + " indices");
    IndexTuple idx;
    for (const auto& i : idx_json) {
      if (!i.is_number_integer()) throw ParseError(where + ".idx: indices must be integers");
      const int v = i.get<int>();
      if (v < 1 || v > dim)
        throw ParseError(where + ".idx: index " + std::to_string(v) + " outside 1.." + std::to_string(dim));
      idx.push_back(v - 1);
    }
    if (!e.at("val").is_number()) throw ParseError(where + ".val: expected a number");
    const double val = e.at("val").get<double>();
    if (!std::isfinite(val)) throw ParseError(where + ".val: must be finite");
    if (!entries.emplace(idx, val).second) throw ParseError(where + ".idx: duplicate index");
  }
  CoefficientTensor t = CoefficientTensor::from_map(order, dim, std::move(entries), symmetric);
  if (symmetric && !is_symmetric(t, 1e-12))
    throw ParseError("tensor: flagged symmetric but entries are not invariant under index permutations");
  return t;
}

json tensor_to_json(const CoefficientTensor& a) {
  json entries = json::array();
  for (const auto& [idx, val] : a.entries()) {
    json i = json::array();
    for (int x : idx) i.push_back(x + 1);
    entries.push_back({{"idx", i}, {"val", val}});
  }
  return {{"order", a.order()}, {"dim", a.dim()}, {"symmetric", a.symmetric()}, {"entries", entries}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CoefficientTensor load_tensor(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return tensor_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<double> load_profile(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (j.is_object() && j.contains("profile")) j = j.at("profile");
  if (!j.is_object() || !j.contains("v") || !j.at("v").is_array())
    throw ParseError(path + ": expected an object with a \"v\" array of norm values");
  std::vector<double> v;
  for (const auto& x : j.at("v")) {
    if (!x.is_number()) throw ParseError(path + ": \"v\" must hold numbers");
    v.push_back(x.get<double>());
  }
  if (v.empty()) throw ParseError(path + ": \"v\" is empty");
  return v;
}

json profile_to_json(const NormProfile& p) {
  json per = json::array();
  for (const auto& e : p.per_partition) {
    per.push_back({{"partition", e.partition.to_string()},
                   {"blocks", e.partition.size()},
                   {"value", e.norm.value},
                   {"exact", e.norm.exact},
                   {"converged", e.norm.converged},
                   {"certificate", e.norm.certificate}});
  }
  json argmax = json::array();
  for (auto i : p.argmax) argmax.push_back(p.per_partition[i].partition.to_string());
  return {{"order", p.order}, {"dim", p.dim}, {"v", p.v}, {"exact", p.exact}, {"argmax", argmax},
          {"partitions", per}};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace chaos
