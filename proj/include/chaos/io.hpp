#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "chaos/partition.hpp"
#include "chaos/tensor.hpp"

namespace chaos {

inline constexpr const char* kVersion = "0.1.0";

/// {"order": k, "dim": n, "symmetric": bool, "entries": [{"idx": [1-based...], "val": x}]}
CoefficientTensor tensor_from_json(const nlohmann::json& j);
nlohmann::json tensor_to_json(const CoefficientTensor& a);

/// Reads a tensor file; syntax errors report the byte offset.
CoefficientTensor load_tensor(const std::string& path);

/// Norm values V_1..V_k from {"v": [...]} (also accepts the output of the
/// norms command, which nests them under "profile").
std::vector<double> load_profile(const std::string& path);

nlohmann::json profile_to_json(const NormProfile& p);

std::string read_file(const std::string& path);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace chaos
