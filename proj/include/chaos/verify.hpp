#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chaos/partition.hpp"
#include "chaos/rng.hpp"
#include "chaos/tensor.hpp"

namespace chaos {

/// Gaussian entries, each index kept with probability `density` (at least
/// one entry is always present).
CoefficientTensor random_sparse_tensor(int order, int dim, double density, CounterRng& rng);

/// Symmetrized random sparse tensor with unit Frobenius norm.
CoefficientTensor random_symmetric_tensor(int order, int dim, double density, CounterRng& rng);

/// Multiplies a by min_s R^{s-1} / V_s(a) so that V_s <= R^{s-1} for every s.
CoefficientTensor scale_to_level(const CoefficientTensor& a, double R, const NormOptions& opts = {});

struct SuiteOptions {
  int max_k = 3;
  int max_2Mk = 16;
  int max_n = 3;
  int instances = 0;  // 0 selects the suite's default
  std::uint64_t seed = 7;
  int workers = 1;
  int restarts = 32;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Largest observed ratio of the checked quantity to its limit.
  double worst = 0.0;
  std::vector<std::string> ledger;
  double seconds = 0.0;
};

/// cross-oracle, basic-estimate, main-inequality, cumulant-identity, counts, sharpness.
const std::vector<std::string>& suite_names();

SuiteResult run_suite(const std::string& name, const SuiteOptions& opts);

SuiteResult verify_cross_oracle(const SuiteOptions& opts);
SuiteResult verify_basic_estimate(const SuiteOptions& opts);
SuiteResult verify_main_inequality(const SuiteOptions& opts);
SuiteResult verify_cumulant_identity(const SuiteOptions& opts);
SuiteResult verify_counts(const SuiteOptions& opts);
SuiteResult verify_sharpness(const SuiteOptions& opts);

/// Contraction of the last q axes of f with the last q axes of g.
CoefficientTensor tail_contraction(const CoefficientTensor& f, const CoefficientTensor& g, int q);

}  // namespace chaos
