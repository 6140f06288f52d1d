#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaos/census.hpp"
#include "chaos/tensor.hpp"

namespace chaos {

/// K_c(A) for every row subset A with |A| >= 2, keyed by bitmask (bit t = row t).
struct CumulantTable {
  int rows = 0;
  std::map<std::uint32_t, double> values;

  double at(std::uint32_t mask) const;
};

struct MomentReport {
  double moment = 0.0;
  std::uint64_t diagram_count = 0;
  /// Distinct row multiplicity graphs that were evaluated.
  std::size_t graph_count = 0;
  std::optional<CumulantTable> cumulants;
  std::map<std::string, double> bounds;
  std::optional<double> oracle;
  std::optional<double> relative_gap;

  void set_oracle(double value);
};

/// Largest number of rows accepted by the cumulant routines.
inline constexpr int kMaxCumulantRows = 24;

/// E prod_j k_j! I_{k_j}(f_j): the sum of F_gamma over all closed diagrams.
/// Kernels are symmetrized first (the moment only depends on the symmetric
/// parts), then diagrams sharing a row multiplicity graph are evaluated once.
MomentReport product_moment(std::span<const CoefficientTensor> kernels);

/// Same value by streaming every closed diagram with the kernels as given.
double product_moment_direct(std::span<const CoefficientTensor> kernels);

/// E Z^degree for Z = sum a(n) :xi_n1...xi_nk:.
MomentReport power_moment(const CoefficientTensor& a, int degree);

/// Connected-diagram sums over every row subset with at least two rows.
CumulantTable cumulants(std::span<const CoefficientTensor> kernels);

/// Sum over partitions of the rows into blocks of size >= 2 of prod K_c(block).
double moment_from_cumulants(const CumulantTable& table);

/// Census for the given row lengths and kernel classes, built once per process.
std::shared_ptr<const DiagramCensus> cached_census(const std::vector<int>& row_lengths,
                                                   const std::vector<int>& row_classes);

/// Symmetrized kernels grouped by exact equality. class_of[t] indexes into
/// `kernels`, which holds one dense representative per class.
struct KernelClasses {
  std::vector<int> class_of;
  std::vector<DenseTensor> kernels;
  std::vector<int> lengths;
};
KernelClasses classify_kernels(std::span<const CoefficientTensor> kernels);

}  // namespace chaos
