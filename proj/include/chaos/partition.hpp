#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaos/tensor.hpp"

namespace chaos {

/// Partition of the axis set {0, ..., k-1} into nonempty blocks. Canonical
/// form: each block sorted, blocks ordered by their smallest element.
struct SetPartition {
  std::vector<std::vector<int>> blocks;

  int size() const { return static_cast<int>(blocks.size()); }
  /// Size of the ground set.
  int ground() const;
  /// "{1,2},{3}" with 1-based elements.
  std::string to_string() const;

  friend auto operator<=>(const SetPartition&, const SetPartition&) = default;
};

/// Largest supported order for partition enumeration and norm profiles.
inline constexpr int kMaxPartitionOrder = 8;

/// All partitions of {0..k-1} in restricted-growth-string lexicographic order.
std::vector<SetPartition> enumerate_partitions(int k);

/// Number of set partitions of a k-element set.
std::uint64_t bell_number(int k);

bool is_partition_of(const SetPartition& p, int k);

/// Brings blocks into canonical order; throws if p is not a partition of {0..k-1}.
SetPartition canonical_partition(SetPartition p, int k);

/// Position of p in enumerate_partitions(p.ground()).
std::size_t partition_rank(const SetPartition& p);

struct NormOptions {
  int restarts = 32;
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 7;
  bool record_trace = false;
};

/// Value of the supremum over unit block functions for one partition.
/// For s <= 2 blocks the value is exact; for s >= 3 it is the best objective
/// found by alternating maximization and therefore a lower bound.
struct PartitionNorm {
  double value = 0.0;
  /// One unit vector per block, flattened lexicographically in the block's axes.
  std::vector<std::vector<double>> certificate;
  bool converged = true;
  bool exact = true;
  /// Alternating maximization never decreased its objective in any restart.
  bool monotone = true;
  /// Objective after each sweep, per restart (only with record_trace).
  std::vector<std::vector<double>> traces;
};

PartitionNorm partition_norm(const CoefficientTensor& a, const SetPartition& p,
                             const NormOptions& opts = {});

/// Same as above with an explicit RNG stream rank (used by norm_profile).
PartitionNorm partition_norm(const CoefficientTensor& a, const SetPartition& p,
                             const NormOptions& opts, std::uint64_t rank);

struct SpectralNorm {
  double sigma = 0.0;
  std::vector<double> left;   // unit vector in R^rows
  std::vector<double> right;  // unit vector in R^cols
  bool converged = true;
};

/// Largest singular value of a row-major rows x cols matrix by power iteration
/// on the smaller Gram matrix (accelerated by repeated squaring).
SpectralNorm spectral_norm(const std::vector<double>& matrix, int rows, int cols,
                           double tol = 1e-14, int max_iter = 2000);

/// Per-partition values and the per-s maxima v[s-1].
struct NormProfile {
  int order = 0;
  int dim = 1;
  struct Entry {
    SetPartition partition;
    PartitionNorm norm;
  };
  std::vector<Entry> per_partition;
  std::vector<double> v;        // v[s-1] = max over s-block partitions
  std::vector<bool> exact;      // exact[s-1]: true for s <= 2
  std::vector<std::size_t> argmax;  // index into per_partition, canonical tie-break

  double v_s(int s) const { return v.at(static_cast<std::size_t>(s - 1)); }
};

NormProfile norm_profile(const CoefficientTensor& a, const NormOptions& opts = {});

/// Upper bound for a partition norm obtained from the exact value of every
/// two-block coarsening (refining a partition cannot increase the norm).
double partition_norm_upper_bound(const CoefficientTensor& a, const SetPartition& p);

}  // namespace chaos
