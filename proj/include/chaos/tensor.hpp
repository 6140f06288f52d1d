#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace chaos {

/// Multi-index into a tensor. Components are 0-based in the C++ API; the
/// JSON format uses 1-based indices.
using IndexTuple = std::vector<int>;

/// Sparse real tensor a(n_1, ..., n_k) of fixed order over a single shared
/// index range [0, dim). Entries are kept in a sorted map and exact zeros are
/// never stored. Instances are immutable once built.
class CoefficientTensor {
 public:
  using Entries = std::map<IndexTuple, double>;

  /// Empty (all-zero) tensor.
  CoefficientTensor(int order, int dim, bool symmetric = false);

  /// Validates every key (length == order, components in range) and drops
  /// zero values. Does not check the symmetric flag; see is_symmetric().
  static CoefficientTensor from_map(int order, int dim, Entries entries, bool symmetric = false);

  /// Like from_map but rejects duplicate indices.
  static CoefficientTensor from_entries(int order, int dim,
                                        const std::vector<std::pair<IndexTuple, double>>& entries,
                                        bool symmetric = false);

  /// Order-0 tensor holding a single number.
  static CoefficientTensor scalar(double value, int dim = 1);

  int order() const { return order_; }
  int dim() const { return dim_; }
  bool symmetric() const { return symmetric_; }
  const Entries& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Value at idx, 0 when not stored.
  double at(const IndexTuple& idx) const;

  /// For order-0 tensors: the scalar value.
  double scalar_value() const;

  friend bool operator==(const CoefficientTensor&, const CoefficientTensor&) = default;

 private:
  int order_ = 0;
  int dim_ = 1;
  bool symmetric_ = false;
  Entries entries_;
};

/// Dense row-major companion used on evaluation hot paths. Axis 0 is the most
/// significant, so flat order equals lexicographic index order.
class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(int order, int dim);

  static DenseTensor from_sparse(const CoefficientTensor& a);
  CoefficientTensor to_sparse(bool symmetric = false) const;

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

 private:
  int order_ = 0;
  int dim_ = 1;
  std::vector<double> data_{0.0};
};

struct AxisPair {
  int a_axis;
  int b_axis;
};

/// Averages a over all permutations of its axes. Already-symmetric input is
/// returned unchanged (entrywise).
CoefficientTensor symmetrize(const CoefficientTensor& a);

/// Exhaustive permutation check on the stored support.
bool is_symmetric(const CoefficientTensor& a, double tol = 0.0);

double frobenius_norm(const CoefficientTensor& a);

CoefficientTensor scale(const CoefficientTensor& a, double c);

/// Sum over the paired axes of a(...) b(...). Result axes: unpaired axes of a
/// in their original order, then unpaired axes of b.
CoefficientTensor group_contract(const CoefficientTensor& a, const CoefficientTensor& b,
                                 std::span<const AxisPair> pairs);

CoefficientTensor outer_product(const CoefficientTensor& a, const CoefficientTensor& b);

/// result(i_0..i_{k-1}) = a(j) with j[perm[t]] = i_t, i.e. result axis t is a's axis perm[t].
CoefficientTensor permute_axes(const CoefficientTensor& a, std::span<const int> perm);

/// Dense counterpart of group_contract with the same axis conventions.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::span<const AxisPair> pairs);

DenseTensor permute_axes(const DenseTensor& a, std::span<const int> perm);

/// Max |a - b| over the union of supports.
double max_abs_difference(const CoefficientTensor& a, const CoefficientTensor& b);

}  // namespace chaos
