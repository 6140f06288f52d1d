#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chaos/partition.hpp"
#include "chaos/tensor.hpp"

namespace chaos {

/// Norm conditions on an order-3 tensor at level R:
/// V_1 <= 1, every two-block norm <= R, the three-block norm <= R^2.
struct TrilinearHypotheses {
  double R = 1.0;
  double v1 = 0.0;
  std::vector<SetPartition> two_block;
  std::vector<double> two_block_norms;
  double three_block = 0.0;
  bool v1_ok = true;
  std::vector<bool> two_block_ok;
  bool three_block_ok = true;
  /// The three-block value is a lower bound, so a pass is not certified.
  bool three_block_heuristic = true;

  bool all_ok() const;
};

/// R defaults to M^{-1/2} when R <= 0.
TrilinearHypotheses check_hypotheses(const CoefficientTensor& a, int M, double R = 0.0,
                                     const NormOptions& opts = {});

/// A(j, k | x) = sum_i a(i, j, k) x_i as a row-major dim x dim matrix.
std::vector<double> conditioned_matrix(const CoefficientTensor& a, std::span<const double> x);

/// sup over unit u of X(u) given xi = x: the Frobenius norm of A(.,.|x).
double sup_X(const CoefficientTensor& a, std::span<const double> x);

/// sup over unit v, w of Y(v, w) given xi = x: the largest singular value of A(.,.|x).
double sup_Y(const CoefficientTensor& a, std::span<const double> x);

/// E sup_X^2 = sum_i ||a(i, ., .)||_F^2.
double expected_sup_X_squared(const CoefficientTensor& a);

/// E Y(v, w)^2 = sum_i (sum_{j,k} a(i, j, k) v_j w_k)^2 for fixed v, w.
double expected_Y_squared(const CoefficientTensor& a, std::span<const double> v, std::span<const double> w);

struct SupYEstimate {
  int M = 1;
  std::size_t samples = 0;
  double mean = 0.0;
  double ci = 0.0;  // 95% normal half-width
  double ratio_Mhalf = 0.0;
  double ratio_Mquarter = 0.0;
  /// Samples with sup_Y > sup_X (should never happen).
  std::size_t order_violations = 0;
  bool hypotheses_ok = true;
};

SupYEstimate estimate_sup_Y_expectation(const CoefficientTensor& a, int M, std::size_t samples,
                                        std::uint64_t seed, int workers = 1);

/// Largest c such that c * a satisfies the hypotheses at level M^{-1/2}.
double hypothesis_scale(const CoefficientTensor& a, int M, const NormOptions& opts = {});

/// Instance generators (unscaled). The M-sweep rescales them with hypothesis_scale.
/// e_1 (x) e_1 (x) e_1 embedded in dimension n.
CoefficientTensor rank_one_instance(int n);
/// Gaussian entries on a random support of the given density, unit Frobenius norm.
CoefficientTensor random_sparse_instance(int n, double density, std::uint64_t seed);
/// Slice a(i, ., .) = Q_i / n with independent random orthogonal Q_i.
CoefficientTensor orthogonal_slices_instance(int n, std::uint64_t seed);

}  // namespace chaos
