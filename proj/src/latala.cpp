#include "chaos/latala.hpp"

#include <algorithm>
#include <cmath>

#include "chaos/error.hpp"
#include "chaos/numeric.hpp"
#include "chaos/parallel.hpp"
#include "chaos/rng.hpp"

namespace chaos {

namespace {

void require_order3(const CoefficientTensor& a) {
  if (a.order() != 3) throw InvalidArgument("expected an order-3 tensor, got order " + std::to_string(a.order()));
}

}  // namespace

bool TrilinearHypotheses::all_ok() const {
  return v1_ok && three_block_ok && std::all_of(two_block_ok.begin(), two_block_ok.end(), [](bool b) { return b; });
}

TrilinearHypotheses check_hypotheses(const CoefficientTensor& a, int M, double R, const NormOptions& opts) {
  require_order3(a);
  if (M < 1) throw InvalidArgument("M must be >= 1");
  TrilinearHypotheses h;
  h.R = R > 0.0 ? R : 1.0 / std::sqrt(static_cast<double>(M));
  constexpr double slack = 1.0 + 1e-12;
  h.v1 = frobenius_norm(a);
  h.v1_ok = h.v1 <= slack;
  for (const auto& p : enumerate_partitions(3)) {
    if (p.size() == 2) {
      const double v = partition_norm(a, p, opts).value;
      h.two_block.push_back(p);
      h.two_block_norms.push_back(v);
      h.two_block_ok.push_back(v <= h.R * slack);
    } else if (p.size() == 3) {
      h.three_block = partition_norm(a, p, opts).value;
      h.three_block_ok = h.three_block <= h.R * h.R * slack;
    }
  }
  return h;
}

std::vector<double> conditioned_matrix(const CoefficientTensor& a, std::span<const double> x) {
  require_order3(a);
  const int n = a.dim();
  if (static_cast<int>(x.size()) != n)
    throw InvalidArgument("conditioned_matrix: x has " + std::to_string(x.size()) + " entries, expected " +
                          std::to_string(n));
  std::vector<double> m(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (const auto& [idx, val] : a.entries())
    m[static_cast<std::size_t>(idx[1] * n + idx[2])] += val * x[static_cast<std::size_t>(idx[0])];
  return m;
}

double sup_X(const CoefficientTensor& a, std::span<const double> x) {
  KahanSum s;
  for (double v : conditioned_matrix(a, x)) s += v * v;
  return std::sqrt(s.value());
}

double sup_Y(const CoefficientTensor& a, std::span<const double> x) {
  const auto m = conditioned_matrix(a, x);
  return spectral_norm(m, a.dim(), a.dim()).sigma;
}

double expected_sup_X_squared(const CoefficientTensor& a) {
  require_order3(a);
  std::vector<KahanSum> slices(static_cast<std::size_t>(a.dim()));
  for (const auto& [idx, val] : a.entries()) slices[static_cast<std::size_t>(idx[0])] += val * val;
  KahanSum total;
  for (const auto& s : slices) total += s.value();
  return total.value();
}

double expected_Y_squared(const CoefficientTensor& a, std::span<const double> v, std::span<const double> w) {
  require_order3(a);
  const auto n = static_cast<std::size_t>(a.dim());
  if (v.size() != n || w.size() != n) throw InvalidArgument("expected_Y_squared: vector length mismatch");
  std::vector<KahanSum> per_i(n);
  for (const auto& [idx, val] : a.entries())
    per_i[static_cast<std::size_t>(idx[0])] += val * v[static_cast<std::size_t>(idx[1])] * w[static_cast<std::size_t>(idx[2])];
  KahanSum total;
  for (const auto& s : per_i) total += s.value() * s.value();
  return total.value();
}

SupYEstimate estimate_sup_Y_expectation(const CoefficientTensor& a, int M, std::size_t samples, std::uint64_t seed,
                                        int workers) {
  require_order3(a);
  if (M < 1) throw InvalidArgument("M must be >= 1");
  if (samples < 2) throw InvalidArgument("need at least two samples");
  SupYEstimate est;
  est.M = M;
  est.samples = samples;
  est.hypotheses_ok = check_hypotheses(a, M).all_ok();
  std::vector<double> ys(samples), xs_norm(samples);
  parallel_for(samples, workers, [&](std::size_t i) {
    CounterRng rng(seed, stream_id(static_cast<std::uint64_t>(M), i));
    std::vector<double> x(static_cast<std::size_t>(a.dim()));
    for (auto& v : x) v = rng.normal();
    ys[i] = sup_Y(a, x);
    xs_norm[i] = sup_X(a, x);
  });
  KahanSum sum, sq;
  for (std::size_t i = 0; i < samples; ++i) {
    sum += ys[i];
    if (ys[i] > xs_norm[i] * (1.0 + 1e-12) + 1e-300) ++est.order_violations;
  }
  const double n = static_cast<double>(samples);
  est.mean = sum.value() / n;
  for (double y : ys) sq += (y - est.mean) * (y - est.mean);
  est.ci = 1.96 * std::sqrt(sq.value() / (n - 1.0) / n);
  est.ratio_Mhalf = est.mean / std::pow(static_cast<double>(M), -0.5);
  est.ratio_Mquarter = est.mean / std::pow(static_cast<double>(M), -0.25);
  return est;
}

double hypothesis_scale(const CoefficientTensor& a, int M, const NormOptions& opts) {
  const TrilinearHypotheses h = check_hypotheses(a, M, 0.0, opts);
  double c = h.v1 > 0.0 ? 1.0 / h.v1 : 1.0;
  for (double v : h.two_block_norms)
    if (v > 0.0) c = std::min(c, h.R / v);
  if (h.three_block > 0.0) c = std::min(c, h.R * h.R / h.three_block);
  return c;
}

CoefficientTensor rank_one_instance(int n) {
  if (n < 1) throw InvalidArgument("dimension must be >= 1");
  return CoefficientTensor::from_map(3, n, {{{0, 0, 0}, 1.0}}, true);
}

CoefficientTensor random_sparse_instance(int n, double density, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
  CounterRng rng(seed, stream_id(0x5A, static_cast<std::uint64_t>(n)));
  CoefficientTensor::Entries e;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (rng.uniform() < density) e[{i, j, k}] = rng.normal();
  if (e.empty()) e[{0, 0, 0}] = 1.0;
  auto t = CoefficientTensor::from_map(3, n, std::move(e));
  return scale(t, 1.0 / frobenius_norm(t));
}

CoefficientTensor orthogonal_slices_instance(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("dimension must be >= 1");
  CoefficientTensor::Entries e;
  for (int i = 0; i < n; ++i) {
    CounterRng rng(seed, stream_id(0x0A, static_cast<std::uint64_t>(i)));
    // Gram-Schmidt on a Gaussian matrix, row by row.
    std::vector<std::vector<double>> q;
    while (static_cast<int>(q.size()) < n) {
      std::vector<double> r(static_cast<std::size_t>(n));
      for (auto& v : r) v = rng.normal();
      for (const auto& b : q) {
        double d = 0.0;
        for (int t = 0; t < n; ++t) d += r[static_cast<std::size_t>(t)] * b[static_cast<std::size_t>(t)];
        for (int t = 0; t < n; ++t) r[static_cast<std::size_t>(t)] -= d * b[static_cast<std::size_t>(t)];
      }
      double norm = 0.0;
      for (double v : r) norm += v * v;
      norm = std::sqrt(norm);
      if (norm < 1e-8) continue;
      for (auto& v : r) v /= norm;
      q.push_back(std::move(r));
    }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        e[{i, j, k}] = q[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] / n;
  }
  return CoefficientTensor::from_map(3, n, std::move(e));
}

}  // namespace chaos
