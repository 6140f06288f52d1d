#include "chaos/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "chaos/error.hpp"
#include "chaos/numeric.hpp"

namespace chaos {

namespace {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

void check_key(const IndexTuple& idx, int order, int dim) {
  if (static_cast<int>(idx.size()) != order)
    throw InvalidArgument("index tuple has length " + std::to_string(idx.size()) +
                          ", expected " + std::to_string(order));
  for (int c : idx)
    if (c < 0 || c >= dim)
      throw InvalidArgument("index component " + std::to_string(c) + " outside [0, " +
                            std::to_string(dim) + ")");
}

CoefficientTensor::Entries collect(std::map<IndexTuple, KahanSum>& acc) {
  CoefficientTensor::Entries out;
  for (auto& [idx, sum] : acc) {
    const double v = sum.value();
    if (std::fabs(v) >= kDropThreshold) out.emplace_hint(out.end(), idx, v);
  }
  return out;
}

std::vector<int> free_axes(int order, std::span<const AxisPair> pairs, bool side_a) {
  std::vector<bool> used(static_cast<std::size_t>(order), false);
  for (const auto& p : pairs) {
    const int ax = side_a ? p.a_axis : p.b_axis;
    if (ax < 0 || ax >= order)
      throw InvalidArgument("contraction axis " + std::to_string(ax) + " out of range");
    if (used[static_cast<std::size_t>(ax)])
      throw InvalidArgument("duplicate contraction axis " + std::to_string(ax));
    used[static_cast<std::size_t>(ax)] = true;
  }
  std::vector<int> out;
  for (int i = 0; i < order; ++i)
    if (!used[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace

CoefficientTensor::CoefficientTensor(int order, int dim, bool symmetric)
    : order_(order), dim_(dim), symmetric_(symmetric) {
  if (order < 0) throw InvalidArgument("tensor order must be nonnegative");
  if (dim < 1) throw InvalidArgument("tensor dim must be positive");
}

CoefficientTensor CoefficientTensor::from_map(int order, int dim, Entries entries,
                                              bool symmetric) {
  CoefficientTensor t(order, dim, symmetric);
  for (auto it = entries.begin(); it != entries.end();) {
    check_key(it->first, order, dim);
    if (!std::isfinite(it->second)) throw InvalidArgument("non-finite tensor entry");
    if (it->second == 0.0)
      it = entries.erase(it);
    else
      ++it;
  }
  t.entries_ = std::move(entries);
  return t;
}

CoefficientTensor CoefficientTensor::from_entries(
    int order, int dim, const std::vector<std::pair<IndexTuple, double>>& entries,
    bool symmetric) {
  Entries map;
  for (const auto& [idx, v] : entries) {
    if (!map.emplace(idx, v).second) throw InvalidArgument("duplicate index in tensor entries");
  }
  return from_map(order, dim, std::move(map), symmetric);
}

CoefficientTensor CoefficientTensor::scalar(double value, int dim) {
  Entries e;
  e.emplace(IndexTuple{}, value);
  return from_map(0, dim, std::move(e), true);
}

double CoefficientTensor::at(const IndexTuple& idx) const {
  auto it = entries_.find(idx);
  return it == entries_.end() ? 0.0 : it->second;
}

double CoefficientTensor::scalar_value() const {
  if (order_ != 0) throw InvalidArgument("scalar_value() on tensor of order " + std::to_string(order_));
  return entries_.empty() ? 0.0 : entries_.begin()->second;
}

DenseTensor::DenseTensor(int order, int dim)
    : order_(order), dim_(dim), data_(ipow(dim, order), 0.0) {}

DenseTensor DenseTensor::from_sparse(const CoefficientTensor& a) {
  DenseTensor d(a.order(), a.dim());
  for (const auto& [idx, v] : a.entries()) {
    std::size_t flat = 0;
    for (int c : idx) flat = flat * static_cast<std::size_t>(a.dim()) + static_cast<std::size_t>(c);
    d.data_[flat] = v;
  }
  return d;
}

CoefficientTensor DenseTensor::to_sparse(bool symmetric) const {
  CoefficientTensor::Entries e;
  IndexTuple idx(static_cast<std::size_t>(order_), 0);
  for (std::size_t flat = 0; flat < data_.size(); ++flat) {
    if (std::fabs(data_[flat]) >= kDropThreshold) e.emplace_hint(e.end(), idx, data_[flat]);
    for (int ax = order_ - 1; ax >= 0; --ax) {
      if (++idx[static_cast<std::size_t>(ax)] < dim_) break;
      idx[static_cast<std::size_t>(ax)] = 0;
    }
  }
  return CoefficientTensor::from_map(order_, dim_, std::move(e), symmetric);
}

bool is_symmetric(const CoefficientTensor& a, double tol) {
  for (const auto& [idx, v] : a.entries()) {
    IndexTuple p = idx;
    std::sort(p.begin(), p.end());
    do {
      if (std::fabs(a.at(p) - v) > tol * std::max(1.0, std::fabs(v))) return false;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return true;
}

CoefficientTensor symmetrize(const CoefficientTensor& a) {
  if (a.symmetric() || is_symmetric(a)) return CoefficientTensor::from_map(a.order(), a.dim(), a.entries(), true);
  const int k = a.order();
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::map<IndexTuple, KahanSum> acc;
  IndexTuple out(static_cast<std::size_t>(k));
  for (const auto& [idx, v] : a.entries()) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (int t = 0; t < k; ++t) out[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])];
      acc[out].add(v);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  const double inv = 1.0 / static_cast<double>(factorial_u64(k));
  CoefficientTensor::Entries e;
  for (auto& [idx, s] : acc) {
    const double v = s.value() * inv;
    if (std::fabs(v) >= kDropThreshold) e.emplace_hint(e.end(), idx, v);
  }
  return CoefficientTensor::from_map(k, a.dim(), std::move(e), true);
}

double frobenius_norm(const CoefficientTensor& a) {
  KahanSum s;
  for (const auto& [idx, v] : a.entries()) s.add(v * v);
  return std::sqrt(s.value());
}

CoefficientTensor scale(const CoefficientTensor& a, double c) {
  CoefficientTensor::Entries e;
  if (c != 0.0) {
    for (const auto& [idx, v] : a.entries()) {
      const double w = v * c;
      if (std::fabs(w) >= kDropThreshold) e.emplace_hint(e.end(), idx, w);
    }
  }
  return CoefficientTensor::from_map(a.order(), a.dim(), std::move(e), a.symmetric());
}

CoefficientTensor group_contract(const CoefficientTensor& a, const CoefficientTensor& b,
                                 std::span<const AxisPair> pairs) {
  if (a.dim() != b.dim()) throw InvalidArgument("group_contract: dim mismatch");
  const auto a_free = free_axes(a.order(), pairs, true);
  const auto b_free = free_axes(b.order(), pairs, false);

  // Bucket b by its components on the paired axes (in pair order).
  std::map<IndexTuple, std::vector<std::pair<IndexTuple, double>>> buckets;
  for (const auto& [idx, v] : b.entries()) {
    IndexTuple key;
    key.reserve(pairs.size());
    for (const auto& p : pairs) key.push_back(idx[static_cast<std::size_t>(p.b_axis)]);
    IndexTuple rest;
    rest.reserve(b_free.size());
    for (int ax : b_free) rest.push_back(idx[static_cast<std::size_t>(ax)]);
    buckets[key].emplace_back(std::move(rest), v);
  }

  std::map<IndexTuple, KahanSum> acc;
  IndexTuple key(pairs.size());
  IndexTuple out;
  for (const auto& [idx, va] : a.entries()) {
    for (std::size_t t = 0; t < pairs.size(); ++t) key[t] = idx[static_cast<std::size_t>(pairs[t].a_axis)];
    auto it = buckets.find(key);
    if (it == buckets.end()) continue;
    for (const auto& [rest, vb] : it->second) {
      out.clear();
      for (int ax : a_free) out.push_back(idx[static_cast<std::size_t>(ax)]);
      out.insert(out.end(), rest.begin(), rest.end());
      acc[out].add(va * vb);
    }
  }
  const int order = static_cast<int>(a_free.size() + b_free.size());
  return CoefficientTensor::from_map(order, a.dim(), collect(acc), false);
}

CoefficientTensor outer_product(const CoefficientTensor& a, const CoefficientTensor& b) {
  return group_contract(a, b, {});
}

CoefficientTensor permute_axes(const CoefficientTensor& a, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != a.order()) throw InvalidArgument("permute_axes: bad permutation length");
  std::vector<int> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (int i = 0; i < a.order(); ++i)
    if (check[static_cast<std::size_t>(i)] != i) throw InvalidArgument("permute_axes: not a permutation");
  CoefficientTensor::Entries e;
  IndexTuple out(perm.size());
  for (const auto& [idx, v] : a.entries()) {
    for (std::size_t t = 0; t < perm.size(); ++t) out[t] = idx[static_cast<std::size_t>(perm[t])];
    e.emplace(out, v);
  }
  return CoefficientTensor::from_map(a.order(), a.dim(), std::move(e), a.symmetric());
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::span<const AxisPair> pairs) {
  if (a.dim() != b.dim()) throw InvalidArgument("contract: dim mismatch");
  const auto a_free = free_axes(a.order(), pairs, true);
  const auto b_free = free_axes(b.order(), pairs, false);
  const int n = a.dim();
  const auto nn = static_cast<std::size_t>(n);

  auto strides = [n](int order) {
    std::vector<std::size_t> s(static_cast<std::size_t>(order));
    std::size_t st = 1;
    for (int ax = order - 1; ax >= 0; --ax) {
      s[static_cast<std::size_t>(ax)] = st;
      st *= static_cast<std::size_t>(n);
    }
    return s;
  };
  const auto sa = strides(a.order());
  const auto sb = strides(b.order());

  // Offsets contributed by the contracted indices, enumerated once.
  const std::size_t ncon = ipow(n, static_cast<int>(pairs.size()));
  std::vector<std::size_t> con_a(ncon, 0), con_b(ncon, 0);
  {
    std::vector<int> c(pairs.size(), 0);
    for (std::size_t t = 0; t < ncon; ++t) {
      std::size_t oa = 0, ob = 0;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        oa += static_cast<std::size_t>(c[p]) * sa[static_cast<std::size_t>(pairs[p].a_axis)];
        ob += static_cast<std::size_t>(c[p]) * sb[static_cast<std::size_t>(pairs[p].b_axis)];
      }
      con_a[t] = oa;
      con_b[t] = ob;
      for (std::size_t p = pairs.size(); p-- > 0;) {
        if (++c[p] < n) break;
        c[p] = 0;
      }
    }
  }

  // Output axes: a_free then b_free; each maps to a stride in a or b.
  std::vector<std::size_t> out_sa, out_sb;
  for (int ax : a_free) {
    out_sa.push_back(sa[static_cast<std::size_t>(ax)]);
    out_sb.push_back(0);
  }
  for (int ax : b_free) {
    out_sa.push_back(0);
    out_sb.push_back(sb[static_cast<std::size_t>(ax)]);
  }
  const int out_order = static_cast<int>(out_sa.size());
  DenseTensor out(out_order, n);
  std::vector<int> oi(static_cast<std::size_t>(out_order), 0);
  std::size_t base_a = 0, base_b = 0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    KahanSum s;
    for (std::size_t t = 0; t < ncon; ++t) {
      const double x = da[base_a + con_a[t]];
      if (x == 0.0) continue;
      const double y = db[base_b + con_b[t]];
      if (y != 0.0) s.add(x * y);
    }
    out[flat] = s.value();
    for (int ax = out_order - 1; ax >= 0; --ax) {
      const auto u = static_cast<std::size_t>(ax);
      base_a += out_sa[u];
      base_b += out_sb[u];
      if (++oi[u] < n) break;
      base_a -= out_sa[u] * nn;
      base_b -= out_sb[u] * nn;
      oi[u] = 0;
    }
  }
  return out;
}

DenseTensor permute_axes(const DenseTensor& a, std::span<const int> perm) {
  const int k = a.order();
  if (static_cast<int>(perm.size()) != k) throw InvalidArgument("permute_axes: bad permutation length");
  const int n = a.dim();
  std::vector<std::size_t> sa(static_cast<std::size_t>(k));
  std::size_t st = 1;
  for (int ax = k - 1; ax >= 0; --ax) {
    sa[static_cast<std::size_t>(ax)] = st;
    st *= static_cast<std::size_t>(n);
  }
  std::vector<std::size_t> src_stride(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) src_stride[static_cast<std::size_t>(t)] = sa[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])];
  DenseTensor out(k, n);
  std::vector<int> oi(static_cast<std::size_t>(k), 0);
  std::size_t src = 0;
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = a[src];
    for (int ax = k - 1; ax >= 0; --ax) {
      const auto u = static_cast<std::size_t>(ax);
      src += src_stride[u];
      if (++oi[u] < n) break;
      src -= src_stride[u] * static_cast<std::size_t>(n);
      oi[u] = 0;
    }
  }
  return out;
}

double max_abs_difference(const CoefficientTensor& a, const CoefficientTensor& b) {
  double m = 0.0;
  for (const auto& [idx, v] : a.entries()) m = std::max(m, std::fabs(v - b.at(idx)));
  for (const auto& [idx, v] : b.entries()) m = std::max(m, std::fabs(v - a.at(idx)));
  return m;
}

}  // namespace chaos
