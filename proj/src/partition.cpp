#include "chaos/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chaos/error.hpp"
#include "chaos/rng.hpp"

namespace chaos {

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

// Flattened index of idx restricted to the axes of `block` (lexicographic).
std::size_t block_flat(const IndexTuple& idx, const std::vector<int>& block, int dim) {
  std::size_t f = 0;
  for (int ax : block) f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(idx[static_cast<std::size_t>(ax)]);
  return f;
}

std::vector<double> unit_vector(std::size_t n) {
  std::vector<double> e(n, 0.0);
  if (n > 0) e[0] = 1.0;
  return e;
}

// Symmetric d x d matrix product.
std::vector<double> square(const std::vector<double>& h, std::size_t d) {
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t l = 0; l < d; ++l) {
      const double x = h[i * d + l];
      if (x == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += x * h[l * d + j];
    }
  return out;
}

std::vector<double> matvec(const std::vector<double>& h, const std::vector<double>& x, std::size_t d) {
  std::vector<double> y(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += h[i * d + j] * x[j];
    y[i] = s;
  }
  return y;
}

// Dominant eigenvector of a PSD matrix g (d x d).
std::vector<double> top_eigenvector(const std::vector<double>& g, std::size_t d, double tol,
                                    int max_iter, bool& converged) {
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += g[i * d + i];
  converged = true;
  if (trace <= 0.0) return unit_vector(d);

  // Accelerate: h = (g / tr)^(2^p) normalized by trace at every step.
  std::vector<double> h(g);
  for (double& x : h) x /= trace;
  const int squarings = d <= 256 ? 6 : 0;
  for (int p = 0; p < squarings; ++p) {
    h = square(h, d);
    double tr = 0.0;
    for (std::size_t i = 0; i < d; ++i) tr += h[i * d + i];
    if (!(tr > 0.0)) break;
    for (double& x : h) x /= tr;
  }
  // Start from the heaviest column of h: it carries the dominant direction.
  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += h[i * d + j] * h[i * d + j];
    if (s > best_norm) {
      best_norm = s;
      best = j;
    }
  }
  std::vector<double> x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = h[i * d + best];
  double nx = norm2(x);
  if (!(nx > 0.0)) return unit_vector(d);
  for (double& v : x) v /= nx;

  double rq_prev = dot(x, matvec(g, x, d));
  converged = false;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> y = matvec(h, x, d);
    const double ny = norm2(y);
    if (!(ny > 0.0)) break;
    for (double& v : y) v /= ny;
    x = std::move(y);
    const double rq = dot(x, matvec(g, x, d));
    if (std::fabs(rq - rq_prev) <= tol * std::max(rq, 1e-300)) {
      converged = true;
      break;
    }
    rq_prev = rq;
  }
  return x;
}

// Block alternating maximization for one restart.
struct AlsRun {
  double value = 0.0;
  std::vector<std::vector<double>> blocks;
  bool converged = false;
  bool monotone = true;
  std::vector<double> trace;
};

struct FlatEntry {
  double value;
  std::vector<std::size_t> flat;  // per block
};

AlsRun run_als(const std::vector<FlatEntry>& entries, const std::vector<std::size_t>& dims,
               CounterRng& rng, const NormOptions& opts) {
  const std::size_t s = dims.size();
  AlsRun run;
  run.blocks.resize(s);
  for (std::size_t r = 0; r < s; ++r) {
    auto& b = run.blocks[r];
    b.resize(dims[r]);
    for (double& x : b) x = rng.normal();
    const double nb = norm2(b);
    for (double& x : b) x /= nb;
  }
  double prev = -1.0;
  std::vector<double> out;
  for (int it = 0; it < opts.max_iter; ++it) {
    double obj = 0.0;
    for (std::size_t r = 0; r < s; ++r) {
      out.assign(dims[r], 0.0);
      for (const auto& e : entries) {
        double prod = e.value;
        for (std::size_t q = 0; q < s; ++q)
          if (q != r) prod *= run.blocks[q][e.flat[q]];
        out[e.flat[r]] += prod;
      }
      const double no = norm2(out);
      obj = no;
      if (no > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) run.blocks[r][i] = out[i] / no;
      }
    }
    if (opts.record_trace) run.trace.push_back(obj);
    if (prev >= 0.0 && obj < prev - 1e-12 * std::max(1.0, prev)) run.monotone = false;
    if (prev >= 0.0 && std::fabs(obj - prev) <= opts.tol) {
      run.value = obj;
      run.converged = true;
      return run;
    }
    prev = obj;
    run.value = obj;
  }
  return run;
}

}  // namespace

int SetPartition::ground() const {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.size());
  return n;
}

std::string SetPartition::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) s += ',';
    s += '{';
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      if (j) s += ',';
      s += std::to_string(blocks[i][j] + 1);
    }
    s += '}';
  }
  return s;
}

std::vector<SetPartition> enumerate_partitions(int k) {
  if (k < 1 || k > kMaxPartitionOrder)
    throw CapExceeded("partition enumeration supports 1 <= k <= " + std::to_string(kMaxPartitionOrder) +
                      ", got " + std::to_string(k));
  std::vector<SetPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(k), 0);
  std::vector<int> maxpre(static_cast<std::size_t>(k), 0);  // max of rgs[0..i]
  for (;;) {
    SetPartition p;
    const int nblocks = maxpre[static_cast<std::size_t>(k - 1)] + 1;
    p.blocks.resize(static_cast<std::size_t>(nblocks));
    for (int i = 0; i < k; ++i) p.blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i);
    out.push_back(std::move(p));
    // Next restricted growth string in lexicographic order.
    int i = k - 1;
    while (i > 0 && rgs[static_cast<std::size_t>(i)] > maxpre[static_cast<std::size_t>(i - 1)]) --i;
    if (i == 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    maxpre[static_cast<std::size_t>(i)] = std::max(maxpre[static_cast<std::size_t>(i - 1)], rgs[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < k; ++j) {
      rgs[static_cast<std::size_t>(j)] = 0;
      maxpre[static_cast<std::size_t>(j)] = maxpre[static_cast<std::size_t>(j - 1)];
    }
  }
  return out;
}

std::uint64_t bell_number(int k) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= k; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

bool is_partition_of(const SetPartition& p, int k) {
  std::vector<int> seen(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (const auto& b : p.blocks) {
    if (b.empty()) return false;
    for (int x : b) {
      if (x < 0 || x >= k || seen[static_cast<std::size_t>(x)]) return false;
      seen[static_cast<std::size_t>(x)] = 1;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; });
}

SetPartition canonical_partition(SetPartition p, int k) {
  if (!is_partition_of(p, k)) throw InvalidArgument("not a partition of {1.." + std::to_string(k) + "}");
  for (auto& b : p.blocks) std::sort(b.begin(), b.end());
  std::sort(p.blocks.begin(), p.blocks.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return p;
}

std::size_t partition_rank(const SetPartition& p) {
  const int k = p.ground();
  const auto canon = canonical_partition(p, k);
  const auto all = enumerate_partitions(k);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] == canon) return i;
  throw InvalidArgument("partition not found");
}

SpectralNorm spectral_norm(const std::vector<double>& matrix, int rows, int cols, double tol,
                           int max_iter) {
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != matrix.size())
    throw InvalidArgument("spectral_norm: matrix size mismatch");
  const auto r = static_cast<std::size_t>(rows);
  const auto c = static_cast<std::size_t>(cols);
  SpectralNorm res;
  const bool use_rows = r <= c;
  const std::size_t d = use_rows ? r : c;
  std::vector<double> g(d * d, 0.0);
  if (use_rows) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i; j < r; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < c; ++l) s += matrix[i * c + l] * matrix[j * c + l];
        g[i * r + j] = g[j * r + i] = s;
      }
  } else {
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = i; j < c; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < r; ++l) s += matrix[l * c + i] * matrix[l * c + j];
        g[i * c + j] = g[j * c + i] = s;
      }
  }
  bool conv = true;
  std::vector<double> x = top_eigenvector(g, d, tol, max_iter, conv);
  res.converged = conv;
  // Other side: y = A^T x (or A x), sigma = |y|.
  std::vector<double> y(use_rows ? c : r, 0.0);
  if (use_rows) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t l = 0; l < c; ++l) y[l] += matrix[i * c + l] * x[i];
  } else {
    for (std::size_t l = 0; l < r; ++l)
      for (std::size_t i = 0; i < c; ++i) y[l] += matrix[l * c + i] * x[i];
  }
  res.sigma = norm2(y);
  if (res.sigma > 0.0)
    for (double& v : y) v /= res.sigma;
  else
    y = unit_vector(y.size());
  if (use_rows) {
    res.left = std::move(x);
    res.right = std::move(y);
  } else {
    res.left = std::move(y);
    res.right = std::move(x);
  }
  return res;
}

PartitionNorm partition_norm(const CoefficientTensor& a, const SetPartition& p,
                             const NormOptions& opts) {
  return partition_norm(a, p, opts, partition_rank(p));
}

PartitionNorm partition_norm(const CoefficientTensor& a, const SetPartition& p_in,
                             const NormOptions& opts, std::uint64_t rank) {
  const int k = a.order();
  const SetPartition p = canonical_partition(p_in, k);
  const int n = a.dim();
  const std::size_t s = p.blocks.size();
  std::vector<std::size_t> dims(s);
  for (std::size_t r = 0; r < s; ++r) dims[r] = ipow(n, static_cast<int>(p.blocks[r].size()));

  PartitionNorm res;
  res.exact = s <= 2;
  if (a.empty()) {
    for (std::size_t r = 0; r < s; ++r) res.certificate.push_back(unit_vector(dims[r]));
    return res;
  }

  if (s == 1) {
    res.value = frobenius_norm(a);
    std::vector<double> cert(dims[0], 0.0);
    for (const auto& [idx, v] : a.entries()) cert[block_flat(idx, p.blocks[0], n)] = v / res.value;
    res.certificate.push_back(std::move(cert));
    return res;
  }

  if (s == 2) {
    const auto rows = dims[0];
    const auto cols = dims[1];
    std::vector<double> m(rows * cols, 0.0);
    for (const auto& [idx, v] : a.entries())
      m[block_flat(idx, p.blocks[0], n) * cols + block_flat(idx, p.blocks[1], n)] += v;
    auto sn = spectral_norm(m, static_cast<int>(rows), static_cast<int>(cols), std::min(opts.tol, 1e-14),
                            std::max(opts.max_iter, 2000));
    res.value = sn.sigma;
    res.converged = sn.converged;
    res.certificate.push_back(std::move(sn.left));
    res.certificate.push_back(std::move(sn.right));
    return res;
  }

  std::vector<FlatEntry> entries;
  entries.reserve(a.nnz());
  for (const auto& [idx, v] : a.entries()) {
    FlatEntry e{v, std::vector<std::size_t>(s)};
    for (std::size_t r = 0; r < s; ++r) e.flat[r] = block_flat(idx, p.blocks[r], n);
    entries.push_back(std::move(e));
  }
  res.value = -1.0;
  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    CounterRng rng(opts.seed, stream_id(rank, static_cast<std::uint64_t>(restart), static_cast<std::uint64_t>(k)));
    AlsRun run = run_als(entries, dims, rng, opts);
    res.monotone = res.monotone && run.monotone;
    if (opts.record_trace) res.traces.push_back(run.trace);
    if (run.value > res.value) {
      res.value = run.value;
      res.certificate = std::move(run.blocks);
      res.converged = run.converged;
    }
  }
  return res;
}

NormProfile norm_profile(const CoefficientTensor& a, const NormOptions& opts) {
  const int k = a.order();
  if (k < 1 || k > kMaxPartitionOrder)
    throw CapExceeded("norm profiles support orders 1.." + std::to_string(kMaxPartitionOrder));
  NormProfile prof;
  prof.order = k;
  prof.dim = a.dim();
  prof.v.assign(static_cast<std::size_t>(k), 0.0);
  prof.exact.assign(static_cast<std::size_t>(k), false);
  prof.argmax.assign(static_cast<std::size_t>(k), 0);
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  const auto parts = enumerate_partitions(k);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto pn = partition_norm(a, parts[i], opts, i);
    const auto si = static_cast<std::size_t>(parts[i].size() - 1);
    if (!seen[si] || pn.value > prof.v[si]) {
      prof.v[si] = pn.value;
      prof.argmax[si] = i;
      seen[si] = true;
    }
    prof.exact[si] = parts[i].size() <= 2;
    prof.per_partition.push_back({parts[i], std::move(pn)});
  }
  return prof;
}

double partition_norm_upper_bound(const CoefficientTensor& a, const SetPartition& p) {
  const int k = a.order();
  const SetPartition canon = canonical_partition(p, k);
  const std::size_t s = canon.blocks.size();
  if (s <= 2) return partition_norm(a, canon, NormOptions{}, 0).value;
  double best = frobenius_norm(a);
  // Two-block coarsenings: block 0 always on side 0; enumerate the rest.
  for (std::uint64_t mask = 1; mask < (1ULL << (s - 1)); ++mask) {
    SetPartition two;
    two.blocks.resize(2);
    for (std::size_t r = 0; r < s; ++r) {
      const bool side = r > 0 && ((mask >> (r - 1)) & 1ULL);
      auto& dst = two.blocks[side ? 1 : 0];
      dst.insert(dst.end(), canon.blocks[r].begin(), canon.blocks[r].end());
    }
    best = std::min(best, partition_norm(a, canonical_partition(two, k), NormOptions{}, 0).value);
  }
  return best;
}

}  // namespace chaos
