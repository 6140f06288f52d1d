#include "chaos/moments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>

#include "chaos/diagram.hpp"
#include "chaos/error.hpp"
#include "chaos/numeric.hpp"

namespace chaos {

double CumulantTable::at(std::uint32_t mask) const {
  auto it = values.find(mask);
  return it == values.end() ? 0.0 : it->second;
}

void MomentReport::set_oracle(double value) {
  oracle = value;
  relative_gap = std::fabs(moment - value) / std::max(1.0, std::fabs(value));
}

namespace {

void check_kernels(std::span<const CoefficientTensor> kernels) {
  int total = 0;
  for (const auto& k : kernels) {
    if (k.order() < 1) throw InvalidArgument("kernels must have order >= 1");
    if (k.dim() != kernels[0].dim()) throw InvalidArgument("kernels must share dim");
    total += k.order();
  }
  if (total > kMaxDiagramVertices)
    throw CapExceeded("total order " + std::to_string(total) + " exceeds the cap of " +
                      std::to_string(kMaxDiagramVertices));
}

struct CensusCache {
  std::mutex mutex;
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::shared_ptr<const DiagramCensus>> entries;
};

CensusCache& census_cache() {
  static CensusCache cache;
  return cache;
}

/// Relabels classes by first occurrence so equal structures share a census.
std::vector<int> relabel(std::span<const int> classes, std::vector<int>* original) {
  std::vector<int> out;
  std::map<int, int> seen;
  for (int c : classes) {
    auto [it, inserted] = seen.emplace(c, static_cast<int>(seen.size()));
    if (inserted && original) original->push_back(c);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

std::shared_ptr<const DiagramCensus> cached_census(const std::vector<int>& row_lengths,
                                                   const std::vector<int>& row_classes) {
  auto& cache = census_cache();
  auto key = std::make_pair(row_lengths, row_classes);
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.entries.find(key); it != cache.entries.end()) return it->second;
  }
  auto census = std::make_shared<const DiagramCensus>(row_lengths, row_classes);
  std::lock_guard lock(cache.mutex);
  return cache.entries.emplace(std::move(key), std::move(census)).first->second;
}

KernelClasses classify_kernels(std::span<const CoefficientTensor> kernels) {
  KernelClasses out;
  std::vector<CoefficientTensor> reps;
  for (const auto& k : kernels) {
    CoefficientTensor s = symmetrize(k);
    int id = -1;
    for (std::size_t c = 0; c < reps.size(); ++c)
      if (reps[c].order() == s.order() && reps[c].entries() == s.entries()) {
        id = static_cast<int>(c);
        break;
      }
    if (id < 0) {
      id = static_cast<int>(reps.size());
      out.kernels.push_back(DenseTensor::from_sparse(s));
      reps.push_back(std::move(s));
    }
    out.class_of.push_back(id);
    out.lengths.push_back(k.order());
  }
  return out;
}

MomentReport product_moment(std::span<const CoefficientTensor> kernels) {
  check_kernels(kernels);
  MomentReport report;
  int total = 0;
  for (const auto& k : kernels) total += k.order();
  if (total % 2 != 0) return report;
  const auto classes = classify_kernels(kernels);
  const auto census = cached_census(classes.lengths, classes.class_of);
  report.moment = census->evaluate(classes.kernels);
  report.diagram_count = census->diagram_count();
  report.graph_count = census->graph_count();
  return report;
}

double product_moment_direct(std::span<const CoefficientTensor> kernels) {
  check_kernels(kernels);
  std::vector<int> lengths;
  std::vector<DenseTensor> dense;
  for (const auto& k : kernels) {
    lengths.push_back(k.order());
    dense.push_back(DenseTensor::from_sparse(k));
  }
  KahanSum sum;
  for_each_closed_diagram(lengths, [&](const Diagram& d) {
    sum += evaluate_closed(d, dense);
    return true;
  });
  return sum.value();
}

MomentReport power_moment(const CoefficientTensor& a, int degree) {
  if (degree < 0) throw InvalidArgument("moment degree must be nonnegative");
  std::vector<CoefficientTensor> copies(static_cast<std::size_t>(degree), a);
  if (degree == 0) {
    MomentReport r;
    r.moment = 1.0;
    r.diagram_count = 1;
    return r;
  }
  return product_moment(copies);
}

CumulantTable cumulants(std::span<const CoefficientTensor> kernels) {
  check_kernels(kernels);
  const int m = static_cast<int>(kernels.size());
  if (m > kMaxCumulantRows) throw CapExceeded("too many rows for the cumulant table");
  const auto classes = classify_kernels(kernels);
  CumulantTable table;
  table.rows = m;
  std::vector<int> lengths, cls, original;
  std::vector<DenseTensor> sub_kernels;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    if (std::popcount(mask) < 2) continue;
    lengths.clear();
    cls.clear();
    int total = 0;
    for (int t = 0; t < m; ++t)
      if (mask & (1u << t)) {
        lengths.push_back(classes.lengths[static_cast<std::size_t>(t)]);
        cls.push_back(classes.class_of[static_cast<std::size_t>(t)]);
        total += classes.lengths[static_cast<std::size_t>(t)];
      }
    if (total % 2 != 0) continue;
    original.clear();
    const auto local = relabel(cls, &original);
    sub_kernels.clear();
    for (int c : original) sub_kernels.push_back(classes.kernels[static_cast<std::size_t>(c)]);
    const double value = cached_census(lengths, local)->evaluate_connected(sub_kernels);
    if (value != 0.0) table.values[mask] = value;
  }
  return table;
}

double moment_from_cumulants(const CumulantTable& table) {
  const int m = table.rows;
  if (m > kMaxCumulantRows) throw CapExceeded("too many rows for the cumulant table");
  const std::uint32_t full = m == 32 ? ~0u : (1u << m) - 1;
  // Blocks grouped by their lowest row.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> by_low(static_cast<std::size_t>(std::max(m, 1)));
  for (const auto& [mask, value] : table.values)
    by_low[static_cast<std::size_t>(std::countr_zero(mask))].emplace_back(mask, value);
  // g[S]: sum over partitions of S into blocks of size >= 2.
  std::vector<double> g(static_cast<std::size_t>(full) + 1, 0.0);
  g[0] = 1.0;
  for (std::uint32_t s = 1; s <= full; ++s) {
    KahanSum sum;
    for (const auto& [block, value] : by_low[static_cast<std::size_t>(std::countr_zero(s))]) {
      if ((block & ~s) != 0) continue;
      const double r = g[s ^ block];
      if (r != 0.0) sum += value * r;
    }
    g[s] = sum.value();
  }
  return g[full];
}

}  // namespace chaos
