#include "chaos/diagram.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "chaos/error.hpp"

namespace chaos {

Diagram::Diagram(std::vector<int> row_ids, std::vector<int> row_lengths, std::vector<int> partner,
                 std::vector<int> labels)
    : row_ids_(std::move(row_ids)),
      row_lengths_(std::move(row_lengths)),
      partner_(std::move(partner)),
      labels_(std::move(labels)) {
  if (row_ids_.size() != row_lengths_.size()) throw InvalidArgument("diagram: row ids/lengths size mismatch");
  if (!std::is_sorted(row_ids_.begin(), row_ids_.end()) ||
      std::adjacent_find(row_ids_.begin(), row_ids_.end()) != row_ids_.end())
    throw InvalidArgument("diagram: row ids must be strictly increasing");
  offsets_.resize(row_lengths_.size());
  int total = 0;
  for (std::size_t t = 0; t < row_lengths_.size(); ++t) {
    if (row_lengths_[t] < 0) throw InvalidArgument("diagram: negative row length");
    offsets_[t] = total;
    total += row_lengths_[t];
    for (int l = 0; l < row_lengths_[t]; ++l) row_of_.push_back(static_cast<int>(t));
  }
  if (static_cast<int>(partner_.size()) != total) throw InvalidArgument("diagram: partner array has wrong size");
  for (int v = 0; v < total; ++v) {
    const int w = partner_[static_cast<std::size_t>(v)];
    if (w == -1) continue;
    if (w < 0 || w >= total) throw InvalidArgument("diagram: partner out of range");
    if (partner_[static_cast<std::size_t>(w)] != v) throw InvalidArgument("diagram: matching is not symmetric");
    if (row_of_[static_cast<std::size_t>(w)] == row_of_[static_cast<std::size_t>(v)])
      throw InvalidArgument("diagram: edge inside a single row");
  }
  if (labels_.empty()) {
    labels_.resize(static_cast<std::size_t>(total));
    for (int v = 0; v < total; ++v) {
      const int w = partner_[static_cast<std::size_t>(v)];
      labels_[static_cast<std::size_t>(v)] = w == -1 ? v : std::min(v, w);
    }
  } else {
    if (static_cast<int>(labels_.size()) != total) throw InvalidArgument("diagram: label array has wrong size");
    std::map<int, int> uses;
    for (int v = 0; v < total; ++v) {
      const int w = partner_[static_cast<std::size_t>(v)];
      if (w != -1 && labels_[static_cast<std::size_t>(v)] != labels_[static_cast<std::size_t>(w)])
        throw InvalidArgument("diagram: matched vertices must share a label");
      ++uses[labels_[static_cast<std::size_t>(v)]];
    }
    for (int v = 0; v < total; ++v) {
      const int expect = partner_[static_cast<std::size_t>(v)] == -1 ? 1 : 2;
      if (uses[labels_[static_cast<std::size_t>(v)]] != expect)
        throw InvalidArgument("diagram: labels of distinct edges/open vertices must differ");
    }
  }
}

Diagram Diagram::closed(std::vector<int> row_lengths, std::vector<int> partner) {
  std::vector<int> ids(row_lengths.size());
  std::iota(ids.begin(), ids.end(), 0);
  Diagram d(std::move(ids), std::move(row_lengths), std::move(partner));
  if (!d.is_closed()) throw InvalidArgument("diagram: closed diagram has open vertices");
  return d;
}

Vertex Diagram::vertex(int flat_id) const {
  const int t = row_of(flat_id);
  return {t, flat_id - offsets_[static_cast<std::size_t>(t)]};
}

std::vector<Edge> Diagram::edges() const {
  std::vector<Edge> out;
  for (int v = 0; v < num_vertices(); ++v) {
    const int w = partner(v);
    if (w > v) out.push_back({vertex(v), vertex(w)});
  }
  return out;
}

int Diagram::num_open() const {
  return static_cast<int>(std::count(partner_.begin(), partner_.end(), -1));
}

std::vector<int> Diagram::open_labels() const {
  std::vector<int> out;
  for (int v = 0; v < num_vertices(); ++v)
    if (partner(v) == -1) out.push_back(label(v));
  std::sort(out.begin(), out.end());
  return out;
}

Diagram Diagram::restrict_to(std::span<const int> row_positions) const {
  std::vector<int> ids, lengths, partner, labels;
  std::vector<int> new_flat(partner_.size(), -1);
  int next = 0;
  int prev = -1;
  for (int t : row_positions) {
    if (t < 0 || t >= num_rows() || t <= prev) throw InvalidArgument("restrict_to: row positions must be ascending and valid");
    prev = t;
    ids.push_back(row_ids_[static_cast<std::size_t>(t)]);
    lengths.push_back(row_lengths_[static_cast<std::size_t>(t)]);
    for (int l = 0; l < row_lengths_[static_cast<std::size_t>(t)]; ++l)
      new_flat[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(t)] + l)] = next++;
  }
  partner.assign(static_cast<std::size_t>(next), -1);
  labels.assign(static_cast<std::size_t>(next), 0);
  for (int v = 0; v < num_vertices(); ++v) {
    const int nv = new_flat[static_cast<std::size_t>(v)];
    if (nv < 0) continue;
    const int w = partner_[static_cast<std::size_t>(v)];
    partner[static_cast<std::size_t>(nv)] = w == -1 ? -1 : new_flat[static_cast<std::size_t>(w)];
    labels[static_cast<std::size_t>(nv)] = labels_[static_cast<std::size_t>(v)];
  }
  return Diagram(std::move(ids), std::move(lengths), std::move(partner), std::move(labels));
}

Diagram Diagram::first_rows(int r) const {
  if (r < 1 || r > num_rows()) throw InvalidArgument("first_rows: r out of range");
  std::vector<int> rows(static_cast<std::size_t>(r));
  std::iota(rows.begin(), rows.end(), 0);
  return restrict_to(rows);
}

std::string Diagram::edge_string() const {
  std::string s;
  for (const auto& e : edges()) {
    if (!s.empty()) s += ';';
    s += '(' + std::to_string(row_ids_[static_cast<std::size_t>(e.a.row)] + 1) + ',' + std::to_string(e.a.pos + 1) + ")-(" +
         std::to_string(row_ids_[static_cast<std::size_t>(e.b.row)] + 1) + ',' + std::to_string(e.b.pos + 1) + ')';
  }
  return s;
}

namespace {

int checked_total(std::span<const int> row_lengths, int cap) {
  int total = 0;
  for (int k : row_lengths) {
    if (k < 0) throw InvalidArgument("row lengths must be nonnegative");
    total += k;
  }
  if (total > cap)
    throw CapExceeded("diagram profile has " + std::to_string(total) + " vertices; cap is " + std::to_string(cap));
  return total;
}

struct MatchingSearch {
  std::vector<int> row_of;
  std::vector<int> partner;
  const std::function<bool(std::span<const int>)>* visit;
  bool stopped = false;

  void run(int from) {
    const int total = static_cast<int>(partner.size());
    while (from < total && partner[static_cast<std::size_t>(from)] != -1) ++from;
    if (from == total) {
      if (!(*visit)(partner)) stopped = true;
      return;
    }
    const int rv = row_of[static_cast<std::size_t>(from)];
    for (int w = from + 1; w < total && !stopped; ++w) {
      if (partner[static_cast<std::size_t>(w)] != -1 || row_of[static_cast<std::size_t>(w)] == rv) continue;
      partner[static_cast<std::size_t>(from)] = w;
      partner[static_cast<std::size_t>(w)] = from;
      run(from + 1);
      partner[static_cast<std::size_t>(from)] = -1;
      partner[static_cast<std::size_t>(w)] = -1;
    }
  }
};

std::uint64_t count_rec(std::vector<int> counts, std::map<std::vector<int>, std::uint64_t>& memo) {
  std::sort(counts.begin(), counts.end(), std::greater<>());
  while (!counts.empty() && counts.back() == 0) counts.pop_back();
  if (counts.empty()) return 1;
  if (auto it = memo.find(counts); it != memo.end()) return it->second;
  // A fixed vertex of the largest row is matched to some vertex of another row.
  std::uint64_t total = 0;
  for (std::size_t j = 1; j < counts.size(); ++j) {
    auto next = counts;
    --next[0];
    --next[j];
    total += static_cast<std::uint64_t>(counts[j]) * count_rec(std::move(next), memo);
  }
  memo.emplace(counts, total);
  return total;
}

}  // namespace

EnumerationStatus for_each_matching(std::span<const int> row_lengths,
                                    const std::function<bool(std::span<const int>)>& visit) {
  const int total = checked_total(row_lengths, kMaxDiagramVertices);
  if (total % 2 != 0) return EnumerationStatus::odd_vertex_total;
  MatchingSearch search;
  for (std::size_t t = 0; t < row_lengths.size(); ++t)
    for (int l = 0; l < row_lengths[t]; ++l) search.row_of.push_back(static_cast<int>(t));
  search.partner.assign(static_cast<std::size_t>(total), -1);
  search.visit = &visit;
  search.run(0);
  return search.stopped ? EnumerationStatus::stopped : EnumerationStatus::ok;
}

EnumerationStatus for_each_closed_diagram(std::span<const int> row_lengths,
                                          const std::function<bool(const Diagram&)>& visit) {
  std::vector<int> lengths(row_lengths.begin(), row_lengths.end());
  return for_each_matching(row_lengths, [&](std::span<const int> partner) {
    return visit(Diagram::closed(lengths, std::vector<int>(partner.begin(), partner.end())));
  });
}

std::vector<Diagram> enumerate_closed_diagrams(std::span<const int> row_lengths) {
  std::vector<Diagram> out;
  for_each_closed_diagram(row_lengths, [&](const Diagram& d) {
    out.push_back(d);
    return true;
  });
  return out;
}

std::uint64_t count_closed_diagrams(std::span<const int> row_lengths) {
  const int total = checked_total(row_lengths, kMaxCountVertices);
  if (total % 2 != 0) return 0;
  std::map<std::vector<int>, std::uint64_t> memo;
  return count_rec(std::vector<int>(row_lengths.begin(), row_lengths.end()), memo);
}

std::vector<std::vector<int>> component_rows(const Diagram& d) {
  const int m = d.num_rows();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  for (const auto& e : d.edges()) {
    adj[static_cast<std::size_t>(e.a.row)].push_back(e.b.row);
    adj[static_cast<std::size_t>(e.b.row)].push_back(e.a.row);
  }
  std::vector<int> comp(static_cast<std::size_t>(m), -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < m; ++start) {
    if (comp[static_cast<std::size_t>(start)] != -1) continue;
    const int id = static_cast<int>(out.size());
    std::vector<int> rows{start};
    comp[static_cast<std::size_t>(start)] = id;
    for (std::size_t q = 0; q < rows.size(); ++q)
      for (int nb : adj[static_cast<std::size_t>(rows[q])])
        if (comp[static_cast<std::size_t>(nb)] == -1) {
          comp[static_cast<std::size_t>(nb)] = id;
          rows.push_back(nb);
        }
    std::sort(rows.begin(), rows.end());
    out.push_back(std::move(rows));
  }
  return out;
}

bool is_connected(const Diagram& d) { return component_rows(d).size() <= 1; }

std::vector<Diagram> connected_components(const Diagram& d) {
  std::vector<Diagram> out;
  for (const auto& rows : component_rows(d)) out.push_back(d.restrict_to(rows));
  return out;
}

bool is_pairing_structured(const Diagram& d) {
  for (const auto& rows : component_rows(d))
    if (rows.size() != 2) return false;
  return true;
}

DenseTensor evaluate_dense(const Diagram& d, std::span<const DenseTensor> kernels,
                           std::vector<int>* open_labels) {
  const int m = d.num_rows();
  if (static_cast<int>(kernels.size()) != m)
    throw InvalidArgument("evaluate: expected " + std::to_string(m) + " kernels, got " + std::to_string(kernels.size()));
  if (m == 0) throw InvalidArgument("evaluate: diagram has no rows");
  const int dim = kernels[0].dim();
  for (int t = 0; t < m; ++t) {
    const auto& k = kernels[static_cast<std::size_t>(t)];
    if (k.order() != d.row_length(t))
      throw InvalidArgument("evaluate: kernel " + std::to_string(t) + " has order " + std::to_string(k.order()) +
                            ", row has " + std::to_string(d.row_length(t)) + " vertices");
    if (k.dim() != dim) throw InvalidArgument("evaluate: kernels must share dim");
  }

  auto row_labels = [&](int t) {
    std::vector<int> out;
    const int base = d.flat({t, 0});
    for (int l = 0; l < d.row_length(t); ++l) out.push_back(d.label(base + l));
    return out;
  };

  DenseTensor acc = kernels[0];
  std::vector<int> acc_labels = row_labels(0);
  std::vector<AxisPair> pairs;
  for (int t = 1; t < m; ++t) {
    const auto lt = row_labels(t);
    pairs.clear();
    std::vector<bool> a_used(acc_labels.size(), false), b_used(lt.size(), false);
    for (std::size_t ia = 0; ia < acc_labels.size(); ++ia)
      for (std::size_t ib = 0; ib < lt.size(); ++ib)
        if (acc_labels[ia] == lt[ib]) {
          pairs.push_back({static_cast<int>(ia), static_cast<int>(ib)});
          a_used[ia] = b_used[ib] = true;
        }
    acc = contract(acc, kernels[static_cast<std::size_t>(t)], pairs);
    std::vector<int> next;
    for (std::size_t ia = 0; ia < acc_labels.size(); ++ia)
      if (!a_used[ia]) next.push_back(acc_labels[ia]);
    for (std::size_t ib = 0; ib < lt.size(); ++ib)
      if (!b_used[ib]) next.push_back(lt[ib]);
    acc_labels = std::move(next);
  }

  std::vector<int> perm(acc_labels.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int x, int y) {
    return acc_labels[static_cast<std::size_t>(x)] < acc_labels[static_cast<std::size_t>(y)];
  });
  if (open_labels) {
    open_labels->clear();
    for (int p : perm) open_labels->push_back(acc_labels[static_cast<std::size_t>(p)]);
  }
  if (std::is_sorted(acc_labels.begin(), acc_labels.end())) return acc;
  return permute_axes(acc, perm);
}

double evaluate_closed(const Diagram& d, std::span<const DenseTensor> kernels) {
  if (!d.is_closed()) throw InvalidArgument("evaluate_closed: diagram has open vertices");
  return evaluate_dense(d, kernels)[0];
}

PartialKernel evaluate(const Diagram& d, std::span<const CoefficientTensor> kernels) {
  if (kernels.empty()) throw InvalidArgument("evaluate: no kernels");
  std::vector<DenseTensor> dense;
  dense.reserve(kernels.size());
  for (const auto& k : kernels) {
    if (k.dim() != kernels[0].dim()) throw InvalidArgument("evaluate: kernels must share dim");
    dense.push_back(DenseTensor::from_sparse(k));
  }
  PartialKernel out;
  const DenseTensor t = evaluate_dense(d, dense, &out.open_labels);
  out.tensor = t.to_sparse();
  return out;
}

}  // namespace chaos
