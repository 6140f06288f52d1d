#include "chaos/census.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "chaos/error.hpp"
#include "chaos/numeric.hpp"

namespace chaos {

std::uint64_t multigraph_diagram_count(std::span<const int> row_lengths, std::span<const int> n) {
  const std::size_t m = row_lengths.size();
  if (n.size() != m * m) throw InvalidArgument("multiplicity matrix has wrong size");
  unsigned __int128 num = 1;
  for (int k : row_lengths) num *= factorial_u64(k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) num /= factorial_u64(n[i * m + j]);
  if (num > static_cast<unsigned __int128>(UINT64_MAX)) throw CapExceeded("diagram count overflows 64 bits");
  return static_cast<std::uint64_t>(num);
}

namespace {

struct Builder {
  std::vector<int> lengths;
  std::vector<int> classes;
  int m = 0;
  std::vector<int> rem;
  std::vector<int> n;  // m x m
  std::map<DiagramCensus::ComponentKey, int> interned;
  std::vector<DiagramCensus::Component> components;
  std::map<std::vector<int>, DiagramCensus::Signature> signatures;
  std::size_t graphs = 0;

  std::vector<int> parent;
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  }

  int mult(int i, int j) const { return n[static_cast<std::size_t>(i * m + j)]; }

  static Diagram representative(const DiagramCensus::ComponentKey& key) {
    const int r = static_cast<int>(key.lengths.size());
    std::vector<int> offsets(static_cast<std::size_t>(r), 0), next(static_cast<std::size_t>(r), 0);
    int total = 0;
    for (int t = 0; t < r; ++t) {
      offsets[static_cast<std::size_t>(t)] = total;
      total += key.lengths[static_cast<std::size_t>(t)];
    }
    std::vector<int> partner(static_cast<std::size_t>(total), -1);
    std::size_t q = 0;
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j, ++q)
        for (int e = 0; e < key.mult[q]; ++e) {
          const int a = offsets[static_cast<std::size_t>(i)] + next[static_cast<std::size_t>(i)]++;
          const int b = offsets[static_cast<std::size_t>(j)] + next[static_cast<std::size_t>(j)]++;
          partner[static_cast<std::size_t>(a)] = b;
          partner[static_cast<std::size_t>(b)] = a;
        }
    return Diagram::closed(key.lengths, std::move(partner));
  }

  void record() {
    ++graphs;
    parent.resize(static_cast<std::size_t>(m));
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (mult(i, j) > 0) parent[static_cast<std::size_t>(find(j))] = find(i);
    std::vector<int> ids;
    std::vector<bool> done(static_cast<std::size_t>(m), false);
    for (int start = 0; start < m; ++start) {
      const int root = find(start);
      if (done[static_cast<std::size_t>(root)]) continue;
      done[static_cast<std::size_t>(root)] = true;
      std::vector<int> rows;
      for (int t = start; t < m; ++t)
        if (find(t) == root) rows.push_back(t);
      DiagramCensus::ComponentKey key;
      for (int t : rows) {
        key.classes.push_back(classes[static_cast<std::size_t>(t)]);
        key.lengths.push_back(lengths[static_cast<std::size_t>(t)]);
      }
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b) key.mult.push_back(mult(rows[a], rows[b]));
      auto it = interned.find(key);
      if (it == interned.end()) {
        it = interned.emplace(key, static_cast<int>(components.size())).first;
        components.push_back({key, representative(key)});
      }
      ids.push_back(it->second);
    }
    const bool connected = ids.size() == 1;
    std::sort(ids.begin(), ids.end());
    const std::uint64_t c = multigraph_diagram_count(lengths, n);
    auto& sig = signatures[ids];
    if (sig.count == 0) {
      sig.components = ids;
      sig.connected = connected;
    }
    sig.count += c;
  }

  void distribute(int i, int j, int left) {
    if (left == 0) {
      row(i + 1);
      return;
    }
    if (j >= m) return;
    int room = 0;
    for (int t = j; t < m; ++t) room += rem[static_cast<std::size_t>(t)];
    if (room < left) return;
    const int hi = std::min(left, rem[static_cast<std::size_t>(j)]);
    for (int c = hi; c >= 0; --c) {
      n[static_cast<std::size_t>(i * m + j)] = n[static_cast<std::size_t>(j * m + i)] = c;
      rem[static_cast<std::size_t>(j)] -= c;
      distribute(i, j + 1, left - c);
      rem[static_cast<std::size_t>(j)] += c;
    }
    n[static_cast<std::size_t>(i * m + j)] = n[static_cast<std::size_t>(j * m + i)] = 0;
  }

  void row(int i) {
    if (i == m) {
      record();
      return;
    }
    const int left = rem[static_cast<std::size_t>(i)];
    rem[static_cast<std::size_t>(i)] = 0;
    distribute(i, i + 1, left);
    rem[static_cast<std::size_t>(i)] = left;
  }
};

}  // namespace

DiagramCensus::DiagramCensus(std::vector<int> row_lengths, std::vector<int> row_classes)
    : row_lengths_(std::move(row_lengths)), row_classes_(std::move(row_classes)) {
  if (row_lengths_.size() != row_classes_.size()) throw InvalidArgument("census: lengths/classes size mismatch");
  int total = 0;
  for (int k : row_lengths_) {
    if (k < 1) throw InvalidArgument("census: row lengths must be positive");
    total += k;
  }
  if (total > kMaxDiagramVertices)
    throw CapExceeded("diagram profile has " + std::to_string(total) + " vertices; cap is " +
                      std::to_string(kMaxDiagramVertices));
  if (total % 2 != 0) return;

  Builder b;
  b.lengths = row_lengths_;
  b.classes = row_classes_;
  b.m = static_cast<int>(row_lengths_.size());
  b.rem = row_lengths_;
  b.n.assign(static_cast<std::size_t>(b.m * b.m), 0);
  b.row(0);

  graph_count_ = b.graphs;
  components_ = std::move(b.components);
  for (auto& [ids, sig] : b.signatures) {
    diagram_count_ += sig.count;
    if (sig.connected) connected_count_ += sig.count;
    signatures_.push_back(std::move(sig));
  }
}

std::vector<double> DiagramCensus::component_values(std::span<const DenseTensor> class_kernels) const {
  std::vector<double> values;
  values.reserve(components_.size());
  std::vector<DenseTensor> rows;
  for (const auto& c : components_) {
    rows.clear();
    for (int cls : c.key.classes) {
      if (cls < 0 || static_cast<std::size_t>(cls) >= class_kernels.size())
        throw InvalidArgument("census: missing kernel for class " + std::to_string(cls));
      rows.push_back(class_kernels[static_cast<std::size_t>(cls)]);
    }
    values.push_back(evaluate_closed(c.representative, rows));
  }
  return values;
}

double DiagramCensus::evaluate(std::span<const DenseTensor> class_kernels) const {
  const auto values = component_values(class_kernels);
  KahanSum sum;
  for (const auto& sig : signatures_) {
    double p = static_cast<double>(sig.count);
    for (int id : sig.components) p *= values[static_cast<std::size_t>(id)];
    sum += p;
  }
  return sum.value();
}

double DiagramCensus::evaluate_connected(std::span<const DenseTensor> class_kernels) const {
  KahanSum sum;
  std::vector<DenseTensor> rows;
  for (const auto& sig : signatures_) {
    if (!sig.connected) continue;
    const auto& c = components_[static_cast<std::size_t>(sig.components[0])];
    rows.clear();
    for (int cls : c.key.classes) rows.push_back(class_kernels[static_cast<std::size_t>(cls)]);
    sum += static_cast<double>(sig.count) * evaluate_closed(c.representative, rows);
  }
  return sum.value();
}

}  // namespace chaos
