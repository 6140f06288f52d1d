#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaos/tensor.hpp"

namespace chaos {

/// Vertex (row position t, slot l) of a diagram; both 0-based. `row` is the
/// position in the diagram's row list, not the original row id.
struct Vertex {
  int row;
  int pos;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct Edge {
  Vertex a;  // lexicographically smaller endpoint
  Vertex b;
};

/// Rows of vertices plus a matching whose edges join different rows. Every
/// vertex carries a label: matched vertices share the label of their edge
/// (the dense id of the smaller endpoint), open vertices keep their own id.
/// Labels are inherited unchanged by restrictions.
class Diagram {
 public:
  /// partner[v] is the flat id of v's partner or -1. Flat ids enumerate the
  /// vertices row by row. Labels default to the canonical labelling.
  Diagram(std::vector<int> row_ids, std::vector<int> row_lengths, std::vector<int> partner,
          std::vector<int> labels = {});

  /// Closed diagram on rows 0..m-1 with the given matching.
  static Diagram closed(std::vector<int> row_lengths, std::vector<int> partner);

  int num_rows() const { return static_cast<int>(row_ids_.size()); }
  int num_vertices() const { return static_cast<int>(partner_.size()); }
  const std::vector<int>& row_ids() const { return row_ids_; }
  const std::vector<int>& row_lengths() const { return row_lengths_; }
  int row_length(int t) const { return row_lengths_[static_cast<std::size_t>(t)]; }

  int flat(Vertex v) const { return offsets_[static_cast<std::size_t>(v.row)] + v.pos; }
  Vertex vertex(int flat_id) const;
  int row_of(int flat_id) const { return row_of_[static_cast<std::size_t>(flat_id)]; }
  /// Flat id of the partner, or -1 for an open vertex.
  int partner(int flat_id) const { return partner_[static_cast<std::size_t>(flat_id)]; }
  int label(int flat_id) const { return labels_[static_cast<std::size_t>(flat_id)]; }
  const std::vector<int>& partners() const { return partner_; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<Edge> edges() const;
  int num_open() const;
  bool is_closed() const { return num_open() == 0; }
  /// Labels of open vertices in ascending order.
  std::vector<int> open_labels() const;

  /// Restriction to the rows at the given positions (ascending): vertices of
  /// those rows and the edges between them. Labels are preserved.
  Diagram restrict_to(std::span<const int> row_positions) const;

  /// Restriction to the first r rows.
  Diagram first_rows(int r) const;

  /// Canonical edge list "(r,l)-(r',l');..." with 1-based original row ids.
  std::string edge_string() const;

  friend bool operator==(const Diagram&, const Diagram&) = default;

 private:
  std::vector<int> row_ids_;
  std::vector<int> row_lengths_;
  std::vector<int> offsets_;
  std::vector<int> row_of_;
  std::vector<int> partner_;
  std::vector<int> labels_;
};

/// Diagrams enumerated per call are capped by the total number of vertices.
inline constexpr int kMaxDiagramVertices = 24;
/// The count-only path stays exact in 64 bits up to this many vertices.
inline constexpr int kMaxCountVertices = 32;

enum class EnumerationStatus { ok, odd_vertex_total, stopped };

/// Calls visit(partner) for every perfect matching of the complete
/// multipartite graph on the rows, in lexicographic backtracking order (the
/// lowest unmatched vertex is matched to each admissible later vertex in
/// increasing order). Returning false from visit stops the enumeration.
/// `partner` is indexed by flat vertex id.
EnumerationStatus for_each_matching(std::span<const int> row_lengths,
                                    const std::function<bool(std::span<const int>)>& visit);

/// Same stream materialized as Diagram objects on rows 0..m-1.
EnumerationStatus for_each_closed_diagram(std::span<const int> row_lengths,
                                          const std::function<bool(const Diagram&)>& visit);

/// All closed diagrams; convenient for small profiles.
std::vector<Diagram> enumerate_closed_diagrams(std::span<const int> row_lengths);

/// Number of closed diagrams without enumerating them (memoized recursion).
std::uint64_t count_closed_diagrams(std::span<const int> row_lengths);

/// The row graph is connected. A single row counts as connected.
bool is_connected(const Diagram& d);

/// Row positions of each connected component, ordered by smallest row.
std::vector<std::vector<int>> component_rows(const Diagram& d);

/// Restrictions to the connected components, ordered by smallest row id.
std::vector<Diagram> connected_components(const Diagram& d);

/// F_gamma over the open labels (ascending).
struct PartialKernel {
  std::vector<int> open_labels;
  CoefficientTensor tensor{0, 1};
};

/// Row-by-row evaluation: start from the kernel of the first row and at each
/// further row contract the accumulated kernel with that row's kernel over the
/// labels that close. kernels[t] belongs to row position t.
PartialKernel evaluate(const Diagram& d, std::span<const CoefficientTensor> kernels);

/// Dense variant used on hot paths. Returns the tensor over the ascending
/// open labels (written to open_labels when non-null).
DenseTensor evaluate_dense(const Diagram& d, std::span<const DenseTensor> kernels,
                           std::vector<int>* open_labels = nullptr);

/// Scalar F_gamma of a closed diagram.
double evaluate_closed(const Diagram& d, std::span<const DenseTensor> kernels);

/// Rows of `d` can be grouped in pairs with every edge inside a pair.
bool is_pairing_structured(const Diagram& d);

}  // namespace chaos
