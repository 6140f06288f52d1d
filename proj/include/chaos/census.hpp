#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chaos/diagram.hpp"
#include "chaos/tensor.hpp"

namespace chaos {

/// Closed diagrams grouped by their row multiplicity matrix. For symmetric
/// kernels F_gamma only depends on how many edges join each pair of rows, so
/// the moment is a weighted sum over loopless multigraphs with the row lengths
/// as degrees. Each multigraph is split into connected components; identical
/// components (same kernel classes, lengths and multiplicities) are shared.
class DiagramCensus {
 public:
  struct ComponentKey {
    std::vector<int> classes;
    std::vector<int> lengths;
    std::vector<int> mult;  // upper triangle, row-major over (i < j)
    friend auto operator<=>(const ComponentKey&, const ComponentKey&) = default;
  };

  struct Component {
    ComponentKey key;
    Diagram representative;
  };

  struct Signature {
    std::vector<int> components;  // sorted component ids, with repetition
    std::uint64_t count = 0;      // number of diagrams with this signature
    bool connected = false;       // a single component covering every row
  };

  /// row_classes[t] identifies the kernel of row t; rows with equal classes
  /// must carry identical kernels at evaluation time.
  DiagramCensus(std::vector<int> row_lengths, std::vector<int> row_classes);

  const std::vector<int>& row_lengths() const { return row_lengths_; }
  const std::vector<int>& row_classes() const { return row_classes_; }
  std::uint64_t diagram_count() const { return diagram_count_; }
  std::uint64_t connected_count() const { return connected_count_; }
  std::size_t graph_count() const { return graph_count_; }
  const std::vector<Component>& components() const { return components_; }
  const std::vector<Signature>& signatures() const { return signatures_; }

  /// F of every component; class_kernels[c] is the symmetric kernel of class c.
  std::vector<double> component_values(std::span<const DenseTensor> class_kernels) const;

  /// Sum of F_gamma over all closed diagrams.
  double evaluate(std::span<const DenseTensor> class_kernels) const;

  /// Sum of F_gamma over connected closed diagrams on all rows.
  double evaluate_connected(std::span<const DenseTensor> class_kernels) const;

 private:
  std::vector<int> row_lengths_;
  std::vector<int> row_classes_;
  std::uint64_t diagram_count_ = 0;
  std::uint64_t connected_count_ = 0;
  std::size_t graph_count_ = 0;
  std::vector<Component> components_;
  std::vector<Signature> signatures_;
};

/// Number of closed diagrams with row multiplicity matrix n (m x m, zero
/// diagonal): prod_j k_j! / prod_{i<j} n_ij!.
std::uint64_t multigraph_diagram_count(std::span<const int> row_lengths, std::span<const int> n);

}  // namespace chaos
