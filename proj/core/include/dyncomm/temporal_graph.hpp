#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dyncomm/types.hpp"

namespace dyncomm {

/// One undirected edge, stored once with i < j.
struct Edge {
  NodeId i;
  NodeId j;
  double w;
};

/// A raw `t i j [w]` event as read from an edge-event file.
struct EdgeEvent {
  std::size_t t;
  NodeId i;
  NodeId j;
  double w = 1.0;
};

struct Neighbor {
  NodeId node;
  double w;
};

/// Sparse symmetric adjacency of one time slice.
///
/// Edges are kept sorted by (i, j) with i < j. A CSR neighbour index holds
/// both directions of every edge, ordered by neighbour id. Degrees, the total
/// edge weight L and the squared Frobenius norm of the full symmetric matrix
/// are computed once at construction.
class SliceAdjacency {
 public:
  SliceAdjacency() = default;

  /// Takes canonical edges (i < j < num_nodes, finite w > 0, no duplicates).
  /// Throws std::invalid_argument when the edge list is not canonical.
  SliceAdjacency(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return degrees_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const double> degrees() const { return degrees_; }
  std::span<const Neighbor> neighbors(NodeId node) const {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }

  /// L = sum of w over unordered pairs. Defined as half the degree sum so that
  /// 2L == sum(degrees) holds bit-exactly.
  double total_edge_weight() const { return total_edge_weight_; }

  /// sum_ij w_ij^2 over the full symmetric matrix.
  double frob_sq() const { return frob_sq_; }

 private:
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  double total_edge_weight_ = 0.0;
  double frob_sq_ = 0.0;
};

/// N nodes observed over T slices. Immutable after construction.
class TemporalGraph {
 public:
  TemporalGraph() = default;
  TemporalGraph(std::size_t num_nodes, std::vector<SliceAdjacency> slices);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_slices() const { return slices_.size(); }
  const SliceAdjacency& slice(std::size_t t) const { return slices_.at(t); }
  std::span<const SliceAdjacency> slices() const { return slices_; }

 private:
  std::size_t num_nodes_ = 0;
  std::vector<SliceAdjacency> slices_;
};

/// Builds a graph from edge events. (t, i, j) and (t, j, i) address the same
/// undirected edge and repeated events accumulate weight. N and T default to
/// max index + 1. Throws ParseError on self-loops, negative or non-finite
/// weights, and indices outside explicitly given bounds.
TemporalGraph from_edge_events(std::span<const EdgeEvent> events,
                               std::optional<std::size_t> num_nodes = std::nullopt,
                               std::optional<std::size_t> num_slices = std::nullopt);

/// Copy of `g` with every positive weight replaced by 1.
TemporalGraph binarized(const TemporalGraph& g);

/// X_t * m, iterating the sparse edges of slice t. O(|E_t| k).
Matrix slice_matmul(const TemporalGraph& g, std::size_t t, const Matrix& m);

struct ModularityInputs {
  double total_edge_weight;
  std::span<const double> degrees;
};

ModularityInputs slice_modularity_inputs(const TemporalGraph& g, std::size_t t);

}  // namespace dyncomm
