#include "dyncomm/temporal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "dyncomm/error.hpp"

namespace dyncomm {

SliceAdjacency::SliceAdjacency(std::size_t num_nodes, std::vector<Edge> edges)
    : edges_(std::move(edges)), degrees_(num_nodes, 0.0) {
  std::vector<std::size_t> counts(num_nodes, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.i >= edge.j || edge.j >= num_nodes) {
      throw std::invalid_argument("SliceAdjacency: edge endpoints must satisfy i < j < N");
    }
    if (!(edge.w > 0.0) || !std::isfinite(edge.w)) {
      throw std::invalid_argument("SliceAdjacency: edge weights must be finite and positive");
    }
    if (e > 0 && std::tie(edges_[e - 1].i, edges_[e - 1].j) >= std::tie(edge.i, edge.j)) {
      throw std::invalid_argument("SliceAdjacency: edges must be sorted and unique");
    }
    ++counts[edge.i];
    ++counts[edge.j];
  }

  offsets_.assign(num_nodes + 1, 0);
  for (std::size_t v = 0; v < num_nodes; ++v) offsets_[v + 1] = offsets_[v] + counts[v];
  adjacency_.resize(offsets_[num_nodes]);

  // Filling in (i, j) order leaves every neighbour list sorted by id: the
  // lower neighbours of j arrive in increasing i before any higher neighbour.
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& edge : edges_) {
    adjacency_[cursor[edge.i]++] = {edge.j, edge.w};
    adjacency_[cursor[edge.j]++] = {edge.i, edge.w};
  }

  double frob_half = 0.0;
  for (const Edge& edge : edges_) frob_half += edge.w * edge.w;
  frob_sq_ = 2.0 * frob_half;

  double degree_sum = 0.0;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    double d = 0.0;
    for (const Neighbor& nb : neighbors(static_cast<NodeId>(v))) d += nb.w;
    degrees_[v] = d;
    degree_sum += d;
  }
  total_edge_weight_ = 0.5 * degree_sum;
}

TemporalGraph::TemporalGraph(std::size_t num_nodes, std::vector<SliceAdjacency> slices)
    : num_nodes_(num_nodes), slices_(std::move(slices)) {
  for (const SliceAdjacency& s : slices_) {
    if (s.num_nodes() != num_nodes_) {
      throw std::invalid_argument("TemporalGraph: slice node count differs from N");
    }
  }
}

TemporalGraph from_edge_events(std::span<const EdgeEvent> events,
                               std::optional<std::size_t> num_nodes,
                               std::optional<std::size_t> num_slices) {
  std::size_t max_node = 0;
  std::size_t max_slice = 0;
  for (const EdgeEvent& ev : events) {
    if (ev.i == ev.j) {
      throw ParseError("self-loop event at slice " + std::to_string(ev.t) + " on node " +
                       std::to_string(ev.i));
    }
    if (!std::isfinite(ev.w) || ev.w < 0.0) {
      throw ParseError("edge event (" + std::to_string(ev.t) + ", " + std::to_string(ev.i) +
                       ", " + std::to_string(ev.j) + ") has negative or non-finite weight");
    }
    const std::size_t hi = std::max(ev.i, ev.j);
    if (num_nodes && hi >= *num_nodes) {
      throw ParseError("node id " + std::to_string(hi) + " out of range for N=" +
                       std::to_string(*num_nodes));
    }
    if (num_slices && ev.t >= *num_slices) {
      throw ParseError("slice index " + std::to_string(ev.t) + " out of range for T=" +
                       std::to_string(*num_slices));
    }
    max_node = std::max(max_node, hi + 1);
    max_slice = std::max(max_slice, ev.t + 1);
  }
  const std::size_t n = num_nodes.value_or(max_node);
  const std::size_t slices = num_slices.value_or(max_slice);

  // Canonicalize and sort on the full key, weight included, so the
  // accumulation order does not depend on the input event order.
  std::vector<EdgeEvent> canon(events.begin(), events.end());
  for (EdgeEvent& ev : canon) {
    if (ev.i > ev.j) std::swap(ev.i, ev.j);
  }
  std::sort(canon.begin(), canon.end(), [](const EdgeEvent& a, const EdgeEvent& b) {
    return std::tie(a.t, a.i, a.j, a.w) < std::tie(b.t, b.i, b.j, b.w);
  });

  std::vector<std::vector<Edge>> per_slice(slices);
  for (std::size_t k = 0; k < canon.size();) {
    const EdgeEvent& head = canon[k];
    double w = 0.0;
    std::size_t end = k;
    while (end < canon.size() && canon[end].t == head.t && canon[end].i == head.i &&
           canon[end].j == head.j) {
      w += canon[end].w;
      ++end;
    }
    if (w > 0.0) per_slice[head.t].push_back({head.i, head.j, w});
    k = end;
  }

  std::vector<SliceAdjacency> built;
  built.reserve(slices);
  for (auto& edges : per_slice) built.emplace_back(n, std::move(edges));
  return TemporalGraph(n, std::move(built));
}

TemporalGraph binarized(const TemporalGraph& g) {
  std::vector<SliceAdjacency> slices;
  slices.reserve(g.num_slices());
  for (const SliceAdjacency& s : g.slices()) {
    std::vector<Edge> edges(s.edges().begin(), s.edges().end());
    for (Edge& e : edges) e.w = 1.0;
    slices.emplace_back(g.num_nodes(), std::move(edges));
  }
  return TemporalGraph(g.num_nodes(), std::move(slices));
}

Matrix slice_matmul(const TemporalGraph& g, std::size_t t, const Matrix& m) {
  if (static_cast<std::size_t>(m.rows()) != g.num_nodes()) {
    throw std::invalid_argument("slice_matmul: operand has " + std::to_string(m.rows()) +
                                " rows, graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
  const SliceAdjacency& s = g.slice(t);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (const Edge& e : s.edges()) {
    out.row(e.i) += e.w * m.row(e.j);
    out.row(e.j) += e.w * m.row(e.i);
  }
  return out;
}

ModularityInputs slice_modularity_inputs(const TemporalGraph& g, std::size_t t) {
  const SliceAdjacency& s = g.slice(t);
  return {s.total_edge_weight(), s.degrees()};
}

}  // namespace dyncomm
