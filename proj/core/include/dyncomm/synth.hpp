#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dyncomm/temporal_graph.hpp"
#include "dyncomm/types.hpp"

namespace dyncomm {

/// Dynamic stochastic block model with planted, slowly churning communities.
struct DsbmConfig {
  std::size_t num_nodes = 100;
  std::size_t num_communities = 4;
  std::size_t num_slices = 6;
  double p_in = 0.3;
  double p_out = 0.02;
  double churn = 0.1;  // fraction of nodes reassigned at each slice transition
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless N >= 1, K >= 1, T >= 1,
  /// 0 <= p_out < p_in <= 1 and 0 <= churn <= 1.
  void validate() const;
};

struct DsbmInstance {
  std::vector<EdgeEvent> events;  // one event per edge, (t, i, j) with i < j
  TemporalGraph graph;
  PartitionSeries truth;
};

/// Slice 0 assigns node v to community v mod K. Each transition moves
/// ceil(churn * N) distinct, uniformly chosen nodes to a uniformly chosen
/// different community. Every unordered pair in every slice is an independent
/// Bernoulli(p_in) or Bernoulli(p_out) draw.
DsbmInstance generate_dsbm(const DsbmConfig& cfg);

/// Normalized mutual information with arithmetic-mean normalization,
/// 2 I(a; b) / (H(a) + H(b)). Two zero-entropy partitions score 1; a single
/// zero-entropy side scores 0. Symmetric and relabel-invariant bit-for-bit.
/// Throws std::invalid_argument on a length mismatch.
double nmi(std::span<const Label> a, std::span<const Label> b);

}  // namespace dyncomm
