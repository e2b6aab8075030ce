#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dyncomm/temporal_graph.hpp"
#include "dyncomm/types.hpp"

namespace dyncomm {

/// Newman modularity of slice t under `labels`, computed per community as
/// sum_c [l_c / L - (d_c / 2L)^2]. Returns 0 for a slice without edges.
/// Labels must lie in [0, N); throws std::out_of_range otherwise.
double modularity(const TemporalGraph& g, std::size_t t, std::span<const Label> labels);

/// Renumbers labels to 0..k-1 in order of first appearance.
Labels compact_labels(std::span<const Label> labels);

/// Louvain refinement of slice t starting from `seed` instead of singletons.
///
/// Seed communities are first split into their connected components (never
/// lowers Q). Phase 1 then visits nodes in ascending id and moves each to the
/// neighbouring community with the largest positive gain, ties to the lowest
/// community id. Phase 2 collapses communities into super-nodes and the
/// process repeats until a full pass over singleton super-nodes moves nothing.
/// Returns compacted labels with Q(result) >= Q(seed) up to rounding.
Labels louvain_refine(const TemporalGraph& g, std::size_t t, std::span<const Label> seed);

struct RefinedSeries {
  PartitionSeries partitions;
  std::vector<double> modularity;
  double average_modularity = 0.0;
};

/// hard_assign -> louvain_refine -> modularity for every slice; the average is
/// the unweighted mean over slices.
RefinedSeries refine_series(const TemporalGraph& g, const MembershipSeries& b,
                            bool parallel_slices = false);

}  // namespace dyncomm
