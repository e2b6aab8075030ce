#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "dyncomm/modularity.hpp"
#include "oracles.hpp"

namespace dyncomm {
namespace {

TemporalGraph two_triangles() {
  return from_edge_events(std::vector<EdgeEvent>{
      {0, 0, 1}, {0, 1, 2}, {0, 0, 2}, {0, 3, 4}, {0, 4, 5}, {0, 3, 5}});
}

Labels random_labels(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  Labels l(n);
  for (Label& x : l) x = static_cast<Label>(rng() % k);
  return l;
}

// A graph with at least one edge in slice 0 and no isolated node, so that
// every partition oracle sees a connected-enough instance.
TemporalGraph connected_random_graph(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EdgeEvent> events;
  for (NodeId v = 1; v < n; ++v) events.push_back({0, static_cast<NodeId>(rng() % v), v, 1.0});
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (u(rng) < 0.3) events.push_back({0, i, j, seed % 2 ? 1.0 : 0.5 + u(rng)});
    }
  }
  return from_edge_events(events, n, 1);
}

TEST(PartitionOracle, EnumeratesBellNumbers) {
  for (auto [n, bell] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {3, 5}, {5, 52}, {8, 4140}}) {
    std::size_t count = 0;
    oracle::for_each_partition(n, [&](const Labels&) { ++count; });
    EXPECT_EQ(count, bell);
  }
}

TEST(Modularity, SingleCommunityIsExactlyZero) {
  const TemporalGraph g = oracle::random_graph(15, 1, 0.3, 1);
  EXPECT_EQ(modularity(g, 0, Labels(15, 0)), 0.0);
  const TemporalGraph w = oracle::random_graph(15, 1, 0.3, 1, true);
  EXPECT_NEAR(modularity(w, 0, Labels(15, 3)), 0.0, 1e-15);
}

TEST(Modularity, EmptySliceIsZero) {
  const TemporalGraph g = from_edge_events({}, 4, 1);
  EXPECT_EQ(modularity(g, 0, Labels{0, 1, 2, 3}), 0.0);
}

TEST(Modularity, TwoTrianglesSplitByTriangle) {
  EXPECT_DOUBLE_EQ(modularity(two_triangles(), 0, Labels{0, 0, 0, 1, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(oracle::brute_force_max_modularity(two_triangles(), 0), 0.5);
}

TEST(Modularity, RejectsOutOfRangeLabels) {
  EXPECT_THROW(modularity(two_triangles(), 0, Labels{0, 0, 0, 1, 1, 6}), std::out_of_range);
  EXPECT_THROW(modularity(two_triangles(), 0, Labels{0, 0, 0}), std::invalid_argument);
}

TEST(Modularity, MatchesDenseDoubleSum) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 3 + seed % 14;
    const TemporalGraph g = oracle::random_graph(n, 1, 0.4, seed, seed % 2 == 0);
    const Labels labels = random_labels(n, 1 + seed % 4, rng);
    EXPECT_NEAR(modularity(g, 0, labels), oracle::dense_modularity(g, 0, labels), 1e-12);
  }
}

TEST(Modularity, InvariantUnderLabelPermutationExactly) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TemporalGraph g = oracle::random_graph(20, 1, 0.3, seed, true);
    const Labels labels = random_labels(20, 5, rng);
    std::vector<Label> perm(20);
    std::iota(perm.begin(), perm.end(), Label{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Labels renamed(labels.size());
    for (std::size_t v = 0; v < labels.size(); ++v) renamed[v] = perm[labels[v]];
    EXPECT_EQ(modularity(g, 0, labels), modularity(g, 0, renamed));
  }
}

TEST(Modularity, StaysWithinTheoreticalBounds) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TemporalGraph g = oracle::random_graph(12, 1, 0.3, seed);
    const double q = modularity(g, 0, random_labels(12, 1 + seed % 12, rng));
    EXPECT_GE(q, -0.5);
    EXPECT_LE(q, 1.0);
  }
}

TEST(CompactLabels, FirstAppearanceOrder) {
  EXPECT_EQ(compact_labels(Labels{7, 3, 7, 9, 3}), (Labels{0, 1, 0, 2, 1}));
}

TEST(LouvainRefine, OptimalSeedIsKept) {
  const Labels out = louvain_refine(two_triangles(), 0, Labels{4, 4, 4, 1, 1, 1});
  EXPECT_EQ(out, (Labels{0, 0, 0, 1, 1, 1}));
}

TEST(LouvainRefine, SingletonSeedFindsBothTriangles) {
  const Labels out = louvain_refine(two_triangles(), 0, Labels{0, 1, 2, 3, 4, 5});
  EXPECT_EQ(out, (Labels{0, 0, 0, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(modularity(two_triangles(), 0, out), 0.5);
}

TEST(LouvainRefine, AllInOneSeedEscapesOnDisconnectedGraph) {
  const Labels out = louvain_refine(two_triangles(), 0, Labels(6, 0));
  EXPECT_DOUBLE_EQ(modularity(two_triangles(), 0, out), 0.5);
}

TEST(LouvainRefine, MixedSeedReachesOptimum) {
  const Labels out = louvain_refine(two_triangles(), 0, Labels{0, 0, 1, 1, 0, 1});
  EXPECT_DOUBLE_EQ(modularity(two_triangles(), 0, out), 0.5);
}

TEST(LouvainRefine, LocallyOptimalSeedKeepsItsModularity) {
  const TemporalGraph g = oracle::random_graph(30, 1, 0.2, 5);
  const Labels first = louvain_refine(g, 0, Labels(30, 0));
  const Labels second = louvain_refine(g, 0, first);
  EXPECT_EQ(modularity(g, 0, second), modularity(g, 0, first));
}

TEST(LouvainRefine, NeverLowersModularityOfTheSeed) {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const std::size_t n = 5 + seed % 40;
    const TemporalGraph g = oracle::random_graph(n, 1, 0.05 + 0.01 * static_cast<double>(seed % 20), seed, seed % 3 == 0);
    const Labels labels = random_labels(n, std::min<std::size_t>(n, 1 + seed % 7), rng);
    const Labels out = louvain_refine(g, 0, labels);
    EXPECT_GE(modularity(g, 0, out), modularity(g, 0, labels) - 1e-12) << "seed " << seed;
  }
}

TEST(LouvainRefine, OutputIsCompactedAndBoundedByTheExhaustiveMaximum) {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const TemporalGraph g = connected_random_graph(n, seed);
    const double best = oracle::brute_force_max_modularity(g, 0);
    const Labels out = louvain_refine(g, 0, random_labels(n, 1 + seed % 3, rng));
    EXPECT_LE(modularity(g, 0, out), best + 1e-12);
    EXPECT_EQ(out, compact_labels(out));
  }
}

TEST(LouvainRefine, IsolatedNodesKeepTheirSeedGroup) {
  // Nodes 6 and 7 have no edges; they stay together with their seed mates.
  const TemporalGraph g = from_edge_events(std::vector<EdgeEvent>{
      {0, 0, 1}, {0, 1, 2}, {0, 0, 2}, {0, 3, 4}, {0, 4, 5}, {0, 3, 5}}, 8, 1);
  const Labels out = louvain_refine(g, 0, Labels{0, 0, 0, 1, 1, 1, 1, 2});
  EXPECT_EQ(out[6], out[3]);
  EXPECT_NE(out[7], out[0]);
  EXPECT_NE(out[7], out[3]);
}

TEST(LouvainRefine, EmptySliceReturnsCompactedSeed) {
  const TemporalGraph g = from_edge_events({}, 4, 1);
  EXPECT_EQ(louvain_refine(g, 0, Labels{3, 3, 1, 0}), (Labels{0, 0, 1, 2}));
}

TEST(RefineSeries, SingleSliceAverageEqualsItsQ) {
  Matrix b = Matrix::Zero(6, 2);
  b.col(0).setConstant(0.5);
  b.col(1).setConstant(0.5);
  const RefinedSeries r = refine_series(two_triangles(), {b});
  ASSERT_EQ(r.modularity.size(), 1u);
  EXPECT_EQ(r.average_modularity, r.modularity[0]);
  // Uniform rows all tie to community 0; refinement still reaches Q = 0.5.
  EXPECT_DOUBLE_EQ(r.average_modularity, 0.5);
}

TEST(RefineSeries, PlantedOneHotMembershipsReproducePlantedModularity) {
  // Four cliques of five joined in a ring by single edges; the clique
  // partition is the exhaustive optimum of this small ring-of-cliques.
  std::vector<EdgeEvent> events;
  for (std::size_t t = 0; t < 2; ++t) {
    for (NodeId c = 0; c < 4; ++c) {
      for (NodeId i = 0; i < 5; ++i) {
        for (NodeId j = i + 1; j < 5; ++j) events.push_back({t, 5 * c + i, 5 * c + j});
      }
      events.push_back({t, 5 * c, static_cast<NodeId>((5 * c + 6) % 20)});
    }
  }
  const TemporalGraph g = from_edge_events(events);
  Matrix b = Matrix::Zero(20, 4);
  Labels planted(20);
  for (Eigen::Index v = 0; v < 20; ++v) {
    b(v, v / 5) = 1.0;
    planted[v] = static_cast<Label>(v / 5);
  }
  const RefinedSeries r = refine_series(g, {b, b});
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_EQ(r.partitions[t], planted);
    EXPECT_DOUBLE_EQ(r.modularity[t], modularity(g, t, planted));
  }
}

TEST(RefineSeries, ParallelMatchesSequential) {
  const TemporalGraph g = oracle::random_graph(40, 6, 0.1, 8);
  std::mt19937_64 rng(8);
  MembershipSeries b;
  for (int t = 0; t < 6; ++t) b.push_back(oracle::random_matrix(40, 4, rng));
  const RefinedSeries a = refine_series(g, b, false);
  const RefinedSeries c = refine_series(g, b, true);
  EXPECT_EQ(a.partitions, c.partitions);
  EXPECT_EQ(a.modularity, c.modularity);
}

}  // namespace
}  // namespace dyncomm
