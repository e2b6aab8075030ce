#include "dyncomm/modularity.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "dyncomm/community_mapper.hpp"
#include "parallel.hpp"

namespace dyncomm {

namespace {

constexpr Label kUnset = std::numeric_limits<Label>::max();

// Weighted graph with self-loops, used for the aggregated levels. A self-loop
// of weight w on node v stands for internal weight w counted once, so its
// contribution to v's degree is 2w.
struct LevelGraph {
  std::vector<std::vector<Neighbor>> adjacency;  // no self entries
  std::vector<double> self_loop;
  std::vector<double> degree;
  double total_weight = 0.0;  // L

  std::size_t size() const { return adjacency.size(); }
};

LevelGraph level_from_slice(const SliceAdjacency& s) {
  LevelGraph lg;
  const std::size_t n = s.num_nodes();
  lg.adjacency.resize(n);
  lg.self_loop.assign(n, 0.0);
  lg.degree.assign(s.degrees().begin(), s.degrees().end());
  for (std::size_t v = 0; v < n; ++v) {
    const auto nbrs = s.neighbors(static_cast<NodeId>(v));
    lg.adjacency[v].assign(nbrs.begin(), nbrs.end());
  }
  lg.total_weight = s.total_edge_weight();
  return lg;
}

// Phase 1. Returns true if any node moved. `community` is updated in place.
bool local_moves(const LevelGraph& lg, std::vector<Label>& community) {
  const std::size_t n = lg.size();
  const double m2 = 2.0 * lg.total_weight;
  std::vector<double> community_degree(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) community_degree[community[v]] += lg.degree[v];

  // Scratch map from community id to link weight, reset per node.
  std::vector<double> link(n, 0.0);
  std::vector<Label> touched;
  bool any_move = false;
  bool moved = true;
  // Gains below this are treated as rounding noise.
  constexpr double kMinGain = 1e-14;
  while (moved) {
    moved = false;
    for (std::size_t v = 0; v < n; ++v) {
      const Label own = community[v];
      const double k_v = lg.degree[v];
      touched.clear();
      for (const Neighbor& nb : lg.adjacency[v]) {
        const Label c = community[nb.node];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += nb.w;
      }
      community_degree[own] -= k_v;

      // gain(c) = k_{v,c} / L - d_c k_v / (2 L^2), scaled here by L.
      auto gain = [&](Label c) { return link[c] - community_degree[c] * k_v / m2; };
      const double stay = gain(own);
      Label best = own;
      double best_delta = 0.0;
      // Ascending order plus a strict comparison sends ties to the lowest id.
      std::sort(touched.begin(), touched.end());
      for (Label c : touched) {
        if (c == own) continue;
        const double delta = (gain(c) - stay) / lg.total_weight;
        if (delta > kMinGain && delta > best_delta) {
          best = c;
          best_delta = delta;
        }
      }
      community_degree[best] += k_v;
      if (best != own) {
        community[v] = best;
        moved = true;
        any_move = true;
      }
      for (Label c : touched) link[c] = 0.0;
    }
  }
  return any_move;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<Label>& community,
                     std::size_t num_communities) {
  LevelGraph out;
  out.adjacency.resize(num_communities);
  out.self_loop.assign(num_communities, 0.0);
  out.degree.assign(num_communities, 0.0);
  out.total_weight = lg.total_weight;

  std::vector<std::vector<Label>> members(num_communities);
  for (std::size_t v = 0; v < lg.size(); ++v) members[community[v]].push_back(static_cast<Label>(v));

  std::vector<double> link(num_communities, 0.0);
  std::vector<Label> touched;
  for (std::size_t c = 0; c < num_communities; ++c) {
    touched.clear();
    double internal = 0.0;
    for (Label v : members[c]) {
      out.degree[c] += lg.degree[v];
      internal += lg.self_loop[v];
      for (const Neighbor& nb : lg.adjacency[v]) {
        const Label d = community[nb.node];
        if (d == c) {
          internal += 0.5 * nb.w;  // each internal edge is seen from both ends
        } else {
          if (link[d] == 0.0) touched.push_back(d);
          link[d] += nb.w;
        }
      }
    }
    out.self_loop[c] = internal;
    std::sort(touched.begin(), touched.end());
    for (Label d : touched) {
      out.adjacency[c].push_back({d, link[d]});
      link[d] = 0.0;
    }
  }
  return out;
}

// Splits every seed community into the connected components it induces.
// Isolated nodes stay with the first component of their seed community.
Labels split_components(const SliceAdjacency& s, std::span<const Label> seed) {
  const std::size_t n = s.num_nodes();
  Labels out(n, kUnset);
  std::unordered_map<Label, Label> first_part;
  Label next = 0;
  std::vector<NodeId> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (out[root] != kUnset || s.degrees()[root] == 0.0) continue;
    const Label id = next++;
    first_part.try_emplace(seed[root], id);
    out[root] = id;
    stack.assign(1, static_cast<NodeId>(root));
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : s.neighbors(v)) {
        if (out[nb.node] == kUnset && seed[nb.node] == seed[root]) {
          out[nb.node] = id;
          stack.push_back(nb.node);
        }
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (out[v] != kUnset) continue;
    auto [it, inserted] = first_part.try_emplace(seed[v], next);
    if (inserted) ++next;
    out[v] = it->second;
  }
  return out;
}

void check_labels(std::size_t n, std::span<const Label> labels, const char* what) {
  if (labels.size() != n) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                " labels, got " + std::to_string(labels.size()));
  }
  for (Label c : labels) {
    if (c >= n) {
      throw std::out_of_range(std::string(what) + ": label " + std::to_string(c) +
                              " out of range [0, " + std::to_string(n) + ")");
    }
  }
}

}  // namespace

double modularity(const TemporalGraph& g, std::size_t t, std::span<const Label> labels) {
  const SliceAdjacency& s = g.slice(t);
  const std::size_t n = g.num_nodes();
  check_labels(n, labels, "modularity");
  const double total = s.total_edge_weight();
  if (total == 0.0) return 0.0;

  // Communities are summed in first-appearance order, which makes the result
  // bit-identical under any renaming of the labels.
  const Labels canon = compact_labels(labels);
  std::vector<double> internal(n, 0.0);
  std::vector<double> degree(n, 0.0);
  for (const Edge& e : s.edges()) {
    if (canon[e.i] == canon[e.j]) internal[canon[e.i]] += e.w;
  }
  for (std::size_t v = 0; v < n; ++v) degree[canon[v]] += s.degrees()[v];

  double q = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (degree[c] == 0.0) continue;
    const double frac = degree[c] / (2.0 * total);
    q += internal[c] / total - frac * frac;
  }
  if (!(q >= -0.5 - 1e-12 && q <= 1.0 + 1e-12)) {
    throw std::logic_error("modularity: Q = " + std::to_string(q) + " outside [-0.5, 1]");
  }
  return q;
}

Labels compact_labels(std::span<const Label> labels) {
  std::unordered_map<Label, Label> remap;
  Labels out(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto [it, inserted] = remap.try_emplace(labels[v], static_cast<Label>(remap.size()));
    out[v] = it->second;
  }
  return out;
}

Labels louvain_refine(const TemporalGraph& g, std::size_t t, std::span<const Label> seed) {
  const SliceAdjacency& s = g.slice(t);
  const std::size_t n = g.num_nodes();
  check_labels(n, seed, "louvain_refine");
  if (s.total_edge_weight() == 0.0) return compact_labels(seed);

  // membership[v] tracks each original node through the levels.
  Labels membership(n);
  std::iota(membership.begin(), membership.end(), Label{0});
  LevelGraph level = level_from_slice(s);
  std::vector<Label> community = split_components(s, seed);
  bool singleton_start = false;

  while (true) {
    const bool moved = local_moves(level, community);
    if (!moved && singleton_start) break;

    const Labels compact = compact_labels(community);
    const std::size_t k = compact.empty() ? 0 : *std::max_element(compact.begin(), compact.end()) + 1;
    for (Label& c : membership) c = compact[c];
    if (k == level.size()) break;  // nothing to collapse

    level = aggregate(level, compact, k);
    community.resize(k);
    std::iota(community.begin(), community.end(), Label{0});
    singleton_start = true;
  }
  return compact_labels(membership);
}

RefinedSeries refine_series(const TemporalGraph& g, const MembershipSeries& b,
                            bool parallel_slices) {
  if (b.size() != g.num_slices()) {
    throw std::invalid_argument("refine_series: membership series does not cover every slice");
  }
  RefinedSeries out;
  out.partitions.resize(b.size());
  out.modularity.resize(b.size());
  detail::for_each_index(b.size(), parallel_slices, [&](std::size_t t) {
    out.partitions[t] = louvain_refine(g, t, hard_assign(b[t]));
    out.modularity[t] = modularity(g, t, out.partitions[t]);
  });
  double sum = 0.0;
  for (double q : out.modularity) sum += q;
  out.average_modularity = b.empty() ? 0.0 : sum / static_cast<double>(b.size());
  return out;
}

}  // namespace dyncomm
