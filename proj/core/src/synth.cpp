#include "dyncomm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "random.hpp"

namespace dyncomm {

void DsbmConfig::validate() const {
  if (num_nodes < 1 || num_communities < 1 || num_slices < 1) {
    throw std::invalid_argument("dsbm: N, K and T must be >= 1");
  }
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    throw std::invalid_argument("dsbm: require 0 <= p_out < p_in <= 1");
  }
  if (!(churn >= 0.0 && churn <= 1.0)) throw std::invalid_argument("dsbm: churn must be in [0, 1]");
}

DsbmInstance generate_dsbm(const DsbmConfig& cfg) {
  cfg.validate();
  detail::Rng rng(cfg.seed);
  const std::size_t n = cfg.num_nodes;
  const std::size_t k = cfg.num_communities;

  DsbmInstance out;
  Labels current(n);
  for (std::size_t v = 0; v < n; ++v) current[v] = static_cast<Label>(v % k);

  const auto moved_per_step =
      static_cast<std::size_t>(std::ceil(cfg.churn * static_cast<double>(n)));
  std::vector<NodeId> order(n);
  for (std::size_t t = 0; t < cfg.num_slices; ++t) {
    if (t > 0 && k > 1) {
      // Partial Fisher-Yates picks distinct nodes.
      std::iota(order.begin(), order.end(), NodeId{0});
      for (std::size_t m = 0; m < moved_per_step; ++m) {
        const std::size_t pick = m + rng.below(n - m);
        std::swap(order[m], order[pick]);
        const NodeId v = order[m];
        const auto shift = static_cast<Label>(1 + rng.below(k - 1));
        current[v] = static_cast<Label>((current[v] + shift) % k);
      }
    }
    out.truth.push_back(current);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = current[i] == current[j] ? cfg.p_in : cfg.p_out;
        if (rng.bernoulli(p)) {
          out.events.push_back({t, static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
        }
      }
    }
  }
  out.graph = from_edge_events(out.events, n, cfg.num_slices);
  return out;
}

namespace {

// Sum of x log x terms taken in sorted order so that the result does not
// depend on how the labels are named or which argument comes first.
double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double x : terms) s += x;
  return s;
}

double entropy(const std::map<Label, std::size_t>& counts, double n) {
  std::vector<double> terms;
  terms.reserve(counts.size());
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    terms.push_back(-p * std::log(p));
  }
  return sorted_sum(std::move(terms));
}

}  // namespace

double nmi(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw std::invalid_argument("nmi: partitions differ in length");
  if (a.empty()) return 1.0;
  const double n = static_cast<double>(a.size());

  std::map<Label, std::size_t> count_a;
  std::map<Label, std::size_t> count_b;
  std::map<std::pair<Label, Label>, std::size_t> joint;
  for (std::size_t v = 0; v < a.size(); ++v) {
    ++count_a[a[v]];
    ++count_b[b[v]];
    ++joint[{a[v], b[v]}];
  }
  const double h_a = entropy(count_a, n);
  const double h_b = entropy(count_b, n);
  if (count_a.size() == 1 && count_b.size() == 1) return 1.0;
  if (count_a.size() == 1 || count_b.size() == 1) return 0.0;

  std::vector<double> terms;
  terms.reserve(joint.size());
  for (const auto& [cell, c] : joint) {
    const double nij = static_cast<double>(c);
    const double marg = static_cast<double>(count_a[cell.first]) *
                        static_cast<double>(count_b[cell.second]);
    terms.push_back(nij / n * std::log(n * nij / marg));
  }
  const double mutual = sorted_sum(std::move(terms));
  return std::clamp(2.0 * mutual / (h_a + h_b), 0.0, 1.0);
}

}  // namespace dyncomm
