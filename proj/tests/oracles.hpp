#pragma once

// Independent reference implementations used only by tests. Everything here
// works on dense N x N matrices or exhaustive enumeration and shares no code
// path with the sparse library routines it checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "dyncomm/community_mapper.hpp"
#include "dyncomm/rescal.hpp"
#include "dyncomm/temporal_graph.hpp"

namespace dyncomm::oracle {

inline Matrix dense_slice(const TemporalGraph& g, std::size_t t) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix x = Matrix::Zero(n, n);
  for (const Edge& e : g.slice(t).edges()) {
    x(e.i, e.j) += e.w;
    x(e.j, e.i) += e.w;
  }
  return x;
}

inline double dense_rescal_loss(const TemporalGraph& g, const FactorModel& f,
                                const RescalConfig& cfg) {
  double loss = 0.5 * cfg.lambda_a * f.a.squaredNorm();
  for (std::size_t t = 0; t < g.num_slices(); ++t) {
    const Matrix residual = dense_slice(g, t) - f.a * f.relations[t] * f.a.transpose();
    loss += 0.5 * residual.squaredNorm() + 0.5 * cfg.lambda_r * f.relations[t].squaredNorm();
  }
  return loss;
}

// Textbook two-term numerator with an explicit X^T.
inline Matrix dense_a_numerator(const TemporalGraph& g, const FactorModel& f) {
  Matrix numer = Matrix::Zero(f.a.rows(), f.a.cols());
  for (std::size_t t = 0; t < g.num_slices(); ++t) {
    const Matrix x = dense_slice(g, t);
    const Matrix& r = f.relations[t];
    numer += x * f.a * r.transpose() + x.transpose() * f.a * r;
  }
  return numer;
}

inline Matrix dense_update_a(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg) {
  const Matrix& a = f.a;
  Matrix denom = cfg.lambda_a * a;
  for (std::size_t t = 0; t < g.num_slices(); ++t) {
    const Matrix& r = f.relations[t];
    denom += a * r * a.transpose() * a * r.transpose() + a * r.transpose() * a.transpose() * a * r;
  }
  denom.array() += cfg.epsilon;
  return (a.array() * dense_a_numerator(g, f).array() / denom.array()).matrix();
}

inline Matrix dense_update_r(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg,
                             std::size_t t) {
  const Matrix& a = f.a;
  const Matrix& r = f.relations[t];
  const Matrix numer = a.transpose() * dense_slice(g, t) * a;
  Matrix denom = a.transpose() * a * r * a.transpose() * a + cfg.lambda_r * r;
  denom.array() += cfg.epsilon;
  return (r.array() * numer.array() / denom.array()).matrix();
}

// Reconstruction scale by direct 1-D least squares on the dense matrices.
inline double dense_mapper_loss(const TemporalGraph& g, const MembershipSeries& b, double beta) {
  double loss = 0.0;
  for (std::size_t t = 0; t < b.size(); ++t) {
    const Matrix x = dense_slice(g, t);
    const Matrix bbt = b[t] * b[t].transpose();
    const double s = (x.array() * bbt.array()).sum() / bbt.squaredNorm();
    loss += (x - s * bbt).squaredNorm();
  }
  for (std::size_t t = 1; t < b.size(); ++t) loss += beta * (b[t] - b[t - 1]).squaredNorm();
  return loss;
}

// Double sum over all node pairs.
inline double dense_modularity(const TemporalGraph& g, std::size_t t, const Labels& labels) {
  const Matrix x = dense_slice(g, t);
  const Eigen::VectorXd d = x.rowwise().sum();
  const double two_l = d.sum();
  if (two_l == 0.0) return 0.0;
  double q = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (labels[i] == labels[j]) q += x(i, j) - d(i) * d(j) / two_l;
    }
  }
  return q / two_l;
}

// Calls fn on every set partition of {0..n-1} as a restricted growth string.
inline void for_each_partition(std::size_t n, const std::function<void(const Labels&)>& fn) {
  if (n == 0) return;
  Labels rgs(n, 0);
  std::vector<Label> max_prefix(n, 0);
  while (true) {
    fn(rgs);
    std::size_t i = n - 1;
    while (i > 0 && rgs[i] == max_prefix[i - 1] + 1) --i;
    if (i == 0) return;
    ++rgs[i];
    max_prefix[i] = std::max(max_prefix[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      max_prefix[j] = max_prefix[i];
    }
  }
}

inline double brute_force_max_modularity(const TemporalGraph& g, std::size_t t) {
  double best = -1.0;
  for_each_partition(g.num_nodes(), [&](const Labels& p) { best = std::max(best, dense_modularity(g, t, p)); });
  return best;
}

// Erdos-Renyi slices with optional real weights; test-side RNG.
inline TemporalGraph random_graph(std::size_t n, std::size_t slices, double p, std::uint64_t seed,
                                  bool weighted = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EdgeEvent> events;
  for (std::size_t t = 0; t < slices; ++t) {
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (u(rng) < p) events.push_back({t, i, j, weighted ? 0.1 + 2.0 * u(rng) : 1.0});
      }
    }
  }
  return from_edge_events(events, n, slices);
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                            double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline double relative_error(const Matrix& got, const Matrix& want) {
  const double scale = want.norm();
  return scale == 0.0 ? got.norm() : (got - want).norm() / scale;
}

// Every scalar parameter of the mapper, in a fixed order.
inline std::vector<double*> coordinates(MlpParams& p) {
  std::vector<double*> out;
  for (Matrix* m : {&p.w1, &p.w2}) {
    for (Eigen::Index k = 0; k < m->size(); ++k) out.push_back(m->data() + k);
  }
  for (Vector* v : {&p.b1, &p.b2}) {
    for (Eigen::Index k = 0; k < v->size(); ++k) out.push_back(v->data() + k);
  }
  return out;
}

inline double loss_at(const TemporalGraph& g, const std::vector<Matrix>& z, const MlpParams& p,
                      double beta) {
  MembershipSeries b;
  for (const Matrix& zt : z) b.push_back(forward(p, zt));
  return dense_mapper_loss(g, b, beta);
}

struct GradientCheck {
  double worst_relative_error = 0.0;
  std::size_t coordinates = 0;
};

// Central differences of the dense loss oracle, compared coordinate-wise with
// `analytic`. Coordinates where both values are below abs_floor count as
// agreeing (relative error is meaningless at zero).
inline GradientCheck finite_difference_check(const TemporalGraph& g, const std::vector<Matrix>& z,
                                             MlpParams p, const MlpParams& analytic, double beta,
                                             double step = 1e-5, double abs_floor = 1e-7) {
  MlpParams grad = analytic;
  const std::vector<double*> params = coordinates(p);
  const std::vector<double*> grads = coordinates(grad);
  GradientCheck out;
  out.coordinates = params.size();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = *params[k];
    *params[k] = saved + step;
    const double up = loss_at(g, z, p, beta);
    *params[k] = saved - step;
    const double down = loss_at(g, z, p, beta);
    *params[k] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double exact = *grads[k];
    const double scale = std::max(std::abs(numeric), std::abs(exact));
    if (scale < abs_floor) continue;
    out.worst_relative_error = std::max(out.worst_relative_error, std::abs(numeric - exact) / scale);
  }
  return out;
}

}  // namespace dyncomm::oracle
