#include "dyncomm/community_mapper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dyncomm/error.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace dyncomm {

namespace {

// Intermediate activations kept for the backward pass.
struct Activations {
  Matrix pre_hidden;  // N x H
  Matrix hidden;      // N x H
  Matrix output;      // N x K
};

Activations run_forward(const MlpParams& p, const Matrix& z) {
  if (static_cast<std::size_t>(z.cols()) != p.rank()) {
    throw std::invalid_argument("forward: input has " + std::to_string(z.cols()) +
                                " columns, mapper expects " + std::to_string(p.rank()));
  }
  if (!z.allFinite()) throw NumericError("forward: non-finite input");
  Activations act;
  act.pre_hidden = z * p.w1.transpose();
  act.pre_hidden.rowwise() += p.b1.transpose();
  act.hidden = act.pre_hidden.cwiseMax(0.0);
  Matrix logits = act.hidden * p.w2.transpose();
  logits.rowwise() += p.b2.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  act.output = std::move(logits);
  return act;
}

void check_series(const TemporalGraph& g, const MembershipSeries& b) {
  if (b.size() != g.num_slices()) {
    throw std::invalid_argument("membership series has " + std::to_string(b.size()) +
                                " slices, graph has " + std::to_string(g.num_slices()));
  }
  for (const Matrix& bt : b) {
    if (static_cast<std::size_t>(bt.rows()) != g.num_nodes() || bt.cols() != b.front().cols()) {
      throw std::invalid_argument("membership matrices must all be N x K");
    }
  }
}

double sum_squares(const MlpParams& p) {
  return p.w1.squaredNorm() + p.b1.squaredNorm() + p.w2.squaredNorm() + p.b2.squaredNorm();
}

void axpy(MlpParams& y, double a, const MlpParams& x) {
  y.w1 += a * x.w1;
  y.b1 += a * x.b1;
  y.w2 += a * x.w2;
  y.b2 += a * x.b2;
}

}  // namespace

MlpParams MlpParams::zeros(std::size_t rank, std::size_t hidden, std::size_t communities) {
  const auto r = static_cast<Eigen::Index>(rank);
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto k = static_cast<Eigen::Index>(communities);
  return {Matrix::Zero(h, r), Vector::Zero(h), Matrix::Zero(k, h), Vector::Zero(k)};
}

std::size_t MapperConfig::hidden_for_rank(std::size_t rank) const {
  return hidden > 0 ? hidden : 2 * std::max(rank, communities);
}

void MapperConfig::validate() const {
  if (communities < 2) throw std::invalid_argument("mapper: communities must be >= 2");
  if (epochs < 1) throw std::invalid_argument("mapper: epochs must be >= 1");
  if (!(beta >= 0.0)) throw std::invalid_argument("mapper: beta must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("mapper: learning_rate must be > 0");
  if (!(grad_clip >= 0.0)) throw std::invalid_argument("mapper: grad_clip must be >= 0");
}

MlpParams init_mlp(std::size_t rank, std::size_t hidden, std::size_t communities,
                   std::uint64_t seed) {
  MlpParams p = MlpParams::zeros(rank, hidden, communities);
  detail::Rng rng(seed);
  auto fill = [&rng](Matrix& w) {
    const double s = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-s, s);
    }
  };
  fill(p.w1);
  fill(p.w2);
  return p;
}

Matrix forward(const MlpParams& p, const Matrix& z) { return run_forward(p, z).output; }

double membership_scale_sq(const TemporalGraph& g, std::size_t t, const Matrix& b) {
  const double signal = (b.array() * slice_matmul(g, t, b).array()).sum();
  const double gram_sq = (b.transpose() * b).squaredNorm();
  return gram_sq > 0.0 ? signal / gram_sq : 0.0;
}

double mapper_loss(const TemporalGraph& g, const MembershipSeries& b, double beta) {
  check_series(g, b);
  double reconstruction = 0.0;
  for (std::size_t t = 0; t < b.size(); ++t) {
    const Matrix& bt = b[t];
    const double signal = (bt.array() * slice_matmul(g, t, bt).array()).sum();
    const double gram_sq = (bt.transpose() * bt).squaredNorm();
    const double scale_sq = gram_sq > 0.0 ? signal / gram_sq : 0.0;
    reconstruction +=
        g.slice(t).frob_sq() - 2.0 * scale_sq * signal + scale_sq * scale_sq * gram_sq;
  }
  double temporal = 0.0;
  for (std::size_t t = 1; t < b.size(); ++t) temporal += (b[t] - b[t - 1]).squaredNorm();
  return reconstruction + beta * temporal;
}

MlpParams mapper_gradients(const TemporalGraph& g, std::span<const Matrix> embeddings,
                           const MlpParams& p, double beta, bool parallel_slices) {
  const std::size_t slices = g.num_slices();
  if (embeddings.size() != slices) {
    throw std::invalid_argument("mapper_gradients: one embedding per slice required");
  }
  std::vector<Activations> acts(slices);
  detail::for_each_index(slices, parallel_slices,
                         [&](std::size_t t) { acts[t] = run_forward(p, embeddings[t]); });

  std::vector<MlpParams> per_slice(slices);
  detail::for_each_index(slices, parallel_slices, [&](std::size_t t) {
    const Matrix& b = acts[t].output;

    // d/dB of ||X - s B B^T||^2 with s = alpha^2 fixed: -4 s (X B - s B (B^T B)).
    const double s = membership_scale_sq(g, t, b);
    Matrix grad_b = -4.0 * s * (slice_matmul(g, t, b) - s * (b * (b.transpose() * b)));
    if (beta > 0.0) {
      if (t > 0) grad_b += 2.0 * beta * (b - acts[t - 1].output);
      if (t + 1 < slices) grad_b -= 2.0 * beta * (acts[t + 1].output - b);
    }

    // Softmax: dL/dlogit = B .* (dL/dB - rowsum(dL/dB .* B)).
    const Vector inner = (grad_b.array() * b.array()).rowwise().sum();
    Matrix grad_logits = b.array() * (grad_b.colwise() - inner).array();

    MlpParams& out = per_slice[t];
    out.w2 = grad_logits.transpose() * acts[t].hidden;
    out.b2 = grad_logits.colwise().sum().transpose();
    Matrix grad_hidden = grad_logits * p.w2;
    grad_hidden = (acts[t].pre_hidden.array() > 0.0).select(grad_hidden, 0.0);
    out.w1 = grad_hidden.transpose() * embeddings[t];
    out.b1 = grad_hidden.colwise().sum().transpose();
  });

  MlpParams total = MlpParams::zeros(p.rank(), p.hidden(), p.communities());
  for (const MlpParams& part : per_slice) axpy(total, 1.0, part);
  return total;
}

MlpParams mapper_gradients(const TemporalGraph& g, const FactorModel& f, const MlpParams& p,
                           double beta) {
  const std::vector<Matrix> z = slice_embeddings(f);
  return mapper_gradients(g, z, p, beta);
}

MapperFit train_mapper(const TemporalGraph& g, const FactorModel& f, const MapperConfig& cfg) {
  cfg.validate();
  if (f.num_slices() != g.num_slices() || f.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("train_mapper: factor model shape does not match graph");
  }
  const std::vector<Matrix> z = slice_embeddings(f);
  MapperFit out;
  out.params = init_mlp(f.rank(), cfg.hidden_for_rank(f.rank()), cfg.communities, cfg.seed);

  auto memberships = [&](const MlpParams& p) {
    MembershipSeries b(z.size());
    detail::for_each_index(z.size(), cfg.parallel_slices,
                           [&](std::size_t t) { b[t] = forward(p, z[t]); });
    return b;
  };
  auto checked_loss = [&](const MembershipSeries& b, std::size_t epoch) {
    const double loss = mapper_loss(g, b, cfg.beta);
    if (!std::isfinite(loss)) {
      throw NumericError("mapper: non-finite loss at epoch " + std::to_string(epoch));
    }
    return loss;
  };

  out.memberships = memberships(out.params);
  out.loss_history.push_back(checked_loss(out.memberships, 0));
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    MlpParams grad = mapper_gradients(g, z, out.params, cfg.beta, cfg.parallel_slices);
    double step = cfg.learning_rate;
    if (cfg.grad_clip > 0.0) {
      const double norm = std::sqrt(sum_squares(grad));
      if (norm > cfg.grad_clip) step *= cfg.grad_clip / norm;
    }
    axpy(out.params, -step, grad);
    out.memberships = memberships(out.params);
    out.loss_history.push_back(checked_loss(out.memberships, epoch));
  }
  return out;
}

Labels hard_assign(const Matrix& b) {
  Labels labels(static_cast<std::size_t>(b.rows()), 0);
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < b.cols(); ++c) {
      if (b(i, c) > b(i, best)) best = c;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<Label>(best);
  }
  return labels;
}

}  // namespace dyncomm
