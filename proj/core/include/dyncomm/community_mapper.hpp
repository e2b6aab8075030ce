#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dyncomm/rescal.hpp"
#include "dyncomm/temporal_graph.hpp"
#include "dyncomm/types.hpp"

namespace dyncomm {

/// Two-layer perceptron f(z) = softmax(W2 relu(W1 z + b1) + b2).
struct MlpParams {
  Matrix w1;  // H x R
  Vector b1;  // H
  Matrix w2;  // K x H
  Vector b2;  // K

  std::size_t rank() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t communities() const { return static_cast<std::size_t>(w2.rows()); }

  static MlpParams zeros(std::size_t rank, std::size_t hidden, std::size_t communities);
};

struct MapperConfig {
  std::size_t hidden = 0;  // 0 selects 2 * max(R, K)
  std::size_t communities = 0;
  double beta = 0.1;
  double learning_rate = 0.01;
  std::size_t epochs = 300;
  double grad_clip = 5.0;  // max global gradient norm, 0 disables clipping
  std::uint64_t seed = 0;
  bool parallel_slices = false;

  std::size_t hidden_for_rank(std::size_t rank) const;
  /// Throws std::invalid_argument unless K >= 2, epochs >= 1, beta >= 0,
  /// learning_rate > 0 and grad_clip >= 0.
  void validate() const;
};

/// Glorot-uniform weights, zero biases. Deterministic given seed.
MlpParams init_mlp(std::size_t rank, std::size_t hidden, std::size_t communities,
                   std::uint64_t seed);

/// Row-wise forward pass over an N x R input; returns N x K row-stochastic output.
/// Throws NumericError on non-finite input.
Matrix forward(const MlpParams& p, const Matrix& z);

/// Per-slice magnitude alpha_t^2 = tr(B^T X_t B) / ||B^T B||_F^2, the least
/// squares scale of B B^T against X_t. The normalized indicator is alpha_t B_t.
double membership_scale_sq(const TemporalGraph& g, std::size_t t, const Matrix& b);

/// sum_t ||X_t - alpha_t^2 B_t B_t^T||_F^2 + beta sum_{t>=1} ||B_t - B_{t-1}||_F^2,
/// evaluated without materializing N x N matrices.
double mapper_loss(const TemporalGraph& g, const MembershipSeries& b, double beta);

/// Gradient of mapper_loss(forward(p, Z_t)) with respect to every parameter.
///
/// alpha_t is held fixed while differentiating. It is the exact minimizer of
/// the reconstruction term over the scale, so the resulting gradient equals
/// the total derivative.
MlpParams mapper_gradients(const TemporalGraph& g, std::span<const Matrix> embeddings,
                           const MlpParams& p, double beta, bool parallel_slices = false);

MlpParams mapper_gradients(const TemporalGraph& g, const FactorModel& f, const MlpParams& p,
                           double beta);

struct MapperFit {
  MlpParams params;
  MembershipSeries memberships;
  std::vector<double> loss_history;  // initial loss, then one entry per epoch
};

/// Full-batch gradient descent on mapper_loss with the factor model held fixed.
/// Throws NumericError naming the epoch if the loss becomes non-finite.
MapperFit train_mapper(const TemporalGraph& g, const FactorModel& f, const MapperConfig& cfg);

/// Row-wise argmax; ties go to the lowest community index.
Labels hard_assign(const Matrix& b);

}  // namespace dyncomm
