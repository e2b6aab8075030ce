#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dyncomm/temporal_graph.hpp"
#include "dyncomm/types.hpp"

namespace dyncomm {

/// Nonnegative RESCAL factors: X_t ~ A R_t A^T.
struct FactorModel {
  Matrix a;                    // N x R
  std::vector<Matrix> relations;  // T matrices, R x R

  std::size_t rank() const { return static_cast<std::size_t>(a.cols()); }
  std::size_t num_nodes() const { return static_cast<std::size_t>(a.rows()); }
  std::size_t num_slices() const { return relations.size(); }
};

struct RescalConfig {
  std::size_t rank = 16;
  double lambda_a = 0.01;
  double lambda_r = 0.01;
  std::size_t max_iters = 200;
  double rel_tol = 1e-6;
  double epsilon = 1e-12;  // added to every multiplicative-update denominator
  std::uint64_t seed = 0;
  bool parallel_slices = false;

  /// Throws std::invalid_argument unless rank >= 1, max_iters >= 1,
  /// epsilon > 0 and both lambdas are >= 0.
  void validate() const;
};

/// Entries drawn i.i.d. uniform on (0, 1]; A first (row-major), then R_1..R_T.
FactorModel init_factors(const RescalConfig& cfg, std::size_t num_nodes, std::size_t num_slices);

/// 1/2 sum_t ||X_t - A R_t A^T||_F^2 + lambda_a/2 ||A||_F^2 + lambda_r/2 sum_t ||R_t||_F^2.
///
/// Uses ||X - A R A^T||^2 = ||X||^2 - 2 <A^T X A, R> + tr(R^T G R G) with
/// G = A^T A, so no N x N matrix is ever formed. The diagonal residual is
/// included. Throws NumericError if the result is not finite.
double rescal_loss(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg);

/// One multiplicative step on A:
///
///   A <- A .* [sum_t X_t A R_t^T + X_t^T A R_t]
///          ./ [A sum_t (R_t G R_t^T + R_t^T G R_t) + lambda_a A + epsilon]
///
/// The numerator and denominator are the negative and positive parts of the
/// gradient of rescal_loss in A, so fixed points are KKT points of the
/// objective. Throws NumericError on a non-positive or non-finite denominator.
Matrix update_a(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg);

/// One multiplicative step on R_t:
///   R_t <- R_t .* (A^T X_t A) ./ (G R_t G + lambda_r R_t + epsilon).
Matrix update_r(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg,
                std::size_t t);

/// Same as above with a precomputed Gram matrix G = A^T A.
Matrix update_r(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg,
                std::size_t t, const Matrix& gram);

struct RescalFit {
  FactorModel model;
  std::vector<double> loss_history;  // initial loss, then one entry per sweep
};

/// Alternates update_a and update_r over all slices until max_iters sweeps or
/// the relative loss change drops below rel_tol.
///
/// The quartic dependence on A means a full multiplicative step can overshoot.
/// When it raises the loss, the step is damped to A .* ratio^eta with eta
/// halved until the loss no longer increases; eta -> 0 is a descent direction
/// away from fixed points, so the recorded history is non-increasing.
RescalFit fit_rescal(const TemporalGraph& g, const RescalConfig& cfg);

/// Z_t = A R_t for every slice, the per-node inputs of the community mapper.
std::vector<Matrix> slice_embeddings(const FactorModel& f);

}  // namespace dyncomm
