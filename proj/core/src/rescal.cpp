#include "dyncomm/rescal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dyncomm/error.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace dyncomm {

namespace {

void check_shapes(const TemporalGraph& g, const FactorModel& f) {
  if (f.num_nodes() != g.num_nodes() || f.num_slices() != g.num_slices()) {
    throw std::invalid_argument("factor model shape does not match graph (N=" +
                                std::to_string(g.num_nodes()) +
                                ", T=" + std::to_string(g.num_slices()) + ")");
  }
  for (const Matrix& r : f.relations) {
    if (r.rows() != f.a.cols() || r.cols() != f.a.cols()) {
      throw std::invalid_argument("relation matrix is not R x R");
    }
  }
}

Matrix multiplicative_step(const Matrix& current, const Matrix& numer, const Matrix& denom,
                           const char* what) {
  Matrix out(current.rows(), current.cols());
  for (Eigen::Index r = 0; r < current.rows(); ++r) {
    for (Eigen::Index c = 0; c < current.cols(); ++c) {
      const double d = denom(r, c);
      if (!(d > 0.0) || !std::isfinite(d) || !std::isfinite(numer(r, c))) {
        throw NumericError(std::string(what) + ": invalid denominator at (" + std::to_string(r) +
                           ", " + std::to_string(c) + ")");
      }
      out(r, c) = current(r, c) * (numer(r, c) / d);
    }
  }
  return out;
}

struct StepTerms {
  Matrix numer;
  Matrix denom;
};

StepTerms a_step_terms(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg) {
  const Matrix& a = f.a;
  const Matrix gram = a.transpose() * a;
  const Eigen::Index rank = a.cols();
  Matrix numer = Matrix::Zero(a.rows(), rank);
  Matrix sandwich = Matrix::Zero(rank, rank);
  for (std::size_t t = 0; t < g.num_slices(); ++t) {
    const Matrix& r = f.relations[t];
    const Matrix xa = slice_matmul(g, t, a);
    // X_t is symmetric, so X_t^T A = X_t A; both numerator terms are kept.
    numer.noalias() += xa * r.transpose();
    numer.noalias() += xa * r;
    sandwich.noalias() += r * gram * r.transpose();
    sandwich.noalias() += r.transpose() * gram * r;
  }
  Matrix denom = a * sandwich;
  denom += cfg.lambda_a * a;
  denom.array() += cfg.epsilon;
  return {std::move(numer), std::move(denom)};
}

}  // namespace

void RescalConfig::validate() const {
  if (rank < 1) throw std::invalid_argument("rescal: rank must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("rescal: max_iters must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("rescal: epsilon must be > 0");
  if (!(lambda_a >= 0.0) || !(lambda_r >= 0.0)) {
    throw std::invalid_argument("rescal: regularization weights must be >= 0");
  }
  if (!(rel_tol >= 0.0)) throw std::invalid_argument("rescal: rel_tol must be >= 0");
}

FactorModel init_factors(const RescalConfig& cfg, std::size_t num_nodes, std::size_t num_slices) {
  cfg.validate();
  detail::Rng rng(cfg.seed);
  const auto n = static_cast<Eigen::Index>(num_nodes);
  const auto rank = static_cast<Eigen::Index>(cfg.rank);
  FactorModel f;
  f.a.resize(n, rank);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < rank; ++c) f.a(i, c) = rng.uniform_positive();
  }
  f.relations.assign(num_slices, Matrix(rank, rank));
  for (Matrix& r : f.relations) {
    for (Eigen::Index i = 0; i < rank; ++i) {
      for (Eigen::Index c = 0; c < rank; ++c) r(i, c) = rng.uniform_positive();
    }
  }
  return f;
}

double rescal_loss(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg) {
  check_shapes(g, f);
  const Matrix gram = f.a.transpose() * f.a;
  double residual = 0.0;
  double relation_sq = 0.0;
  for (std::size_t t = 0; t < g.num_slices(); ++t) {
    const Matrix& r = f.relations[t];
    const Matrix projected = f.a.transpose() * slice_matmul(g, t, f.a);
    const double cross = (projected.array() * r.array()).sum();
    const Matrix gr = gram * r;
    const Matrix rg = r * gram;
    const double quad = (gr.array() * rg.array()).sum();
    residual += g.slice(t).frob_sq() - 2.0 * cross + quad;
    relation_sq += r.squaredNorm();
  }
  const double loss =
      0.5 * residual + 0.5 * cfg.lambda_a * f.a.squaredNorm() + 0.5 * cfg.lambda_r * relation_sq;
  if (!std::isfinite(loss)) throw NumericError("rescal_loss: non-finite loss");
  return loss;
}

Matrix update_a(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg) {
  check_shapes(g, f);
  const StepTerms terms = a_step_terms(g, f, cfg);
  return multiplicative_step(f.a, terms.numer, terms.denom, "update_a");
}

Matrix update_r(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg,
                std::size_t t) {
  check_shapes(g, f);
  return update_r(g, f, cfg, t, f.a.transpose() * f.a);
}

Matrix update_r(const TemporalGraph& g, const FactorModel& f, const RescalConfig& cfg,
                std::size_t t, const Matrix& gram) {
  const Matrix& r = f.relations.at(t);
  const Matrix numer = f.a.transpose() * slice_matmul(g, t, f.a);
  Matrix denom = gram * r * gram;
  denom += cfg.lambda_r * r;
  denom.array() += cfg.epsilon;
  return multiplicative_step(r, numer, denom, "update_r");
}

RescalFit fit_rescal(const TemporalGraph& g, const RescalConfig& cfg) {
  cfg.validate();
  RescalFit out{init_factors(cfg, g.num_nodes(), g.num_slices()), {}};
  FactorModel& f = out.model;
  auto& history = out.loss_history;
  history.push_back(rescal_loss(g, f, cfg));

  constexpr int kMaxHalvings = 40;
  for (std::size_t sweep = 1; sweep <= cfg.max_iters; ++sweep) {
    try {
      const double before = history.back();
      const double slack = 1e-12 * std::abs(before);
      const StepTerms terms = a_step_terms(g, f, cfg);
      const Matrix full = multiplicative_step(f.a, terms.numer, terms.denom, "update_a");

      FactorModel trial = f;
      trial.a = full;
      if (rescal_loss(g, trial, cfg) > before + slack) {
        const Eigen::ArrayXXd log_ratio = (full.array() / f.a.array()).log();
        bool accepted = false;
        double eta = 0.5;
        for (int h = 0; h < kMaxHalvings && !accepted; ++h, eta *= 0.5) {
          // Entries of A that are exactly zero stay zero (log_ratio is NaN there).
          trial.a = (f.a.array() * (eta * log_ratio).exp()).matrix();
          trial.a = (f.a.array() > 0.0).select(trial.a, 0.0);
          accepted = rescal_loss(g, trial, cfg) <= before + slack;
        }
        if (!accepted) trial.a = f.a;
      }
      f.a = std::move(trial.a);

      const Matrix gram = f.a.transpose() * f.a;
      std::vector<Matrix> next(g.num_slices());
      detail::for_each_index(g.num_slices(), cfg.parallel_slices,
                             [&](std::size_t t) { next[t] = update_r(g, f, cfg, t, gram); });
      f.relations = std::move(next);

      history.push_back(rescal_loss(g, f, cfg));
    } catch (const NumericError& e) {
      throw NumericError("rescal sweep " + std::to_string(sweep) + ": " + e.what());
    }

    const double prev = history[history.size() - 2];
    const double change = std::abs(history.back() - prev) / std::max(prev, cfg.epsilon);
    if (change < cfg.rel_tol) break;
  }
  return out;
}

std::vector<Matrix> slice_embeddings(const FactorModel& f) {
  std::vector<Matrix> z;
  z.reserve(f.relations.size());
  for (const Matrix& r : f.relations) z.push_back(f.a * r);
  return z;
}

}  // namespace dyncomm
