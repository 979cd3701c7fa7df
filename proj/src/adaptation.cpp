#include "tsam/adaptation.hpp"

#include <cmath>
#include <stdexcept>

#include "tsam/targets.hpp"

namespace tsam {

void AdaptationConfig::validate(Eigen::Index d) const {
  if (C0.rows() != d || C0.cols() != d) throw std::invalid_argument("adaptation: C0 has the wrong dimension");
  if (t0 <= 0) throw std::invalid_argument("adaptation: t0 must be positive");
  if (!(s_d > 0.0)) throw std::invalid_argument("adaptation: s_d must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("adaptation: epsilon must be positive");
  if (K <= 0) throw std::invalid_argument("adaptation: K must be positive");
}

AdaptationConfig default_adaptation_config(Eigen::Index d, const Box& support, double c) {
  if (d < 1) throw std::invalid_argument("default_adaptation_config: d must be at least 1");
  if (!(c > 0.0)) throw std::invalid_argument("default_adaptation_config: c must be positive");
  AdaptationConfig cfg;
  cfg.s_d = 2.4 * 2.4 / static_cast<double>(d);
  cfg.C0 = c * cfg.s_d * Matrix::Identity(d, d);
  cfg.t0 = 100;
  cfg.K = 1;
  const double side = (support.upper - support.lower).minCoeff();
  cfg.epsilon = 1e-6 * side * side;
  return cfg;
}

AdaptationState::AdaptationState(Eigen::Index d, AdaptationConfig config)
    : config_((config.validate(d), std::move(config))),
      mean_(Vector::Zero(d)),
      scatter_(Matrix::Zero(d, d)),
      c0_factor_(cholesky(config_.C0)),
      factor_(c0_factor_) {
  pending_.reserve(static_cast<std::size_t>(config_.K));
}

void AdaptationState::absorb(const Vector& x_new) {
  if (x_new.size() != dim()) throw std::invalid_argument("absorb: dimension mismatch");
  pending_.push_back(x_new);
  if (static_cast<std::int64_t>(pending_.size()) >= config_.K) refresh();
}

void AdaptationState::refresh() {
  const std::int64_t t_before = t_;
  std::vector<Vector> updates;
  updates.reserve(pending_.size());
  for (const Vector& x : pending_) {
    ++t_;
    const double n = static_cast<double>(t_);
    Vector delta = x - mean_;
    mean_ += delta / n;
    delta *= std::sqrt((n - 1.0) / n);
    scatter_.selfadjointView<Eigen::Lower>().rankUpdate(delta);
    updates.push_back(std::move(delta));
  }
  pending_.clear();
  scatter_.triangularView<Eigen::StrictlyUpper>() = scatter_.transpose();

  if (t_ < config_.t0) {
    factor_ = c0_factor_;
    adapting_ = false;
    return;
  }
  const auto d = static_cast<std::size_t>(dim());
  if (!adapting_ || t_before < 2 || updates.size() > d) {
    factor_ = cholesky(adaptive_covariance());
    adapting_ = true;
    ++full_refactorizations_;
    return;
  }
  const double a = static_cast<double>(t_before - 1) / static_cast<double>(t_ - 1);
  factor_.scale(std::sqrt(a));
  const double data_scale = std::sqrt(config_.s_d / static_cast<double>(t_ - 1));
  for (const Vector& u : updates) factor_.update(data_scale * u);
  const double jitter = std::sqrt(config_.s_d * config_.epsilon * (1.0 - a));
  Vector e = Vector::Zero(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    e(i) = jitter;
    factor_.update(e);
    e(i) = 0.0;
  }
}

Matrix AdaptationState::raw_cov() const {
  if (t_ < 2) return Matrix::Zero(dim(), dim());
  return scatter_ / static_cast<double>(t_ - 1);
}

Matrix AdaptationState::adaptive_covariance() const {
  return config_.s_d * raw_cov() + config_.s_d * config_.epsilon * Matrix::Identity(dim(), dim());
}

Matrix AdaptationState::proposal_covariance() const {
  return adapting_ ? adaptive_covariance() : config_.C0;
}

}  // namespace tsam
