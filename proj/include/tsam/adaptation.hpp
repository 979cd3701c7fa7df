#pragma once

#include <cstdint>
#include <vector>

#include "tsam/linalg.hpp"

namespace tsam {

struct Box;

struct AdaptationConfig {
  Matrix C0;               // proposal covariance while fewer than t0 states are absorbed
  std::int64_t t0 = 100;
  double s_d = 0.0;        // scale applied to the empirical covariance
  double epsilon = 0.0;    // jitter; proposal covariance ≥ s_d·epsilon·I once adapting
  std::int64_t K = 1;      // absorb pending states and refresh the factor every K-th call

  /// Throws std::invalid_argument on an unusable configuration.
  void validate(Eigen::Index d) const;
};

/// s_d = 2.4²/d, C0 = c·s_d·I, t0 = 100, K = 1 and epsilon = 1e-6 times the
/// squared length of the box's shortest side.
AdaptationConfig default_adaptation_config(Eigen::Index d, const Box& support, double c = 1.0);

/// Running mean and empirical covariance of the chain history together with
/// the Cholesky factor of the adaptive proposal covariance
///
///   C_t = C0                            if t < t0
///   C_t = s_d·cov(x_0..x_{t-1}) + s_d·epsilon·I   otherwise,
///
/// where t is the number of absorbed states and cov uses divisor t − 1.
///
/// Mean and scatter are updated with Welford's recursion. Between refreshes
/// the factor follows C_{t'} = a·C_t + (s_d/(t'−1))·Σ w_k v_k v_kᵀ + s_d·epsilon·(1−a)·I
/// with a = (t−1)/(t'−1): a rescale, one rank-one update per absorbed state and
/// d axis-aligned rank-one updates for the jitter. When a refresh would need more
/// than d data updates the factor is recomputed from scratch instead.
class AdaptationState {
 public:
  AdaptationState(Eigen::Index d, AdaptationConfig config);

  /// Queues x_new; every K-th call folds the queue into the statistics and
  /// refreshes the proposal factor.
  void absorb(const Vector& x_new);

  const CholeskyFactor& proposal_factor() const { return factor_; }
  /// Covariance the current factor represents, computed from the statistics.
  Matrix proposal_covariance() const;

  /// Number of states folded into mean/raw_cov (excludes pending).
  std::int64_t t() const { return t_; }
  const Vector& mean() const { return mean_; }
  /// Unscaled empirical covariance with divisor t − 1; zero for t < 2.
  Matrix raw_cov() const;
  const std::vector<Vector>& pending() const { return pending_; }
  const AdaptationConfig& config() const { return config_; }
  Eigen::Index dim() const { return mean_.size(); }
  /// Number of from-scratch factorizations performed so far.
  std::int64_t full_refactorizations() const { return full_refactorizations_; }

 private:
  void refresh();
  Matrix adaptive_covariance() const;

  AdaptationConfig config_;
  std::int64_t t_ = 0;
  Vector mean_;
  Matrix scatter_;  // Σ (x_i − mean)(x_i − mean)ᵀ
  std::vector<Vector> pending_;
  CholeskyFactor c0_factor_;
  CholeskyFactor factor_;
  bool adapting_ = false;
  std::int64_t full_refactorizations_ = 0;
};

}  // namespace tsam
