#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tsam/linalg.hpp"
#include "tsam/ode.hpp"

namespace tsam {

/// Axis-aligned support box, closed on both ends.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vector& x) const;
  Vector sample_uniform(RandomStream& rng) const;
  /// lower + (upper − lower)/2.
  Vector center() const { return 0.5 * (lower + upper); }
};

/// A distribution with an expensive log-density log π and a cheap surrogate
/// log π*, both known up to additive constants and both −∞ outside the support.
class TwoLevelTarget {
 public:
  virtual ~TwoLevelTarget() = default;

  Eigen::Index dim() const { return support_.dim(); }
  const Box& support() const { return support_; }

  double log_pi_star(const Vector& x) const;
  double log_pi(const Vector& x) const;

  virtual std::string name() const = 0;

 protected:
  explicit TwoLevelTarget(Box support);

  /// Called only for points inside the support.
  virtual double cheap_log_density(const Vector& x) const = 0;
  virtual double expensive_log_density(const Vector& x) const = 0;

 private:
  Box support_;
};

using TargetPtr = std::shared_ptr<const TwoLevelTarget>;

/// A target assembled from two callables; used for ad hoc and test targets.
class FunctionTarget final : public TwoLevelTarget {
 public:
  using LogDensity = std::function<double(const Vector&)>;

  FunctionTarget(Box support, LogDensity cheap, LogDensity expensive, std::string name = "function");

  std::string name() const override { return name_; }

 protected:
  double cheap_log_density(const Vector& x) const override { return cheap_(x); }
  double expensive_log_density(const Vector& x) const override { return expensive_(x); }

 private:
  LogDensity cheap_;
  LogDensity expensive_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Shifted multivariate t with a Gaussian surrogate.

/// Σ_ij = σ_i σ_j ρ^|i−j|.
Matrix ar_scale_matrix(const Vector& variances, double rho);

class ShiftedTTarget final : public TwoLevelTarget {
 public:
  /// Truncated to mu ± truncation_sd·(marginal SD) per coordinate, where the
  /// marginal SD is sqrt(Σ_ii·ν/(ν−2)) for ν > 2 and sqrt(Σ_ii) otherwise.
  ShiftedTTarget(Vector mu, const Matrix& Sigma, double nu, double truncation_sd = 5.0);

  std::string name() const override { return "shifted_t"; }

  const Vector& mu() const { return shape_.mean(); }
  const Matrix& shape() const { return Sigma_; }
  double nu() const { return nu_; }
  /// Covariance of the untruncated t: Σ·ν/(ν−2). Requires ν > 2.
  Matrix covariance() const;

  /// Draws from the untruncated distribution.
  Vector sample_untruncated(RandomStream& rng) const;

 protected:
  double cheap_log_density(const Vector& x) const override { return shape_.log_density(x); }
  double expensive_log_density(const Vector& x) const override;

 private:
  Matrix Sigma_;
  double nu_;
  GaussianDensity shape_;
  double log_norm_;
};

/// d = 8, ν = 10, μ = (0,…,7), σ² = (1,1,1,1,1,2,4,6), ρ = 0.4, truncated at 5 SD.
std::shared_ptr<ShiftedTTarget> default_shifted_t_target();

// ---------------------------------------------------------------------------
// Twisted ("banana") Gaussian.

class BananaTarget final : public TwoLevelTarget {
 public:
  /// Truncated to ± truncation_sd marginal SDs of the untruncated twisted
  /// distribution around its marginal means.
  BananaTarget(Vector mu, const Matrix& Sigma, double a, double b, double truncation_sd = 5.0);

  std::string name() const override { return "banana"; }

  /// φ(x) = (a x₁, x₂/a + b a²(x₁² + 1), x₃, …, x_d).
  Vector twist(const Vector& x) const;
  /// φ⁻¹.
  Vector untwist(const Vector& y) const;

  /// True when φ(x) lies in the central region of N(μ, Σ) with probability p.
  bool in_region(const Vector& x, double p) const;

  const GaussianDensity& gaussian() const { return gaussian_; }
  double a() const { return a_; }
  double b() const { return b_; }

  /// Exact draw from the untruncated twisted distribution.
  Vector sample_untruncated(RandomStream& rng) const;

 protected:
  double cheap_log_density(const Vector& x) const override { return gaussian_.log_density(x); }
  double expensive_log_density(const Vector& x) const override { return gaussian_.log_density(twist(x)); }

 private:
  GaussianDensity gaussian_;
  double a_;
  double b_;
};

/// Region-membership test for the banana target: (φ(x)−μ)ᵀΣ⁻¹(φ(x)−μ) ≤ χ²_d(p).
bool banana_region_indicator(const Vector& x, double p, const BananaTarget& target);

/// d = 8, a = 1, b = 0.05, μ = 0, Σ = diag(10, 1, …, 1), truncated at 5 SD.
std::shared_ptr<BananaTarget> default_banana_target();

// ---------------------------------------------------------------------------
// Logistic regression with a subsampled surrogate likelihood.

struct LogisticData {
  Matrix X;                        // N × d design, intercept included
  std::vector<std::uint8_t> y;     // 0/1 responses
  std::vector<std::string> column_names;

  std::size_t n_rows() const { return y.size(); }
  std::size_t n_zeros() const;
};

/// n0 distinct zero-response row indices drawn uniformly, in increasing order.
std::vector<std::size_t> draw_zero_subsample(const LogisticData& data, std::size_t n0, std::uint64_t seed);

class LogisticTarget final : public TwoLevelTarget {
 public:
  /// The surrogate scales the subsample's zero-response sum by N₀/n₀.
  LogisticTarget(const LogisticData& data, const std::vector<std::size_t>& subsample_indices,
                 const Matrix& prior_cov, double box_halfwidth = 20.0);

  std::string name() const override { return "logistic"; }

  /// Full log-likelihood l(β).
  double log_likelihood(const Vector& beta) const;
  /// Subsampled approximation l*(β).
  double approx_log_likelihood(const Vector& beta) const;

  std::size_t n_ones() const { return static_cast<std::size_t>(X_ones_.rows()); }
  std::size_t n_zeros() const { return static_cast<std::size_t>(X_zeros_.rows()); }
  std::size_t n_subsample() const { return static_cast<std::size_t>(X_sub_.rows()); }

 protected:
  double cheap_log_density(const Vector& x) const override;
  double expensive_log_density(const Vector& x) const override;

 private:
  double ones_term(const Vector& beta) const;

  Matrix X_ones_;
  Matrix X_zeros_;
  Matrix X_sub_;
  double zero_scale_;
  GaussianDensity prior_;
};

// ---------------------------------------------------------------------------
// Lotka–Volterra calibration.

/// Annual counts of two species.
struct ObservationSet {
  std::vector<double> times;                // years, strictly increasing
  std::array<std::vector<double>, 2> counts; // prey, predator; all > 0

  std::size_t size() const { return times.size(); }
  void validate() const;
};

/// Parameter order θ = (α, β, γ, δ, σ₁, σ₂, y₁⁰, y₂⁰).
struct LVPriors {
  double alpha_max = 0.1;
  double beta_max = 0.01;
  double gamma_max = 0.1;
  double delta_max = 0.01;
  double sigma_log_mean = -1.0;
  double sigma_log_sd = 1.0;
  double y0_log_mean = 2.302585092994046;  // log 10
  double y0_log_sd = 1.0;
  /// Log-normal priors are truncated to log_mean ± this many log-SDs.
  double lognormal_truncation = 4.0;
  /// Rate parameters are per 1/rate_units_per_year of a year (12: per month).
  double rate_units_per_year = 12.0;
};

class LotkaVolterraTarget final : public TwoLevelTarget {
 public:
  LotkaVolterraTarget(ObservationSet data, SolverGrid fine, SolverGrid coarse, LVPriors priors = {},
                      Integrator integrator = Integrator::RK4);

  std::string name() const override { return "lotka_volterra"; }

  /// Log prior; −∞ outside the box.
  double log_prior(const Vector& theta) const;
  /// Log-likelihood of the data given θ solved on `grid`; −∞ on solver failure.
  double log_likelihood(const Vector& theta, const SolverGrid& grid) const;
  /// θ's rates converted to 1/year.
  LVParams rates(const Vector& theta) const;

  const ObservationSet& data() const { return data_; }
  const SolverGrid& fine_grid() const { return fine_; }
  const SolverGrid& coarse_grid() const { return coarse_; }
  const LVPriors& priors() const { return priors_; }

 protected:
  double cheap_log_density(const Vector& x) const override;
  double expensive_log_density(const Vector& x) const override;

 private:
  ObservationSet data_;
  SolverGrid fine_;
  SolverGrid coarse_;
  LVPriors priors_;
  Integrator integrator_;
  std::array<std::vector<double>, 2> log_counts_;
  double sum_log_counts_;
};

Box lotka_volterra_box(const LVPriors& priors);

}  // namespace tsam
