#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsam/linalg.hpp"
#include "tsam/samplers.hpp"
#include "tsam/targets.hpp"

namespace tsam {

/// Sample autocorrelation with the biased (divide-by-n) normalization, lags
/// 0..max_lag, ρ₀ = 1. Throws DegenerateSeriesError for a constant series.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

/// 1 + 2Σρ_k with the sum truncated by Geyer's initial positive sequence:
/// pairs ρ_{2m} + ρ_{2m+1} are accumulated until the first nonpositive pair.
double integrated_autocorrelation_time(std::span<const double> series);

/// n / (1 + 2Σρ_k), capped at n.
double ess(std::span<const double> series);

/// Effective draws per minute.
double edpm(double effective_size, double wall_minutes);

/// Every k-th element, starting with the k-th.
std::vector<double> thin(std::span<const double> series, std::size_t k);

/// A scalar summary of a chain state used for ACF/ESS.
class Projection {
 public:
  static Projection coordinate(Eigen::Index i);
  static Projection log_posterior();
  static Projection direction(Vector v, std::string label = "direction");

  std::vector<double> apply(const Trace& trace) const;
  const std::string& label() const { return label_; }

 private:
  enum class Kind { Coordinate, LogPosterior, Direction };
  Projection(Kind kind, Eigen::Index index, Vector dir, std::string label);

  Kind kind_;
  Eigen::Index index_;
  Vector dir_;
  std::string label_;
};

/// ESS of the projected retained states (thinned by `thinning`) per minute of
/// the chain's sampling wall time.
double edpm(const Trace& trace, const Projection& projection, std::size_t thinning = 1);

/// edpm(a) / edpm(b).
double redpm(const Trace& a, const Trace& b, const Projection& projection, std::size_t thinning = 1);

struct PrincipalDirections {
  Vector first;       // unit eigenvector of the largest eigenvalue
  Vector orthogonal;  // unit eigenvector of the second largest eigenvalue
};

/// Sign convention: the largest-magnitude entry of each vector is positive.
PrincipalDirections principal_projection(const Matrix& covariance);
/// Uses the sample covariance of the retained states.
PrincipalDirections principal_projection(const Trace& trace);

struct ReplicateSummary {
  std::int64_t n = 0;
  double mean = 0.0;
  double sd = 0.0;                 // across replicates, divisor m − 1
  std::vector<double> estimates;   // one per replicate
};

using StateFunction = std::function<double(const Vector&)>;

/// For each n, runs m chains (replicate k seeded with base.seed + k) whose
/// length leaves n states after burn-in and averages f over the last n
/// retained states of each. Chains are spread over `workers` threads.
std::vector<ReplicateSummary> mc_estimate_experiment(const TwoLevelTarget& target, const SamplerConfig& base,
                                                     const StateFunction& f, int m,
                                                     const std::vector<std::int64_t>& n_list, int workers = 1);

/// mc_estimate_experiment with f the indicator of the banana region of probability p.
std::vector<ReplicateSummary> coverage_experiment(const BananaTarget& target, const SamplerConfig& base, double p,
                                                  int m, const std::vector<std::int64_t>& n_list, int workers = 1);

/// Chain length whose post-burn-in part holds at least n states.
std::int64_t chain_length_for(std::int64_t n, double burn_in_fraction);

}  // namespace tsam
