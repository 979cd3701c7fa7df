#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsam/adaptation.hpp"
#include "tsam/linalg.hpp"
#include "tsam/random.hpp"
#include "tsam/targets.hpp"

namespace tsam {

enum class Kernel { MH, TSMH, AM, TSAM };

std::string to_string(Kernel k);
/// Accepts "MH", "TSMH", "AM", "TSAM" (case-insensitive).
Kernel kernel_from_string(const std::string& s);
bool is_two_stage(Kernel k);
bool is_adaptive(Kernel k);

struct ChainState {
  Vector x;
  double log_pi_star = 0.0;  // NaN for single-stage kernels, which never evaluate π*
  double log_pi = 0.0;
  std::int64_t t = 0;
};

struct StepOutcome {
  ChainState next;
  bool stage1_accepted = false;
  bool stage2_accepted = false;  // for single-stage kernels: the single decision
  int expensive_evals = 0;
  int cheap_evals = 0;
  int failed_evals = 0;          // evaluations that raised TargetEvaluationError
};

struct SamplerConfig {
  Kernel kernel = Kernel::TSAM;
  AdaptationConfig adaptation;
  /// Proposal covariance of the fixed-covariance kernels (MH, TSMH).
  Matrix fixed_cov;
  std::int64_t n_iters = 10000;
  double burn_in_fraction = 0.5;
  std::int64_t thinning = 1;
  std::uint64_t seed = 1;
  /// Initial state; uniform over the support when absent.
  std::optional<Vector> initial;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate(Eigen::Index d) const;
  std::int64_t burn_in() const;
};

/// Adaptation defaults for the target's support, fixed covariance 2.4²/d·I,
/// burn-in half the chain.
SamplerConfig default_sampler_config(const TwoLevelTarget& target, Kernel kernel, std::int64_t n_iters,
                                     std::uint64_t seed);

/// min(1, exp(log π*(x*) − log π*(x))); 0 when the proposal has −∞ log density.
double stage1_accept_prob(double log_pi_star_current, double log_pi_star_proposal);

/// min(1, exp((log π(x) − log π(x_prev)) + (log π*(x_prev) − log π*(x)))).
double stage2_accept_prob(double log_pi_current, double log_pi_proposal, double log_pi_star_current,
                          double log_pi_star_proposal);

/// min(1, exp(log π(x*) − log π(x))).
double metropolis_accept_prob(double log_pi_current, double log_pi_proposal);

/// Evaluates both densities at x; used to seed a two-stage chain.
ChainState make_state(const TwoLevelTarget& target, const Vector& x, bool two_stage);

/// Two-stage step with a fixed proposal factor.
StepOutcome tsmh_step(const ChainState& state, const CholeskyFactor& factor, const TwoLevelTarget& target,
                      ChainStreams& rng);

/// Random-walk Metropolis step with a fixed proposal factor.
StepOutcome mh_step(const ChainState& state, const CholeskyFactor& factor, const TwoLevelTarget& target,
                    ChainStreams& rng);

/// Two-stage step with the adaptive proposal; the realized state is absorbed into `adapt`.
StepOutcome tsam_step(const ChainState& state, AdaptationState& adapt, const TwoLevelTarget& target,
                      ChainStreams& rng);

/// Adaptive Metropolis step; the realized state is absorbed into `adapt`.
StepOutcome am_step(const ChainState& state, AdaptationState& adapt, const TwoLevelTarget& target,
                    ChainStreams& rng);

struct ChainCounters {
  std::int64_t iterations = 0;
  std::int64_t stage1_accepts = 0;
  std::int64_t accepts = 0;          // moves to the proposal
  std::int64_t expensive_evals = 0;  // includes the initial state
  std::int64_t cheap_evals = 0;      // includes the initial state for two-stage kernels
  std::int64_t failed_evals = 0;
};

/// One retained state of a chain.
struct TraceRow {
  std::int64_t iter = 0;
  Vector x;
  double log_pi = 0.0;
  bool stage1_accepted = false;
  bool stage2_accepted = false;
  bool expensive_eval = false;
};

struct Trace {
  std::vector<TraceRow> rows;  // post burn-in, post thinning
  ChainCounters counters;
  double wall_seconds = 0.0;   // sampling only
  SamplerConfig config;
  Eigen::Index dim = 0;

  double wall_minutes() const { return wall_seconds / 60.0; }
  std::size_t size() const { return rows.size(); }
  /// Coordinate `i` of the retained states.
  std::vector<double> coordinate(Eigen::Index i) const;
  std::vector<double> log_pi_series() const;
  /// vᵀx for each retained state.
  std::vector<double> projected(const Vector& v) const;
  /// Retained states as rows of a matrix.
  Matrix states() const;
};

/// Runs a chain from the configured (or uniformly drawn) initial state.
/// Deterministic given config.seed.
Trace run_chain(const TwoLevelTarget& target, const SamplerConfig& config);

}  // namespace tsam
