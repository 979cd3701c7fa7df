#include "tsam/samplers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tsam/errors.hpp"

namespace tsam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxInitialDraws = 10000;

/// exp(min(0, log_ratio)), with −∞ and NaN mapped to 0.
double accept_from_log_ratio(double log_ratio) {
  if (std::isnan(log_ratio) || log_ratio == kNegInf) return 0.0;
  if (log_ratio >= 0.0) return 1.0;
  return std::exp(log_ratio);
}

template <typename F>
double guarded(F&& eval, int& failures) {
  try {
    return eval();
  } catch (const TargetEvaluationError&) {
    ++failures;
    return kNegInf;
  }
}

StepOutcome two_stage_transition(const ChainState& state, const CholeskyFactor& factor,
                                 const TwoLevelTarget& target, ChainStreams& rng) {
  StepOutcome out;
  const Vector proposal = mvn_sample(state.x, factor, rng.proposal);
  const double lps = guarded([&] { return target.log_pi_star(proposal); }, out.failed_evals);
  out.cheap_evals = 1;
  const double a1 = stage1_accept_prob(state.log_pi_star, lps);
  if (!(rng.stage1.uniform() < a1)) {
    out.next = state;
    ++out.next.t;
    return out;
  }
  out.stage1_accepted = true;
  const double lp = guarded([&] { return target.log_pi(proposal); }, out.failed_evals);
  out.expensive_evals = 1;
  const double a2 = stage2_accept_prob(state.log_pi, lp, state.log_pi_star, lps);
  if (rng.stage2.uniform() < a2) {
    out.stage2_accepted = true;
    out.next = ChainState{proposal, lps, lp, state.t + 1};
  } else {
    out.next = state;
    ++out.next.t;
  }
  return out;
}

StepOutcome metropolis_transition(const ChainState& state, const CholeskyFactor& factor,
                                  const TwoLevelTarget& target, ChainStreams& rng) {
  StepOutcome out;
  const Vector proposal = mvn_sample(state.x, factor, rng.proposal);
  const double lp = guarded([&] { return target.log_pi(proposal); }, out.failed_evals);
  out.expensive_evals = 1;
  const double a = metropolis_accept_prob(state.log_pi, lp);
  if (rng.stage1.uniform() < a) {
    out.stage1_accepted = out.stage2_accepted = true;
    out.next = ChainState{proposal, kNaN, lp, state.t + 1};
  } else {
    out.next = state;
    ++out.next.t;
  }
  return out;
}

}  // namespace

std::string to_string(Kernel k) {
  switch (k) {
    case Kernel::MH: return "MH";
    case Kernel::TSMH: return "TSMH";
    case Kernel::AM: return "AM";
    case Kernel::TSAM: return "TSAM";
  }
  return "?";
}

Kernel kernel_from_string(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "MH") return Kernel::MH;
  if (u == "TSMH") return Kernel::TSMH;
  if (u == "AM") return Kernel::AM;
  if (u == "TSAM") return Kernel::TSAM;
  throw std::invalid_argument("unknown kernel '" + s + "'");
}

bool is_two_stage(Kernel k) { return k == Kernel::TSMH || k == Kernel::TSAM; }
bool is_adaptive(Kernel k) { return k == Kernel::AM || k == Kernel::TSAM; }

void SamplerConfig::validate(Eigen::Index d) const {
  if (n_iters <= 0) throw std::invalid_argument("sampler: n_iters must be positive");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw std::invalid_argument("sampler: burn_in_fraction must lie in [0, 1)");
  }
  if (thinning < 1) throw std::invalid_argument("sampler: thinning must be at least 1");
  if (is_adaptive(kernel)) adaptation.validate(d);
  if (!is_adaptive(kernel) && (fixed_cov.rows() != d || fixed_cov.cols() != d)) {
    throw std::invalid_argument("sampler: fixed_cov has the wrong dimension");
  }
  if (initial && initial->size() != d) throw std::invalid_argument("sampler: initial state has the wrong dimension");
}

std::int64_t SamplerConfig::burn_in() const {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(n_iters) * burn_in_fraction));
}

SamplerConfig default_sampler_config(const TwoLevelTarget& target, Kernel kernel, std::int64_t n_iters,
                                     std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.kernel = kernel;
  cfg.adaptation = default_adaptation_config(target.dim(), target.support());
  cfg.fixed_cov = cfg.adaptation.s_d * Matrix::Identity(target.dim(), target.dim());
  cfg.n_iters = n_iters;
  cfg.seed = seed;
  return cfg;
}

double stage1_accept_prob(double log_pi_star_current, double log_pi_star_proposal) {
  return accept_from_log_ratio(log_pi_star_proposal - log_pi_star_current);
}

double stage2_accept_prob(double log_pi_current, double log_pi_proposal, double log_pi_star_current,
                          double log_pi_star_proposal) {
  if (log_pi_proposal == kNegInf) return 0.0;
  return accept_from_log_ratio((log_pi_proposal - log_pi_current) + (log_pi_star_current - log_pi_star_proposal));
}

double metropolis_accept_prob(double log_pi_current, double log_pi_proposal) {
  return accept_from_log_ratio(log_pi_proposal - log_pi_current);
}

ChainState make_state(const TwoLevelTarget& target, const Vector& x, bool two_stage) {
  ChainState s;
  s.x = x;
  s.log_pi_star = two_stage ? target.log_pi_star(x) : kNaN;
  s.log_pi = target.log_pi(x);
  return s;
}

StepOutcome tsmh_step(const ChainState& state, const CholeskyFactor& factor, const TwoLevelTarget& target,
                      ChainStreams& rng) {
  return two_stage_transition(state, factor, target, rng);
}

StepOutcome mh_step(const ChainState& state, const CholeskyFactor& factor, const TwoLevelTarget& target,
                    ChainStreams& rng) {
  return metropolis_transition(state, factor, target, rng);
}

StepOutcome tsam_step(const ChainState& state, AdaptationState& adapt, const TwoLevelTarget& target,
                      ChainStreams& rng) {
  StepOutcome out = two_stage_transition(state, adapt.proposal_factor(), target, rng);
  adapt.absorb(out.next.x);
  return out;
}

StepOutcome am_step(const ChainState& state, AdaptationState& adapt, const TwoLevelTarget& target,
                    ChainStreams& rng) {
  StepOutcome out = metropolis_transition(state, adapt.proposal_factor(), target, rng);
  adapt.absorb(out.next.x);
  return out;
}

std::vector<double> Trace::coordinate(Eigen::Index i) const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.x(i));
  return v;
}

std::vector<double> Trace::log_pi_series() const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.log_pi);
  return v;
}

std::vector<double> Trace::projected(const Vector& dir) const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(dir.dot(r.x));
  return v;
}

Matrix Trace::states() const {
  Matrix m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].x.transpose();
  return m;
}

Trace run_chain(const TwoLevelTarget& target, const SamplerConfig& config) {
  const Eigen::Index d = target.dim();
  config.validate(d);
  const bool two_stage = is_two_stage(config.kernel);
  const bool adaptive = is_adaptive(config.kernel);

  Trace trace;
  trace.config = config;
  trace.dim = d;
  ChainStreams rng(config.seed);
  auto& counters = trace.counters;

  const auto started = std::chrono::steady_clock::now();

  auto finite_state = [&](const ChainState& s) {
    return std::isfinite(s.log_pi) && (!two_stage || std::isfinite(s.log_pi_star));
  };
  auto evaluate = [&](const Vector& x) {
    ChainState s = make_state(target, x, two_stage);
    ++counters.expensive_evals;
    if (two_stage) ++counters.cheap_evals;
    return s;
  };

  ChainState state;
  if (config.initial) {
    if (!target.support().contains(*config.initial)) {
      throw std::invalid_argument("run_chain: initial state lies outside the support");
    }
    state = evaluate(*config.initial);
    if (!finite_state(state)) throw std::invalid_argument("run_chain: initial state has zero density");
  } else {
    int attempt = 0;
    do {
      if (++attempt > kMaxInitialDraws) {
        throw std::runtime_error("run_chain: no initial state with positive density found in the support");
      }
      state = evaluate(target.support().sample_uniform(rng.init));
    } while (!finite_state(state));
  }

  std::optional<AdaptationState> adapt;
  std::optional<CholeskyFactor> fixed;
  if (adaptive) {
    adapt.emplace(d, config.adaptation);
    adapt->absorb(state.x);
  } else {
    fixed.emplace(cholesky(config.fixed_cov));
  }

  const std::int64_t burn = config.burn_in();
  trace.rows.reserve(static_cast<std::size_t>((config.n_iters - burn) / config.thinning + 1));
  for (std::int64_t i = 1; i <= config.n_iters; ++i) {
    StepOutcome out;
    switch (config.kernel) {
      case Kernel::MH: out = mh_step(state, *fixed, target, rng); break;
      case Kernel::TSMH: out = tsmh_step(state, *fixed, target, rng); break;
      case Kernel::AM: out = am_step(state, *adapt, target, rng); break;
      case Kernel::TSAM: out = tsam_step(state, *adapt, target, rng); break;
    }
    ++counters.iterations;
    counters.stage1_accepts += out.stage1_accepted ? 1 : 0;
    counters.accepts += out.stage2_accepted ? 1 : 0;
    counters.expensive_evals += out.expensive_evals;
    counters.cheap_evals += out.cheap_evals;
    counters.failed_evals += out.failed_evals;
    state = std::move(out.next);
    if (i > burn && (i - burn) % config.thinning == 0) {
      trace.rows.push_back(
          TraceRow{i, state.x, state.log_pi, out.stage1_accepted, out.stage2_accepted, out.expensive_evals > 0});
    }
  }

  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return trace;
}

}  // namespace tsam
