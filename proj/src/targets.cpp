#include "tsam/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "tsam/errors.hpp"

namespace tsam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

/// log(1 + e^η) without overflow.
inline double softplus(double eta) { return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double log_lognormal(double v, double log_mean, double log_sd) {
  const double r = (std::log(v) - log_mean) / log_sd;
  return -std::log(v) - std::log(log_sd) - kHalfLog2Pi - 0.5 * r * r;
}

}  // namespace

// --- Box --------------------------------------------------------------------

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() < 1) throw std::invalid_argument("Box: bound dimensions differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) < upper(i))) throw std::invalid_argument("Box: lower bound must be below upper bound");
  }
}

bool Box::contains(const Vector& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= lower(i) && x(i) <= upper(i))) return false;
  }
  return true;
}

Vector Box::sample_uniform(RandomStream& rng) const {
  Vector x(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) x(i) = rng.uniform(lower(i), upper(i));
  return x;
}

// --- TwoLevelTarget ---------------------------------------------------------

TwoLevelTarget::TwoLevelTarget(Box support) : support_(std::move(support)) {}

double TwoLevelTarget::log_pi_star(const Vector& x) const {
  if (!support_.contains(x)) return kNegInf;
  const double v = cheap_log_density(x);
  return std::isnan(v) ? kNegInf : v;
}

double TwoLevelTarget::log_pi(const Vector& x) const {
  if (!support_.contains(x)) return kNegInf;
  const double v = expensive_log_density(x);
  return std::isnan(v) ? kNegInf : v;
}

FunctionTarget::FunctionTarget(Box support, LogDensity cheap, LogDensity expensive, std::string name)
    : TwoLevelTarget(std::move(support)), cheap_(std::move(cheap)), expensive_(std::move(expensive)),
      name_(std::move(name)) {}

// --- Shifted t --------------------------------------------------------------

Matrix ar_scale_matrix(const Vector& variances, double rho) {
  const Eigen::Index d = variances.size();
  Matrix S(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      S(i, j) = std::sqrt(variances(i) * variances(j)) * std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  return S;
}

namespace {

Box t_box(const Vector& mu, const Matrix& Sigma, double nu, double truncation_sd) {
  if (!(nu > 0.0)) throw std::invalid_argument("shifted_t_target: nu must be positive");
  if (!(truncation_sd > 0.0)) throw std::invalid_argument("shifted_t_target: truncation_sd must be positive");
  if (Sigma.rows() != mu.size() || Sigma.cols() != mu.size()) {
    throw std::invalid_argument("shifted_t_target: Sigma has the wrong dimension");
  }
  const double inflation = nu > 2.0 ? nu / (nu - 2.0) : 1.0;
  const Vector half = truncation_sd * (Sigma.diagonal() * inflation).cwiseSqrt();
  return Box(mu - half, mu + half);
}

}  // namespace

ShiftedTTarget::ShiftedTTarget(Vector mu, const Matrix& Sigma, double nu, double truncation_sd)
    : TwoLevelTarget(t_box(mu, Sigma, nu, truncation_sd)), Sigma_(0.5 * (Sigma + Sigma.transpose())), nu_(nu),
      shape_(std::move(mu), Sigma) {
  const double d = static_cast<double>(dim());
  const double log_det = 2.0 * shape_.factor().lower().diagonal().array().log().sum();
  log_norm_ = std::lgamma(0.5 * (nu_ + d)) - std::lgamma(0.5 * nu_) - 0.5 * d * std::log(nu_ * std::numbers::pi) -
              0.5 * log_det;
}

double ShiftedTTarget::expensive_log_density(const Vector& x) const {
  const double q = shape_.mahalanobis_sq(x);
  return log_norm_ - 0.5 * (nu_ + static_cast<double>(dim())) * std::log1p(q / nu_);
}

Matrix ShiftedTTarget::covariance() const {
  if (!(nu_ > 2.0)) throw std::domain_error("ShiftedTTarget::covariance: requires nu > 2");
  return Sigma_ * (nu_ / (nu_ - 2.0));
}

Vector ShiftedTTarget::sample_untruncated(RandomStream& rng) const {
  std::chi_squared_distribution<double> chi2(nu_);
  const Vector z = mvn_sample(Vector::Zero(dim()), shape_.factor(), rng);
  const double w = chi2(rng.engine());
  return mu() + z * std::sqrt(nu_ / w);
}

std::shared_ptr<ShiftedTTarget> default_shifted_t_target() {
  Vector mu(8);
  mu << 0, 1, 2, 3, 4, 5, 6, 7;
  Vector var(8);
  var << 1, 1, 1, 1, 1, 2, 4, 6;
  return std::make_shared<ShiftedTTarget>(mu, ar_scale_matrix(var, 0.4), 10.0, 5.0);
}

// --- Banana -----------------------------------------------------------------

namespace {

Box banana_box(const Vector& mu, const Matrix& S, double a, double b, double truncation_sd) {
  const Eigen::Index d = mu.size();
  if (d < 2) throw std::invalid_argument("banana_target: requires d >= 2");
  if (a == 0.0) throw std::invalid_argument("banana_target: a must be nonzero");
  if (S.rows() != d || S.cols() != d) throw std::invalid_argument("banana_target: Sigma has the wrong dimension");
  if (!(truncation_sd > 0.0)) throw std::invalid_argument("banana_target: truncation_sd must be positive");
  // Moments of x = φ⁻¹(y), y ~ N(mu, S): x₁ = y₁/a, x₂ = a y₂ − b a (y₁² + a²).
  Vector mean = mu;
  Vector var = S.diagonal();
  mean(0) = mu(0) / a;
  var(0) = S(0, 0) / (a * a);
  mean(1) = a * mu(1) - b * a * (S(0, 0) + mu(0) * mu(0) + a * a);
  const double var_y1_sq = 2.0 * S(0, 0) * S(0, 0) + 4.0 * mu(0) * mu(0) * S(0, 0);
  const double cov_y2_y1_sq = 2.0 * mu(0) * S(0, 1);
  var(1) = a * a * S(1, 1) + b * b * a * a * var_y1_sq - 2.0 * a * a * b * cov_y2_y1_sq;
  const Vector half = truncation_sd * var.cwiseSqrt();
  return Box(mean - half, mean + half);
}

}  // namespace

BananaTarget::BananaTarget(Vector mu, const Matrix& Sigma, double a, double b, double truncation_sd)
    : TwoLevelTarget(banana_box(mu, Sigma, a, b, truncation_sd)), gaussian_(std::move(mu), Sigma), a_(a), b_(b) {}

Vector BananaTarget::twist(const Vector& x) const {
  Vector y = x;
  y(0) = a_ * x(0);
  y(1) = x(1) / a_ + b_ * a_ * a_ * (x(0) * x(0) + 1.0);
  return y;
}

Vector BananaTarget::untwist(const Vector& y) const {
  Vector x = y;
  x(0) = y(0) / a_;
  x(1) = a_ * (y(1) - b_ * a_ * a_ * (x(0) * x(0) + 1.0));
  return x;
}

bool BananaTarget::in_region(const Vector& x, double p) const { return banana_region_indicator(x, p, *this); }

Vector BananaTarget::sample_untruncated(RandomStream& rng) const {
  return untwist(mvn_sample(gaussian_.mean(), gaussian_.factor(), rng));
}

bool banana_region_indicator(const Vector& x, double p, const BananaTarget& target) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("banana_region_indicator: p must lie in (0, 1)");
  const boost::math::chi_squared chi2(static_cast<double>(target.dim()));
  const double threshold = boost::math::quantile(chi2, p);
  return target.gaussian().mahalanobis_sq(target.twist(x)) <= threshold;
}

std::shared_ptr<BananaTarget> default_banana_target() {
  Vector diag = Vector::Ones(8);
  diag(0) = 10.0;
  return std::make_shared<BananaTarget>(Vector::Zero(8), Matrix(diag.asDiagonal()), 1.0, 0.05, 5.0);
}

// --- Logistic ---------------------------------------------------------------

std::size_t LogisticData::n_zeros() const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{0}));
}

std::vector<std::size_t> draw_zero_subsample(const LogisticData& data, std::size_t n0, std::uint64_t seed) {
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    if (data.y[i] == 0) zeros.push_back(i);
  }
  if (n0 == 0 || n0 > zeros.size()) {
    throw DataShapeError("draw_zero_subsample: subsample size must be in [1, number of zero responses]");
  }
  RandomStream rng(seed, 0x5b);
  std::vector<std::size_t> picked;
  picked.reserve(n0);
  std::sample(zeros.begin(), zeros.end(), std::back_inserter(picked), n0, rng.engine());
  return picked;
}

namespace {

Box logistic_box(Eigen::Index d, double halfwidth) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("logistic_target: box halfwidth must be positive");
  return Box(Vector::Constant(d, -halfwidth), Vector::Constant(d, halfwidth));
}

}  // namespace

namespace {

const Matrix& checked_prior(const Matrix& prior_cov, Eigen::Index d) {
  if (prior_cov.rows() != d || prior_cov.cols() != d) throw DataShapeError("logistic_target: prior dimension mismatch");
  return prior_cov;
}

}  // namespace

LogisticTarget::LogisticTarget(const LogisticData& data, const std::vector<std::size_t>& subsample_indices,
                               const Matrix& prior_cov, double box_halfwidth)
    : TwoLevelTarget(logistic_box(data.X.cols(), box_halfwidth)),
      prior_(Vector::Zero(data.X.cols()), checked_prior(prior_cov, data.X.cols())) {
  const auto N = static_cast<std::size_t>(data.X.rows());
  if (N != data.y.size()) throw DataShapeError("logistic_target: design rows and responses differ in length");
  if (data.X.cols() < 1) throw DataShapeError("logistic_target: empty design");
  std::vector<Eigen::Index> ones;
  std::vector<Eigen::Index> zeros;
  for (std::size_t i = 0; i < N; ++i) {
    if (data.y[i] > 1) throw DataShapeError("logistic_target: responses must be 0 or 1");
    (data.y[i] ? ones : zeros).push_back(static_cast<Eigen::Index>(i));
  }
  if (subsample_indices.empty()) throw DataShapeError("logistic_target: empty subsample");
  std::vector<Eigen::Index> sub;
  for (std::size_t idx : subsample_indices) {
    if (idx >= N || data.y[idx] != 0) {
      throw DataShapeError("logistic_target: subsample index " + std::to_string(idx) + " is not a zero-response row");
    }
    sub.push_back(static_cast<Eigen::Index>(idx));
  }
  X_ones_ = data.X(ones, Eigen::all);
  X_zeros_ = data.X(zeros, Eigen::all);
  X_sub_ = data.X(sub, Eigen::all);
  zero_scale_ = static_cast<double>(zeros.size()) / static_cast<double>(sub.size());
}

double LogisticTarget::ones_term(const Vector& beta) const {
  const Vector eta = X_ones_ * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) s -= softplus(-eta(i));
  return s;
}

double LogisticTarget::log_likelihood(const Vector& beta) const {
  const Vector eta = X_zeros_ * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) s -= softplus(eta(i));
  return ones_term(beta) + s;
}

double LogisticTarget::approx_log_likelihood(const Vector& beta) const {
  const Vector eta = X_sub_ * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) s -= softplus(eta(i));
  return ones_term(beta) + zero_scale_ * s;
}

double LogisticTarget::cheap_log_density(const Vector& x) const {
  return approx_log_likelihood(x) + prior_.log_density(x);
}

double LogisticTarget::expensive_log_density(const Vector& x) const {
  return log_likelihood(x) + prior_.log_density(x);
}

// --- Lotka–Volterra ---------------------------------------------------------

void ObservationSet::validate() const {
  const std::size_t n = times.size();
  if (n == 0) throw DataShapeError("ObservationSet: no observations");
  for (const auto& c : counts) {
    if (c.size() != n) throw DataShapeError("ObservationSet: count columns and times differ in length");
    for (double v : c) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValueError("ObservationSet: counts must be positive and finite");
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) throw ValueError("ObservationSet: times must be strictly increasing");
  }
}

Box lotka_volterra_box(const LVPriors& p) {
  const double ts = p.lognormal_truncation * p.sigma_log_sd;
  const double ty = p.lognormal_truncation * p.y0_log_sd;
  Vector lo(8);
  Vector hi(8);
  lo << 0.0, 0.0, 0.0, 0.0, std::exp(p.sigma_log_mean - ts), std::exp(p.sigma_log_mean - ts),
      std::exp(p.y0_log_mean - ty), std::exp(p.y0_log_mean - ty);
  hi << p.alpha_max, p.beta_max, p.gamma_max, p.delta_max, std::exp(p.sigma_log_mean + ts),
      std::exp(p.sigma_log_mean + ts), std::exp(p.y0_log_mean + ty), std::exp(p.y0_log_mean + ty);
  return Box(lo, hi);
}

LotkaVolterraTarget::LotkaVolterraTarget(ObservationSet data, SolverGrid fine, SolverGrid coarse, LVPriors priors,
                                         Integrator integrator)
    : TwoLevelTarget(lotka_volterra_box(priors)), data_(std::move(data)), fine_(std::move(fine)),
      coarse_(std::move(coarse)), priors_(priors), integrator_(integrator) {
  data_.validate();
  fine_.validate();
  coarse_.validate();
  if (!(priors_.rate_units_per_year > 0.0)) throw std::invalid_argument("lotka_volterra_target: bad rate unit");
  for (const SolverGrid* g : {&fine_, &coarse_}) {
    if (g->observation_times.size() != data_.size()) {
      throw DataShapeError("lotka_volterra_target: grid observation count differs from the data");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double rel = data_.times[i] - data_.times[0] + g->t_start;
      if (std::abs(rel - g->observation_times[i]) > 1e-9 * std::max(1.0, std::abs(rel))) {
        throw DataShapeError("lotka_volterra_target: data times do not match the grid observation times");
      }
    }
  }
  sum_log_counts_ = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (double z : data_.counts[j]) {
      log_counts_[j].push_back(std::log(z));
      sum_log_counts_ += std::log(z);
    }
  }
}

LVParams LotkaVolterraTarget::rates(const Vector& theta) const {
  const double u = priors_.rate_units_per_year;
  return {theta(0) * u, theta(1) * u, theta(2) * u, theta(3) * u};
}

double LotkaVolterraTarget::log_prior(const Vector& theta) const {
  if (!support().contains(theta)) return kNegInf;
  double lp = -std::log(priors_.alpha_max) - std::log(priors_.beta_max) - std::log(priors_.gamma_max) -
              std::log(priors_.delta_max);
  for (int j = 4; j < 6; ++j) lp += log_lognormal(theta(j), priors_.sigma_log_mean, priors_.sigma_log_sd);
  for (int j = 6; j < 8; ++j) lp += log_lognormal(theta(j), priors_.y0_log_mean, priors_.y0_log_sd);
  return lp;
}

double LotkaVolterraTarget::log_likelihood(const Vector& theta, const SolverGrid& grid) const {
  const auto traj = try_solve_lv(rates(theta), {theta(6), theta(7)}, grid, integrator_);
  if (!traj) return kNegInf;
  const double n = static_cast<double>(data_.size());
  double ll = -sum_log_counts_ - 2.0 * n * kHalfLog2Pi;
  for (int j = 0; j < 2; ++j) {
    const double sigma = theta(4 + j);
    double ss = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double r = log_counts_[j][i] - std::log(traj->states[i][j]);
      ss += r * r;
    }
    ll += -n * std::log(sigma) - 0.5 * ss / (sigma * sigma);
  }
  return ll;
}

double LotkaVolterraTarget::cheap_log_density(const Vector& x) const {
  return log_prior(x) + log_likelihood(x, coarse_);
}

double LotkaVolterraTarget::expensive_log_density(const Vector& x) const {
  return log_prior(x) + log_likelihood(x, fine_);
}

}  // namespace tsam
