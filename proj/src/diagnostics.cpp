#include "tsam/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "tsam/errors.hpp"

namespace tsam {

namespace {

/// Centered copy of the series and its biased autocovariance at lag 0.
std::pair<std::vector<double>, double> center(std::span<const double> series) {
  if (series.size() < 2) throw DegenerateSeriesError("series needs at least two values");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) throw DegenerateSeriesError("series is constant");
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  std::vector<double> c(series.size());
  double c0 = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    c[i] = series[i] - mean;
    c0 += c[i] * c[i];
  }
  c0 /= n;
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw DegenerateSeriesError("series has zero or nonfinite variance");
  return {std::move(c), c0};
}

double lag_autocorrelation(const std::vector<double>& c, double c0, std::size_t k) {
  double acc = 0.0;
  for (std::size_t i = 0; i + k < c.size(); ++i) acc += c[i] * c[i + k];
  return acc / static_cast<double>(c.size()) / c0;
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  if (series.size() <= max_lag) throw std::invalid_argument("autocorrelation: series shorter than max_lag + 1");
  const auto [c, c0] = center(series);
  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) rho[k] = lag_autocorrelation(c, c0, k);
  return rho;
}

double integrated_autocorrelation_time(std::span<const double> series) {
  const auto [c, c0] = center(series);
  const std::size_t n = c.size();
  double pair_sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double rho_even = m == 0 ? 1.0 : lag_autocorrelation(c, c0, 2 * m);
    const double pair = rho_even + lag_autocorrelation(c, c0, 2 * m + 1);
    if (!(pair > 0.0)) break;
    pair_sum += pair;
  }
  if (pair_sum == 0.0) return 1.0;
  return 2.0 * pair_sum - 1.0;
}

double ess(std::span<const double> series) {
  const double n = static_cast<double>(series.size());
  const double tau = integrated_autocorrelation_time(series);
  return tau <= 1.0 ? n : n / tau;
}

double edpm(double effective_size, double wall_minutes) {
  if (!(wall_minutes > 0.0)) throw std::invalid_argument("edpm: wall time must be positive");
  return effective_size / wall_minutes;
}

std::vector<double> thin(std::span<const double> series, std::size_t k) {
  if (k == 0) throw std::invalid_argument("thin: k must be positive");
  std::vector<double> out;
  out.reserve(series.size() / k);
  for (std::size_t i = k - 1; i < series.size(); i += k) out.push_back(series[i]);
  return out;
}

Projection::Projection(Kind kind, Eigen::Index index, Vector dir, std::string label)
    : kind_(kind), index_(index), dir_(std::move(dir)), label_(std::move(label)) {}

Projection Projection::coordinate(Eigen::Index i) { return Projection(Kind::Coordinate, i, {}, "x_" + std::to_string(i + 1)); }

Projection Projection::log_posterior() { return Projection(Kind::LogPosterior, 0, {}, "log_pi"); }

Projection Projection::direction(Vector v, std::string label) {
  return Projection(Kind::Direction, 0, std::move(v), std::move(label));
}

std::vector<double> Projection::apply(const Trace& trace) const {
  switch (kind_) {
    case Kind::Coordinate:
      if (index_ < 0 || index_ >= trace.dim) throw std::out_of_range("Projection: coordinate out of range");
      return trace.coordinate(index_);
    case Kind::LogPosterior: return trace.log_pi_series();
    case Kind::Direction:
      if (dir_.size() != trace.dim) throw std::invalid_argument("Projection: direction has the wrong dimension");
      return trace.projected(dir_);
  }
  return {};
}

double edpm(const Trace& trace, const Projection& projection, std::size_t thinning) {
  if (trace.rows.empty()) throw std::invalid_argument("edpm: empty trace");
  const std::vector<double> series = thin(projection.apply(trace), thinning);
  return edpm(ess(series), trace.wall_minutes());
}

double redpm(const Trace& a, const Trace& b, const Projection& projection, std::size_t thinning) {
  return edpm(a, projection, thinning) / edpm(b, projection, thinning);
}

PrincipalDirections principal_projection(const Matrix& covariance) {
  const Eigen::Index d = covariance.rows();
  if (d < 2 || covariance.cols() != d) throw std::invalid_argument("principal_projection: need a d×d matrix, d ≥ 2");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (covariance + covariance.transpose()));
  if (eig.info() != Eigen::Success) throw DegenerateSeriesError("principal_projection: eigensolver failed");
  if (!(eig.eigenvalues()(d - 1) > 0.0)) throw DegenerateSeriesError("principal_projection: zero covariance");
  auto oriented = [](Vector v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    return v;
  };
  return {oriented(eig.eigenvectors().col(d - 1)), oriented(eig.eigenvectors().col(d - 2))};
}

PrincipalDirections principal_projection(const Trace& trace) {
  if (trace.rows.size() < 2) throw DegenerateSeriesError("principal_projection: trace needs two states");
  const Matrix X = trace.states();
  const Matrix centered = X.rowwise() - X.colwise().mean();
  return principal_projection(Matrix(centered.transpose() * centered / static_cast<double>(X.rows() - 1)));
}

std::int64_t chain_length_for(std::int64_t n, double burn_in_fraction) {
  if (n < 1) throw std::invalid_argument("chain_length_for: n must be positive");
  auto len = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) / (1.0 - burn_in_fraction)));
  while (len - static_cast<std::int64_t>(std::floor(static_cast<double>(len) * burn_in_fraction)) < n) ++len;
  return len;
}

namespace {

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<ReplicateSummary> mc_estimate_experiment(const TwoLevelTarget& target, const SamplerConfig& base,
                                                     const StateFunction& f, int m,
                                                     const std::vector<std::int64_t>& n_list, int workers) {
  if (m < 2) throw std::invalid_argument("mc_estimate_experiment: need at least two replicates");
  std::vector<ReplicateSummary> out;
  for (std::int64_t n : n_list) {
    ReplicateSummary s;
    s.n = n;
    s.estimates.assign(static_cast<std::size_t>(m), 0.0);
    parallel_for(m, workers, [&](int k) {
      SamplerConfig cfg = base;
      cfg.thinning = 1;
      cfg.n_iters = chain_length_for(n, cfg.burn_in_fraction);
      cfg.seed = base.seed + static_cast<std::uint64_t>(k);
      const Trace trace = run_chain(target, cfg);
      double acc = 0.0;
      for (std::size_t i = trace.rows.size() - static_cast<std::size_t>(n); i < trace.rows.size(); ++i) {
        acc += f(trace.rows[i].x);
      }
      s.estimates[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
    });
    s.mean = std::accumulate(s.estimates.begin(), s.estimates.end(), 0.0) / m;
    s.sd = sample_sd(s.estimates, s.mean);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ReplicateSummary> coverage_experiment(const BananaTarget& target, const SamplerConfig& base, double p,
                                                  int m, const std::vector<std::int64_t>& n_list, int workers) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("coverage_experiment: p must lie in (0, 1)");
  const double threshold = boost::math::quantile(boost::math::chi_squared(static_cast<double>(target.dim())), p);
  const StateFunction inside = [&target, threshold](const Vector& x) {
    return target.gaussian().mahalanobis_sq(target.twist(x)) <= threshold ? 1.0 : 0.0;
  };
  return mc_estimate_experiment(target, base, inside, m, n_list, workers);
}

}  // namespace tsam
