#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsam/diagnostics.hpp"
#include "tsam/errors.hpp"

using namespace tsam;

namespace {

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> x(n);
  double v = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (auto& e : x) {
    e = v;
    v = phi * v + rng.normal();
  }
  return x;
}

/// A trace whose retained states are given; wall time set explicitly.
Trace trace_from(const std::vector<double>& series, double seconds) {
  Trace t;
  t.dim = 1;
  t.wall_seconds = seconds;
  for (std::size_t i = 0; i < series.size(); ++i) {
    TraceRow r;
    r.iter = static_cast<std::int64_t>(i + 1);
    r.x = Vector::Constant(1, series[i]);
    r.log_pi = -0.5 * series[i] * series[i];
    t.rows.push_back(r);
  }
  return t;
}

std::shared_ptr<FunctionTarget> gaussian_target(Eigen::Index d) {
  auto f = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  return std::make_shared<FunctionTarget>(Box(Vector::Constant(d, -8.0), Vector::Constant(d, 8.0)), f, f);
}

}  // namespace

TEST_CASE("autocorrelation of a single impulse") {
  const std::vector<double> s{0, 0, 0, 1, 0, 0};
  const double m = 1.0 / 6.0;
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) c0 += (s[i] - m) * (s[i] - m);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) c1 += (s[i] - m) * (s[i + 1] - m);
  const auto rho = autocorrelation(s, 2);
  CHECK(rho[0] == 1.0);
  CHECK(rho[1] == doctest::Approx(c1 / c0).epsilon(1e-14));
  CHECK(rho[1] == doctest::Approx(-7.0 / 30.0).epsilon(1e-14));
  CHECK_THROWS_AS(autocorrelation(std::vector<double>(10, 2.0), 3), DegenerateSeriesError);
  CHECK_THROWS(autocorrelation(s, 6));
}

TEST_CASE("white noise") {
  RandomStream rng(1, 0);
  std::vector<double> x(100000);
  for (auto& e : x) e = rng.normal();
  const auto rho = autocorrelation(x, 20);
  for (std::size_t k = 1; k <= 20; ++k) CHECK(std::abs(rho[k]) < 0.02);
  CHECK(ess(x) == doctest::Approx(1e5).epsilon(0.1));
  CHECK(ess(x) <= 1e5);
}

TEST_CASE("AR(1) autocorrelation and ESS") {
  const auto x = ar1(0.9, 400000, 2);
  const auto rho = autocorrelation(x, 20);
  for (int k = 1; k <= 20; ++k) CHECK(std::abs(rho[k] - std::pow(0.9, k)) < 0.05);

  for (double phi : {0.5, 0.9}) {
    const auto y = ar1(phi, 200000, 3);
    const double expected = 200000.0 * (1.0 - phi) / (1.0 + phi);
    CHECK(ess(y) == doctest::Approx(expected).epsilon(0.15));
  }
}

TEST_CASE("repeated blocks reduce the ESS") {
  RandomStream rng(4, 0);
  std::vector<double> x;
  for (int i = 0; i < 20000; ++i) {
    const double v = rng.normal();
    for (int r = 0; r < 5; ++r) x.push_back(v);
  }
  CHECK(ess(x) < static_cast<double>(x.size()) / 3.0);
}

TEST_CASE("ESS is invariant to affine maps") {
  const auto x = ar1(0.7, 5000, 5);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = -3.0 * x[i] + 12.0;
  CHECK(ess(y) == doctest::Approx(ess(x)).epsilon(1e-10));
}

TEST_CASE("EDPM and REDPM") {
  CHECK(edpm(600.0, 2.0) == 300.0);
  CHECK_THROWS(edpm(10.0, 0.0));

  RandomStream rng(6, 0);
  std::vector<double> x(600);
  for (auto& e : x) e = rng.normal();
  const Trace a = trace_from(x, 120.0);
  const Trace b = trace_from(x, 60.0);
  const auto proj = Projection::coordinate(0);
  CHECK(edpm(a, proj) == doctest::Approx(ess(x) / 2.0));
  CHECK(redpm(a, a, proj) == 1.0);
  CHECK(redpm(b, a, proj) == doctest::Approx(2.0));
  CHECK(redpm(b, a, Projection::log_posterior()) == doctest::Approx(2.0));
  CHECK(Projection::log_posterior().label() == "log_pi");
  CHECK(Projection::coordinate(2).label() == "x_3");
}

TEST_CASE("thinning") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
  CHECK(thin(x, 1) == x);
  CHECK(thin(x, 3) == std::vector<double>{3, 6});
  CHECK_THROWS(thin(x, 0));
}

TEST_CASE("principal directions") {
  Vector diag = Vector::Ones(8);
  diag(0) = 10.0;
  const auto pcs = principal_projection(Matrix(diag.asDiagonal()));
  CHECK(std::abs(pcs.first(0) - 1.0) < 1e-12);
  CHECK(std::abs(pcs.first.norm() - 1.0) < 1e-12);
  CHECK(std::abs(pcs.orthogonal.norm() - 1.0) < 1e-12);
  CHECK(std::abs(pcs.first.dot(pcs.orthogonal)) < 1e-12);

  RandomStream rng(7, 0);
  Matrix A(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) A(i, j) = rng.normal();
  const auto p2 = principal_projection(Matrix(A * A.transpose()));
  CHECK(std::abs(p2.first.dot(p2.orthogonal)) < 1e-12);
  CHECK_THROWS_AS(principal_projection(Matrix::Zero(3, 3)), DegenerateSeriesError);
}

TEST_CASE("banana trace: first principal component follows x1") {
  const auto bt = default_banana_target();
  SamplerConfig cfg = default_sampler_config(*bt, Kernel::TSAM, 40000, 3);
  const Trace tr = run_chain(*bt, cfg);
  const auto pcs = principal_projection(tr);
  const double angle = std::acos(std::min(1.0, std::abs(pcs.first(0)))) * 180.0 / std::numbers::pi;
  CHECK(angle < 15.0);
}

TEST_CASE("chain length for n retained states") {
  CHECK(chain_length_for(500, 0.5) == 1000);
  CHECK(chain_length_for(1, 0.0) == 1);
  for (std::int64_t n : {7, 333, 10000}) {
    for (double b : {0.1, 0.37, 0.5, 0.9}) {
      const auto len = chain_length_for(n, b);
      CHECK(len - static_cast<std::int64_t>(std::floor(len * b)) >= n);
      CHECK(len <= static_cast<std::int64_t>(std::ceil(n / (1.0 - b))) + 1);
    }
  }
}

TEST_CASE("replicated Monte Carlo experiments") {
  const auto t = gaussian_target(2);
  SamplerConfig cfg = default_sampler_config(*t, Kernel::TSAM, 1000, 100);
  const auto constant = mc_estimate_experiment(*t, cfg, [](const Vector&) { return 2.5; }, 4, {50, 100, 200});
  REQUIRE(constant.size() == 3);
  for (const auto& s : constant) {
    CHECK(s.mean == 2.5);
    CHECK(s.sd == 0.0);
    CHECK(s.estimates.size() == 4);
  }
  CHECK(constant[1].n == 100);

  // Parallel and serial execution give the same numbers.
  const StateFunction f = [](const Vector& x) { return x(0); };
  const auto serial = mc_estimate_experiment(*t, cfg, f, 6, {300}, 1);
  const auto parallel = mc_estimate_experiment(*t, cfg, f, 6, {300}, 3);
  CHECK(serial[0].estimates == parallel[0].estimates);

  // Standard deviations shrink with n, allowing one inversion.
  const auto shrink = mc_estimate_experiment(*t, cfg, f, 12, {100, 400, 1600, 6400});
  int inversions = 0;
  for (std::size_t i = 1; i < shrink.size(); ++i) inversions += shrink[i].sd >= shrink[i - 1].sd ? 1 : 0;
  CHECK(inversions <= 1);
  CHECK(shrink.back().sd < shrink.front().sd);
  CHECK_THROWS(mc_estimate_experiment(*t, cfg, f, 1, {100}));
}

TEST_CASE("coverage of a near-certain region") {
  Vector diag = Vector::Ones(3);
  diag(0) = 2.0;
  BananaTarget bt(Vector::Zero(3), Matrix(diag.asDiagonal()), 1.0, 0.05, 8.0);
  SamplerConfig cfg = default_sampler_config(bt, Kernel::TSAM, 1000, 4);
  const auto res = coverage_experiment(bt, cfg, 0.99999, 3, {2000});
  CHECK(res[0].mean > 0.99);
  CHECK_THROWS(coverage_experiment(bt, cfg, 1.0, 3, {100}));
}
