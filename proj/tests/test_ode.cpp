#include <doctest.h>

#include <chrono>
#include <cmath>

#include "tsam/errors.hpp"
#include "tsam/ode.hpp"

using namespace tsam;

namespace {

// Per-year rates of the order fitted to the hare–lynx cycle.
const LVParams kCycle{0.54, 0.0276, 0.804, 0.024};

double max_rel_error(const LVTrajectory& a, const LVTrajectory& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    for (int j = 0; j < 2; ++j) e = std::max(e, std::abs(a.states[i][j] - b.states[i][j]) / std::abs(b.states[i][j]));
  return e;
}

}  // namespace

TEST_CASE("standard grids") {
  const auto [fine, coarse] = standard_grids(20);
  CHECK(fine.n_steps() == 7300);
  CHECK(coarse.n_steps() == 240);
  CHECK(fine.observation_times.size() == 21);
  CHECK(coarse.observation_times.size() == 21);
  CHECK(static_cast<double>(fine.n_steps()) / coarse.n_steps() == doctest::Approx(30.4).epsilon(0.01));
  CHECK(fine.observation_steps().back() == 7300);
}

TEST_CASE("grid validation") {
  SolverGrid g = annual_grid(3, 12);
  CHECK_NOTHROW(g.validate());
  g.observation_times.push_back(2.5);
  CHECK_THROWS(g.validate());
  g = annual_grid(3, 12);
  g.observation_times[1] = 1.01;
  CHECK_THROWS(g.validate());
  g = annual_grid(3, 12);
  g.step = 0.0;
  CHECK_THROWS(g.validate());
  CHECK_THROWS(annual_grid(0, 12));
}

TEST_CASE("equilibrium stays fixed") {
  const LVState eq{kCycle.gamma / kCycle.delta, kCycle.alpha / kCycle.beta};
  const auto traj = solve_lv(kCycle, eq, standard_grids(20).first);
  for (const auto& y : traj.states) {
    CHECK(std::abs(y[0] - eq[0]) < 1e-10 * eq[0]);
    CHECK(std::abs(y[1] - eq[1]) < 1e-10 * eq[1]);
  }
}

TEST_CASE("decoupled system follows exponentials") {
  const LVParams p{0.3, 0.0, 0.2, 0.0};
  const LVState y0{12.0, 7.0};
  const auto traj = solve_lv(p, y0, standard_grids(20).first);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    CHECK(std::abs(traj.states[i][0] / (y0[0] * std::exp(p.alpha * t)) - 1.0) < 1e-6);
    CHECK(std::abs(traj.states[i][1] / (y0[1] * std::exp(-p.gamma * t)) - 1.0) < 1e-6);
  }
}

TEST_CASE("conserved quantity drifts little on the daily grid") {
  const LVState y0{30.0, 4.0};
  const SolverGrid grid = annual_grid(20, 365);
  const auto traj = solve_lv(kCycle, y0, grid);
  const double v0 = lv_invariant(kCycle, y0);
  for (const auto& y : traj.states) CHECK(std::abs(lv_invariant(kCycle, y) - v0) < 1e-4 * std::abs(v0));
}

TEST_CASE("RK4 converges at fourth order, Euler at first") {
  const LVState y0{30.0, 4.0};
  const auto ref = solve_lv(kCycle, y0, annual_grid(20, 96));
  const double e1 = max_rel_error(solve_lv(kCycle, y0, annual_grid(20, 12)), ref);
  const double e2 = max_rel_error(solve_lv(kCycle, y0, annual_grid(20, 24)), ref);
  const double ratio = e1 / e2;
  CHECK(ratio > 8.0);
  CHECK(ratio < 24.0);

  const auto ref_e = solve_lv(kCycle, y0, annual_grid(5, 365 * 64), Integrator::Euler);
  const double f1 = max_rel_error(solve_lv(kCycle, y0, annual_grid(5, 365 * 4), Integrator::Euler), ref_e);
  const double f2 = max_rel_error(solve_lv(kCycle, y0, annual_grid(5, 365 * 8), Integrator::Euler), ref_e);
  CHECK(f1 / f2 > 1.6);
  CHECK(f1 / f2 < 2.4);
}

TEST_CASE("failure surfaces instead of garbage") {
  // A single huge Euler step drives the predator negative.
  const LVParams p{0.5, 0.5, 2.0, 0.01};
  SolverGrid g;
  g.t_start = 0.0;
  g.t_end = 1.0;
  g.step = 1.0;
  g.observation_times = {0.0, 1.0};
  CHECK_FALSE(try_solve_lv(p, {10.0, 10.0}, g, Integrator::Euler).has_value());
  CHECK_THROWS_AS(solve_lv(p, {10.0, 10.0}, g, Integrator::Euler), SolverFailure);
  CHECK_FALSE(try_solve_lv(kCycle, {-1.0, 3.0}, g).has_value());
}

TEST_CASE("coarse solve is cheaper than fine solve") {
  const auto [fine, coarse] = standard_grids(20);
  auto time_it = [](const SolverGrid& g) {
    const auto t0 = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (int r = 0; r < 50; ++r) sink += solve_lv(kCycle, {30.0, 4.0}, g).states.back()[0];
    CHECK(sink > 0.0);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  CHECK(time_it(coarse) < time_it(fine));
}
