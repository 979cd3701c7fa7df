#include "tsam/ode.hpp"

#include <cmath>
#include <stdexcept>

#include "tsam/errors.hpp"

namespace tsam {

void SolverGrid::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("SolverGrid: step must be positive");
  if (!(t_end >= t_start)) throw std::invalid_argument("SolverGrid: t_end precedes t_start");
  if (observation_times.empty()) throw std::invalid_argument("SolverGrid: no observation times");
  double prev = -INFINITY;
  for (double t : observation_times) {
    if (t < t_start || t > t_end) throw std::invalid_argument("SolverGrid: observation time outside the grid");
    if (!(t > prev)) throw std::invalid_argument("SolverGrid: observation times must be strictly increasing");
    const double k = (t - t_start) / step;
    if (std::abs(k - std::round(k)) > 1e-6) {
      throw std::invalid_argument("SolverGrid: observation time is not aligned with the step");
    }
    prev = t;
  }
}

std::int64_t SolverGrid::n_steps() const { return std::llround((t_end - t_start) / step); }

std::vector<std::int64_t> SolverGrid::observation_steps() const {
  std::vector<std::int64_t> idx;
  idx.reserve(observation_times.size());
  for (double t : observation_times) idx.push_back(std::llround((t - t_start) / step));
  return idx;
}

LVState lv_rhs(const LVParams& p, const LVState& y) {
  const double inter = y[0] * y[1];
  return {p.alpha * y[0] - p.beta * inter, -p.gamma * y[1] + p.delta * inter};
}

double lv_invariant(const LVParams& p, const LVState& y) {
  return p.delta * y[0] - p.gamma * std::log(y[0]) + p.beta * y[1] - p.alpha * std::log(y[1]);
}

namespace {

inline LVState axpy(const LVState& y, double h, const LVState& k) { return {y[0] + h * k[0], y[1] + h * k[1]}; }

inline LVState rk4_step(const LVParams& p, const LVState& y, double h) {
  const LVState k1 = lv_rhs(p, y);
  const LVState k2 = lv_rhs(p, axpy(y, 0.5 * h, k1));
  const LVState k3 = lv_rhs(p, axpy(y, 0.5 * h, k2));
  const LVState k4 = lv_rhs(p, axpy(y, h, k3));
  const double w = h / 6.0;
  return {y[0] + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          y[1] + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

inline bool valid(const LVState& y) { return y[0] > 0.0 && y[1] > 0.0 && std::isfinite(y[0]) && std::isfinite(y[1]); }

}  // namespace

std::optional<LVTrajectory> try_solve_lv(const LVParams& params, const LVState& y0, const SolverGrid& grid,
                                         Integrator integrator) {
  grid.validate();
  if (!valid(y0)) return std::nullopt;
  const std::vector<std::int64_t> obs = grid.observation_steps();
  LVTrajectory out;
  out.times = grid.observation_times;
  out.states.reserve(obs.size());

  LVState y = y0;
  std::int64_t step = 0;
  const double h = grid.step;
  for (std::int64_t target : obs) {
    for (; step < target; ++step) {
      y = integrator == Integrator::RK4 ? rk4_step(params, y, h) : axpy(y, h, lv_rhs(params, y));
      if (!valid(y)) return std::nullopt;
    }
    out.states.push_back(y);
  }
  return out;
}

LVTrajectory solve_lv(const LVParams& params, const LVState& y0, const SolverGrid& grid, Integrator integrator) {
  auto result = try_solve_lv(params, y0, grid, integrator);
  if (!result) throw SolverFailure("solve_lv: trajectory left the positive quadrant or became nonfinite");
  return std::move(*result);
}

SolverGrid annual_grid(int n_years, int steps_per_year) {
  if (n_years < 1 || steps_per_year < 1) throw std::invalid_argument("annual_grid: arguments must be positive");
  SolverGrid g;
  g.t_start = 0.0;
  g.t_end = static_cast<double>(n_years);
  g.step = 1.0 / static_cast<double>(steps_per_year);
  for (int y = 0; y <= n_years; ++y) g.observation_times.push_back(static_cast<double>(y));
  return g;
}

std::pair<SolverGrid, SolverGrid> standard_grids(int n_years) {
  return {annual_grid(n_years, 365), annual_grid(n_years, 12)};
}

}  // namespace tsam
