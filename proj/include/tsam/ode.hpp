#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace tsam {

/// Lotka–Volterra rates, in units of 1/year (β and δ per year per individual).
struct LVParams {
  double alpha = 0.0;  // prey growth
  double beta = 0.0;   // predation
  double gamma = 0.0;  // predator death
  double delta = 0.0;  // predator growth per prey
};

using LVState = std::array<double, 2>;  // (prey, predator)

/// Fixed-step time grid in years. Observation times must lie on the grid.
struct SolverGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  double step = 0.0;
  std::vector<double> observation_times;

  /// Throws std::invalid_argument when the grid is malformed.
  void validate() const;
  std::int64_t n_steps() const;
  /// Step index of each observation time.
  std::vector<std::int64_t> observation_steps() const;
};

enum class Integrator { RK4, Euler };

struct LVTrajectory {
  std::vector<double> times;
  std::vector<LVState> states;
};

/// dy₁/dt = αy₁ − βy₁y₂,  dy₂/dt = −γy₂ + δy₁y₂.
LVState lv_rhs(const LVParams& p, const LVState& y);

/// δy₁ − γ ln y₁ + βy₂ − α ln y₂; constant along exact trajectories.
double lv_invariant(const LVParams& p, const LVState& y);

/// Integrates from y0 at grid.t_start and returns the state at each
/// observation time, or nullopt as soon as a component becomes nonpositive
/// or nonfinite.
std::optional<LVTrajectory> try_solve_lv(const LVParams& params, const LVState& y0, const SolverGrid& grid,
                                         Integrator integrator = Integrator::RK4);

/// As try_solve_lv but throws SolverFailure.
LVTrajectory solve_lv(const LVParams& params, const LVState& y0, const SolverGrid& grid,
                      Integrator integrator = Integrator::RK4);

/// Daily (1/365 year) and monthly (1/12 year) grids over [0, n_years] with
/// annual observations at 0, 1, …, n_years.
std::pair<SolverGrid, SolverGrid> standard_grids(int n_years);

/// Grid over [0, n_years] with `steps_per_year` steps and annual observations.
SolverGrid annual_grid(int n_years, int steps_per_year);

}  // namespace tsam
