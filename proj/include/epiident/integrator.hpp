#pragma once

#include <vector>

#include "epiident/models.hpp"

namespace epiident {

// Solution sampled on the uniform grid t = 0, dt_out, 2*dt_out, ..., t_end.
struct Trajectory {
  ModelKind kind{};
  EpidemicParams params;
  double dt_out = 0;
  std::vector<double> times;
  std::vector<StateVector> states;
};

// Adaptive embedded Runge-Kutta 5(4) with PI step control and dense output
// onto the uniform grid. t_end must be a positive multiple of dt_out.
// Tolerances live in (0, 1e-2]. Throws StepSizeUnderflowError when the
// accepted step falls below 1e-12 * t_end and IntegrationError when a state
// leaves its admissible region by more than the numerical slack.
Trajectory integrate(ModelKind kind, const EpidemicParams& p, double t_end,
                     double dt_out, double rel_tol = 1e-8, double abs_tol = 1e-10);

// Susceptible count at a grid index: S, [S], or N*phiS0*psi(theta).
double susceptible_count(const Trajectory& traj, std::size_t index);

// Cumulative infections C(t) = N - susceptible_count.
double cumulative_infections(const Trajectory& traj, std::size_t index);

// Infectious counts on the whole grid. The EBCM does not carry prevalence as
// a state, so it is reconstructed by integrating the recovery flow along the
// sampled cumulative curve (trapezoidal, second order in dt_out).
std::vector<double> prevalence_series(const Trajectory& traj);

// Final susceptible fraction used by the final-size relations:
// S/N, [S]/N, or psi(theta) without the phiS0 factor.
double final_susceptible_fraction(const Trajectory& traj);

struct IncidenceSeries {
  double day = 1.0;
  std::vector<double> new_cases;  // entry k-1 covers day k, k = 1..floor(t_end)
};

// Differences of cumulative infections at whole days. The trajectory grid
// must step through each day boundary exactly (1/dt_out integral).
IncidenceSeries daily_incidence(const Trajectory& traj);

}  // namespace epiident
