#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "epiident/integrator.hpp"
#include "epiident/models.hpp"

namespace epiident {

// Euclidean norm of (a - b) scaled by the population size.
double trajectory_distance(std::span<const double> a, std::span<const double> b,
                           double N);
double trajectory_distance(const IncidenceSeries& a, const IncidenceSeries& b,
                           double N);

// Daily new infections over horizon_days full days (integration grid of one
// sample per day).
IncidenceSeries incidence_curve(ModelKind kind, const EpidemicParams& p,
                                double horizon_days, double rel_tol = 1e-8,
                                double abs_tol = 1e-10);

struct GridRange {
  double lo = 0;  // excluded
  double hi = 0;  // included
  std::size_t count = 0;
};

// count points on (lo, hi]: lo + (hi - lo) * k / count, k = 1..count. The
// open low end keeps degenerate boundary values (tau = 0, pairwise n = 2)
// off the grid while still covering the closed high end exactly.
std::vector<double> grid_open_low(const GridRange& r);

struct DistanceSurface {
  ModelKind kind{};
  EpidemicParams master;
  double horizon_days = 0;
  std::vector<double> tau_grid;
  std::vector<double> n_grid;
  // Row-major over tau: D[i * n_grid.size() + j] pairs tau_grid[i] with
  // n_grid[j]. NaN marks a grid point whose integration failed.
  std::vector<double> D;

  double at(std::size_t tau_index, std::size_t n_index) const {
    return D[tau_index * n_grid.size() + n_index];
  }
};

// Distance between each grid trajectory and the master trajectory, every
// cell seeded like the master (same N, same I0, pair counts rebuilt for the
// cell's degree). Requires a supercritical master whose daily incidence has
// fallen below 1e-6 * N by the horizon. max_threads caps the OpenMP team;
// 0 means the runtime default. Cell results do not depend on the schedule.
DistanceSurface distance_surface(const EpidemicParams& master, ModelKind kind,
                                 std::span<const double> tau_grid,
                                 std::span<const double> n_grid,
                                 double horizon_days, int max_threads = 0);
DistanceSurface distance_surface(const EpidemicParams& master, ModelKind kind,
                                 const GridRange& tau_range,
                                 const GridRange& n_range, double horizon_days,
                                 int max_threads = 0);

// Single-threaded reference sweep; bitwise-identical to the parallel version.
DistanceSurface distance_surface_serial(const EpidemicParams& master,
                                        ModelKind kind,
                                        std::span<const double> tau_grid,
                                        std::span<const double> n_grid,
                                        double horizon_days);

}  // namespace epiident
