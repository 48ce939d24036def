#include "epiident/surface.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <limits>

#include "epiident/errors.hpp"
#include "epiident/observables.hpp"

namespace epiident {

double trajectory_distance(std::span<const double> a, std::span<const double> b,
                           double N) {
  if (a.size() != b.size())
    throw InvalidArgumentError("trajectory_distance: length mismatch");
  if (!(N > 0)) throw InvalidArgumentError("trajectory_distance: N must be > 0");
  double sum = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum) / N;
}

double trajectory_distance(const IncidenceSeries& a, const IncidenceSeries& b,
                           double N) {
  return trajectory_distance(std::span<const double>(a.new_cases),
                             std::span<const double>(b.new_cases), N);
}

IncidenceSeries incidence_curve(ModelKind kind, const EpidemicParams& p,
                                double horizon_days, double rel_tol,
                                double abs_tol) {
  if (!(horizon_days >= 1))
    throw InvalidArgumentError("incidence_curve: horizon must be >= 1 day");
  const double t_end = std::floor(horizon_days + 1e-9);
  return daily_incidence(integrate(kind, p, t_end, 1.0, rel_tol, abs_tol));
}

std::vector<double> grid_open_low(const GridRange& r) {
  if (r.count < 2) throw InvalidArgumentError("grid needs at least 2 points");
  if (!(r.hi > r.lo)) throw InvalidArgumentError("grid needs hi > lo");
  std::vector<double> v(r.count);
  for (std::size_t k = 1; k <= r.count; ++k)
    v[k - 1] = r.lo + (r.hi - r.lo) * static_cast<double>(k) /
                          static_cast<double>(r.count);
  v.back() = r.hi;
  return v;
}

namespace {

void validate_surface_inputs(const EpidemicParams& master, ModelKind kind,
                             std::span<const double> tau_grid,
                             std::span<const double> n_grid,
                             double horizon_days,
                             const IncidenceSeries& master_curve) {
  if (tau_grid.size() < 2 || n_grid.size() < 2)
    throw InvalidArgumentError("distance_surface: grid must be at least 2x2");
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > tau_grid[i - 1]))
      throw InvalidArgumentError("distance_surface: tau grid must increase");
  for (std::size_t j = 1; j < n_grid.size(); ++j)
    if (!(n_grid[j] > n_grid[j - 1]))
      throw InvalidArgumentError("distance_surface: n grid must increase");
  if (!(leading_eigenvalue(kind, master.tau, master.gamma, master.n) > 0))
    throw InvalidArgumentError("distance_surface: master must be supercritical");
  if (!(master_curve.new_cases.back() < 1e-6 * master.N))
    throw InvalidArgumentError(
        "distance_surface: horizon too short, master incidence has not died "
        "out");
  (void)horizon_days;
}

// One grid cell: rebuild the seeding for the cell's degree, integrate,
// compare. Integration failures poison only this cell.
double cell_distance(const EpidemicParams& master, ModelKind kind, double tau,
                     double n, double horizon_days,
                     const IncidenceSeries& master_curve) {
  EpidemicParams p = master;
  p.tau = tau;
  p.n = n;
  p.init = default_initial_conditions(kind, master.N, master.init.I0, n);
  try {
    return trajectory_distance(incidence_curve(kind, p, horizon_days),
                               master_curve, master.N);
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

DistanceSurface sweep(const EpidemicParams& master, ModelKind kind,
                      std::span<const double> tau_grid,
                      std::span<const double> n_grid, double horizon_days,
                      bool parallel, int max_threads) {
  const IncidenceSeries master_curve =
      incidence_curve(kind, master, horizon_days);
  validate_surface_inputs(master, kind, tau_grid, n_grid, horizon_days,
                          master_curve);

  DistanceSurface s;
  s.kind = kind;
  s.master = master;
  s.horizon_days = horizon_days;
  s.tau_grid.assign(tau_grid.begin(), tau_grid.end());
  s.n_grid.assign(n_grid.begin(), n_grid.end());
  const std::size_t nt = tau_grid.size(), nn = n_grid.size();
  s.D.assign(nt * nn, 0.0);

  const auto cells = static_cast<long long>(nt * nn);
  if (!parallel) {
    for (long long c = 0; c < cells; ++c) {
      const std::size_t i = static_cast<std::size_t>(c) / nn;
      const std::size_t j = static_cast<std::size_t>(c) % nn;
      s.D[static_cast<std::size_t>(c)] = cell_distance(
          master, kind, tau_grid[i], n_grid[j], horizon_days, master_curve);
    }
    return s;
  }

  int team = omp_get_max_threads();
  if (max_threads > 0 && max_threads < team) team = max_threads;
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic) num_threads(team)
  for (long long c = 0; c < cells; ++c) {
    try {
      const std::size_t i = static_cast<std::size_t>(c) / nn;
      const std::size_t j = static_cast<std::size_t>(c) % nn;
      s.D[static_cast<std::size_t>(c)] = cell_distance(
          master, kind, tau_grid[i], n_grid[j], horizon_days, master_curve);
    } catch (...) {
#pragma omp critical(epiident_surface_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return s;
}

}  // namespace

DistanceSurface distance_surface(const EpidemicParams& master, ModelKind kind,
                                 std::span<const double> tau_grid,
                                 std::span<const double> n_grid,
                                 double horizon_days, int max_threads) {
  return sweep(master, kind, tau_grid, n_grid, horizon_days, true, max_threads);
}

DistanceSurface distance_surface(const EpidemicParams& master, ModelKind kind,
                                 const GridRange& tau_range,
                                 const GridRange& n_range, double horizon_days,
                                 int max_threads) {
  const auto taus = grid_open_low(tau_range);
  const auto ns = grid_open_low(n_range);
  return sweep(master, kind, taus, ns, horizon_days, true, max_threads);
}

DistanceSurface distance_surface_serial(const EpidemicParams& master,
                                        ModelKind kind,
                                        std::span<const double> tau_grid,
                                        std::span<const double> n_grid,
                                        double horizon_days) {
  return sweep(master, kind, tau_grid, n_grid, horizon_days, false, 0);
}

}  // namespace epiident
