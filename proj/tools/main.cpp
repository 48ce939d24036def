// epiident: mean-field SIR models, their observables, and (tau, n)
// identifiability experiments, driven from the command line. Every number is
// printed in shortest round-trip form so identical invocations produce
// byte-identical output.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "epiident/csv.hpp"
#include "epiident/errors.hpp"
#include "epiident/identifiability.hpp"
#include "epiident/integrator.hpp"
#include "epiident/models.hpp"
#include "epiident/observables.hpp"
#include "epiident/surface.hpp"

namespace {

using namespace epiident;

std::string fmt(double x) { return csv::format_double(x); }

ModelKind require_kind(const std::string& name) {
  ModelKind kind{};
  if (!parse_model_kind(name, kind))
    throw InvalidArgumentError(
        "unknown model '" + name +
        "' (expected compartmental, pairwise-nm1, pairwise-k1, or ebcm)");
  return kind;
}

int env_thread_cap() {
  const char* raw = std::getenv("EPIIDENT_THREADS");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1)
    throw InvalidArgumentError("EPIIDENT_THREADS must be a positive integer");
  return static_cast<int>(v);
}

struct ModelArgs {
  std::string model;
  double tau = 0;
  double gamma = 0;
  double n = 0;
  double N = 10000;
  double i0 = 1;
};

void add_model_options(CLI::App* cmd, ModelArgs& a, bool with_population = true) {
  cmd->add_option("--model,-m", a.model, "model kind")->required();
  cmd->add_option("--tau", a.tau, "transmission rate per S-I link")->required();
  cmd->add_option("--gamma", a.gamma, "recovery rate")->required();
  cmd->add_option("--n", a.n, "mean degree")->required();
  if (with_population) {
    cmd->add_option("--N", a.N, "population size");
    cmd->add_option("--i0", a.i0, "initially infected");
  }
}

EpidemicParams build_params(ModelKind kind, const ModelArgs& a) {
  EpidemicParams p;
  p.tau = a.tau;
  p.gamma = a.gamma;
  p.n = a.n;
  p.N = a.N;
  p.init = default_initial_conditions(kind, a.N, a.i0, a.n);
  validate_params(kind, p);
  return p;
}

// Observables generated from a master (tau, n, gamma) triple, or taken
// directly from --lambda/--s-inf.
struct ObservableArgs {
  std::string model;
  double gamma = 0;
  std::optional<double> lambda;
  std::optional<double> s_inf;
  std::optional<double> tau;
  std::optional<double> n;

  ModelKind kind() const { return require_kind(model); }

  std::pair<double, double> resolve() const {
    if (lambda && s_inf) return {*lambda, *s_inf};
    if (tau && n) {
      const ModelKind k = require_kind(model);
      return {leading_eigenvalue(k, *tau, gamma, *n),
              final_size_implicit(k, *tau, gamma, *n).s_inf};
    }
    throw InvalidArgumentError(
        "need either --lambda and --s-inf, or a master --tau and --n");
  }
};

void add_observable_options(CLI::App* cmd, ObservableArgs& a) {
  cmd->add_option("--model,-m", a.model, "model kind")->required();
  cmd->add_option("--gamma", a.gamma, "recovery rate")->required();
  cmd->add_option("--lambda", a.lambda, "leading eigenvalue");
  cmd->add_option("--s-inf", a.s_inf, "final susceptible fraction");
  cmd->add_option("--tau", a.tau, "master transmission rate");
  cmd->add_option("--n", a.n, "master mean degree");
}

const char* state_columns(ModelKind kind) {
  switch (kind) {
    case ModelKind::Compartmental: return "S,I";
    case ModelKind::EbcmPoisson: return "theta";
    default: return "S,I,SI,SS";
  }
}

int cmd_simulate(const ModelArgs& a, double t_end, double dt_out, double rel_tol,
                 double abs_tol, const std::string& out_path) {
  const ModelKind kind = require_kind(a.model);
  const EpidemicParams p = build_params(kind, a);
  const Trajectory traj = integrate(kind, p, t_end, dt_out, rel_tol, abs_tol);
  const std::vector<double> prev = prevalence_series(traj);

  // daily_cases is the trailing one-day difference of cumulative infections;
  // it needs the grid to step through whole days and is zero until t = 1.
  const double per_day_real = 1.0 / dt_out;
  const long per_day = std::lround(per_day_real);
  const bool day_aligned =
      per_day >= 1 && std::abs(per_day * dt_out - 1.0) <= 1e-9;

  csv::Table t;
  std::string header = "t,";
  header += state_columns(kind);
  header += ",prevalence,cumulative,daily_cases";
  for (std::size_t start = 0, end = 0; end <= header.size(); ++end)
    if (end == header.size() || header[end] == ',') {
      t.header.emplace_back(header.substr(start, end - start));
      start = end + 1;
    }

  const std::size_t dim = state_dim(kind);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    auto& row = t.rows.emplace_back();
    row.push_back(fmt(traj.times[k]));
    for (std::size_t i = 0; i < dim; ++i) row.push_back(fmt(traj.states[k][i]));
    row.push_back(fmt(prev[k]));
    const double cum = cumulative_infections(traj, k);
    row.push_back(fmt(cum));
    double daily = 0;
    if (day_aligned && k >= static_cast<std::size_t>(per_day))
      daily = cum - cumulative_infections(traj, k - per_day);
    row.push_back(fmt(daily));
  }
  csv::write_file(out_path, t);
  return 0;
}

int cmd_observables(const ModelArgs& a, bool verify_ode, double t_end) {
  const ModelKind kind = require_kind(a.model);
  const EpidemicParams p = build_params(kind, a);
  const double phiS0 = kind == ModelKind::EbcmPoisson ? p.init.phiS0 : 1.0;
  const double lambda = leading_eigenvalue(kind, a.tau, a.gamma, a.n);
  const FinalSize fs = final_size_implicit(kind, a.tau, a.gamma, a.n, phiS0);

  std::cout << "lambda=" << fmt(lambda) << "\n";
  std::cout << "s_inf=" << fmt(fs.s_inf) << "\n";
  std::cout << "r_inf=" << fmt(1.0 - fs.s_inf) << "\n";
  if (fs.subcritical)
    std::cout << "warning: subcritical parameters (lambda <= 0), no epidemic\n";
  if (verify_ode) {
    const Trajectory traj = integrate(kind, p, t_end, t_end);
    const double s_ode = final_susceptible_fraction(traj);
    std::cout << "s_inf_ode=" << fmt(s_ode) << "\n";
    std::cout << "difference=" << fmt(std::abs(s_ode - fs.s_inf)) << "\n";
  }
  return 0;
}

int cmd_curves(const ObservableArgs& a, double n_min, double n_max,
               std::size_t n_count, const std::string& out_path) {
  const ModelKind kind = a.kind();
  const auto [lambda, s_inf] = a.resolve();
  if (!(s_inf > 0) || !(s_inf < 1))
    throw InvalidArgumentError("curves need a supercritical s_inf in (0, 1)");

  csv::Table t;
  t.header = {"n", "tau_eigenvalue", "tau_finalsize"};
  std::string omitted;
  for (double n : linspace(n_min, n_max, n_count)) {
    double tl = 0, ts = 0;
    bool in_domain = true;
    try {
      tl = tau_on_eigenvalue_curve(kind, lambda, a.gamma, n);
      ts = tau_on_finalsize_curve(kind, s_inf, a.gamma, n);
    } catch (const InvalidArgumentError&) {
      in_domain = false;
    } catch (const DegenerateCurveError&) {
      in_domain = false;
    }
    // a non-positive tau marks the unphysical branch (EBCM below n = q)
    if (in_domain && tl > 0 && ts > 0)
      t.rows.push_back({fmt(n), fmt(tl), fmt(ts)});
    else
      omitted += ' ' + fmt(n);
  }

  try {
    const Intersection hit = solve_intersection(kind, lambda, s_inf, a.gamma);
    t.comments.push_back("n_star=" + fmt(hit.n_star) +
                         ", tau_star=" + fmt(hit.tau_star));
  } catch (const NoIntersectionError&) {
    t.comments.emplace_back("no_intersection");
  } catch (const StrongUnidentifiabilityError&) {
    t.comments.emplace_back("strongly_unidentifiable: curves coincide");
  }
  if (!omitted.empty())
    t.comments.push_back("omitted out-of-domain n:" + omitted);
  csv::write_file(out_path, t);
  return 0;
}

int cmd_surface(const ModelArgs& a, const GridRange& tau_range,
                const GridRange& n_range, double horizon,
                const std::string& out_path) {
  const ModelKind kind = require_kind(a.model);
  const EpidemicParams master = build_params(kind, a);
  const DistanceSurface s =
      distance_surface(master, kind, tau_range, n_range, horizon, env_thread_cap());

  csv::Table t;
  t.comments.push_back("master tau=" + fmt(a.tau) + ", n=" + fmt(a.n) +
                       ", gamma=" + fmt(a.gamma) + ", N=" + fmt(a.N) +
                       ", horizon_days=" + fmt(horizon));
  t.header = {"tau", "n", "D"};
  for (std::size_t j = 0; j < s.n_grid.size(); ++j)
    for (std::size_t i = 0; i < s.tau_grid.size(); ++i)
      t.rows.push_back({fmt(s.tau_grid[i]), fmt(s.n_grid[j]), fmt(s.at(i, j))});
  csv::write_file(out_path, t);
  return 0;
}

int cmd_ident_report(const ObservableArgs& a, const std::vector<double>& epsilons,
                     const std::string& profile_path, double n_min, double n_max,
                     std::size_t n_count) {
  const ModelKind kind = a.kind();
  const auto [lambda, s_inf] = a.resolve();
  const Intersection hit = solve_intersection(kind, lambda, s_inf, a.gamma);
  const double f_star = reduced_f(kind, hit.n_star, s_inf);
  const ReducedFLimits lim = reduced_f_limits(kind, s_inf);

  std::cout << "model=" << to_string(kind) << "\n";
  std::cout << "lambda=" << fmt(lambda) << "\n";
  std::cout << "s_inf=" << fmt(s_inf) << "\n";
  std::cout << "n_star=" << fmt(hit.n_star) << "\n";
  std::cout << "tau_star=" << fmt(hit.tau_star) << "\n";
  std::cout << "f_star=" << fmt(f_star) << "\n";
  if (kind == ModelKind::PairwiseKappaNm1) {
    std::cout << "f_limit_n2=" << fmt(lim.lower) << "\n";
    std::cout << "f_limit_inf=" << fmt(lim.upper) << "\n";
    std::cout << "f_band_width=" << fmt(lim.upper - lim.lower) << "\n";
  } else {
    std::cout << "q=" << fmt(std::log(s_inf) / (s_inf - 1)) << "\n";
    std::cout << "f_limit_inf=" << fmt(lim.lower) << "\n";
  }
  for (double eps : epsilons) {
    const EpsilonSet set =
        epsilon_solution_set(kind, lambda, s_inf, a.gamma, eps);
    std::cout << "epsilon=" << fmt(eps) << " interval=(";
    std::cout << fmt(set.intervals[0].first) << ","
              << fmt(set.intervals[0].second) << ")";
    std::cout << " infinite_measure=" << (set.infinite_measure ? "true" : "false")
              << "\n";
  }

  if (!profile_path.empty()) {
    csv::Table t;
    t.header = {"n", "f"};
    for (double n : linspace(n_min, n_max, n_count)) {
      try {
        t.rows.push_back({fmt(n), fmt(reduced_f(kind, n, s_inf))});
      } catch (const InvalidArgumentError&) {
        // out-of-domain grid points are simply not part of the profile
      }
    }
    csv::write_file(profile_path, t);
  }
  return 0;
}

int cmd_solve_rates(const ObservableArgs& a, double n) {
  const auto [lambda, s_inf] = a.resolve();
  const RatePair rates = solve_tau_gamma(a.kind(), n, lambda, s_inf);
  std::cout << "tau=" << fmt(rates.tau) << "\n";
  std::cout << "gamma=" << fmt(rates.gamma) << "\n";
  return 0;
}

int cmd_proposition_check(double s_min, double s_max, std::size_t s_count,
                          double n_min, double n_max, std::size_t n_count) {
  std::vector<double> s_grid = linspace(s_min, s_max, s_count);
  const std::vector<double> n_grid = geomspace(n_min, n_max, n_count);
  const PropositionReport report = proposition_check(s_grid, n_grid);
  for (const auto& row : report.rows)
    std::cout << "s_inf=" << fmt(row.s_inf) << " increasing="
              << (row.increasing ? "true" : "false")
              << " bounded=" << (row.bounded ? "true" : "false") << "\n";
  std::cout << "all_pass=" << (report.all_pass ? "true" : "false") << "\n";
  std::cout << "smallest_passing_s=" << fmt(report.smallest_passing_s) << "\n";

  const double d = 1e-5;  // small enough that the h'''' truncation term
                          // stays below the reported 1e-6 threshold
  for (double n : {3.0, 6.0, 10.0}) {
    const double h1 = h_function(1.0, n);
    const double dh = (h_function(1 + d, n) - h_function(1 - d, n)) / (2 * d);
    const double ddh =
        (h_function(1 + d, n) - 2 * h1 + h_function(1 - d, n)) / (d * d);
    const double dddh = (h_function(1 + 2 * d, n) - 2 * h_function(1 + d, n) +
                         2 * h_function(1 - d, n) - h_function(1 - 2 * d, n)) /
                        (2 * d * d * d);
    bool positive = true;
    for (double b = 0.95; b < 1.0 - 1e-12; b += 1e-3)
      if (!(h_function(b, n) > 0)) positive = false;
    std::cout << "h n=" << fmt(n) << " h(1)=" << fmt(h1) << " dh=" << fmt(dh)
              << " ddh=" << fmt(ddh) << " dddh=" << fmt(dddh)
              << " positive_left_of_1=" << (positive ? "true" : "false") << "\n";
  }
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"network SIR observables and (tau, n) identifiability toolkit"};
  app.require_subcommand(1);

  // simulate
  ModelArgs sim_args;
  double t_end = 150, dt_out = 0.25, rel_tol = 1e-8, abs_tol = 1e-10;
  std::string sim_out;
  CLI::App* sim = app.add_subcommand("simulate", "integrate one trajectory");
  add_model_options(sim, sim_args);
  sim->add_option("--t-end", t_end, "final time (days)");
  sim->add_option("--dt-out", dt_out, "output grid spacing");
  sim->add_option("--rel-tol", rel_tol, "relative tolerance");
  sim->add_option("--abs-tol", abs_tol, "absolute tolerance");
  sim->add_option("--output,-o", sim_out, "trajectory CSV path")->required();

  // observables
  ModelArgs obs_args;
  bool verify_ode = false;
  double obs_t_end = 2000;
  CLI::App* obs = app.add_subcommand("observables",
                                     "leading eigenvalue and final size");
  add_model_options(obs, obs_args);
  obs->add_flag("--verify-ode", verify_ode,
                "also integrate and report the trajectory final size");
  obs->add_option("--t-end", obs_t_end, "integration horizon for --verify-ode");

  // curves
  ObservableArgs curve_args;
  double cn_min = 2.5, cn_max = 20;
  std::size_t ccount = 100;
  std::string curves_out;
  CLI::App* curves = app.add_subcommand(
      "curves", "tau(n) from the eigenvalue and from the final size");
  add_observable_options(curves, curve_args);
  curves->add_option("--n-min", cn_min, "degree grid start");
  curves->add_option("--n-max", cn_max, "degree grid end");
  curves->add_option("--n-count", ccount, "degree grid size");
  curves->add_option("--output,-o", curves_out, "curves CSV path")->required();

  // surface
  ModelArgs surf_args;
  GridRange tau_range{0.0, 1.2, 60}, n_range{2.0, 10.0, 60};
  double horizon = 365;
  std::string surf_out;
  CLI::App* surf = app.add_subcommand(
      "surface", "distance to the master daily-incidence curve over a grid");
  add_model_options(surf, surf_args);
  surf->add_option("--tau-min", tau_range.lo, "tau window start (excluded)");
  surf->add_option("--tau-max", tau_range.hi, "tau window end (included)");
  surf->add_option("--tau-count", tau_range.count, "tau grid size");
  surf->add_option("--n-min", n_range.lo, "degree window start (excluded)");
  surf->add_option("--n-max", n_range.hi, "degree window end (included)");
  surf->add_option("--n-count", n_range.count, "degree grid size");
  surf->add_option("--horizon", horizon, "comparison window in days");
  surf->add_option("--output,-o", surf_out, "surface CSV path")->required();

  // ident-report
  ObservableArgs ident_args;
  std::vector<double> epsilons;
  std::string profile_path;
  double pn_min = 2.01, pn_max = 100;
  std::size_t pn_count = 200;
  CLI::App* ident = app.add_subcommand(
      "ident-report", "intersection, reduced-function band, epsilon sets");
  add_observable_options(ident, ident_args);
  ident->add_option("--epsilon", epsilons, "report the near-solution set for "
                                           "this tolerance (repeatable)");
  ident->add_option("--f-profile", profile_path, "write an n,f CSV here");
  ident->add_option("--n-min", pn_min, "profile grid start");
  ident->add_option("--n-max", pn_max, "profile grid end");
  ident->add_option("--n-count", pn_count, "profile grid size");

  // solve-rates
  ObservableArgs rates_args;
  double rates_n = 0;
  CLI::App* rates = app.add_subcommand(
      "solve-rates", "recover (tau, gamma) from observables at fixed degree");
  add_observable_options(rates, rates_args);
  rates->add_option("--at-n", rates_n, "degree to solve at")->required();

  // proposition-check
  double ps_min = 0.1, ps_max = 0.95, pb_n_min = 2.01, pb_n_max = 500;
  std::size_t ps_count = 18, pb_n_count = 200;
  CLI::App* prop = app.add_subcommand(
      "proposition-check", "monotonicity and range bounds of the reduced f");
  prop->add_option("--s-min", ps_min, "smallest final susceptible fraction");
  prop->add_option("--s-max", ps_max, "largest final susceptible fraction");
  prop->add_option("--s-count", ps_count, "s grid size");
  prop->add_option("--n-min", pb_n_min, "degree grid start");
  prop->add_option("--n-max", pb_n_max, "degree grid end");
  prop->add_option("--n-count", pb_n_count, "degree grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (sim->parsed())
    return cmd_simulate(sim_args, t_end, dt_out, rel_tol, abs_tol, sim_out);
  if (obs->parsed()) return cmd_observables(obs_args, verify_ode, obs_t_end);
  if (curves->parsed())
    return cmd_curves(curve_args, cn_min, cn_max, ccount, curves_out);
  if (surf->parsed())
    return cmd_surface(surf_args, tau_range, n_range, horizon, surf_out);
  if (ident->parsed())
    return cmd_ident_report(ident_args, epsilons, profile_path, pn_min, pn_max,
                            pn_count);
  if (rates->parsed()) return cmd_solve_rates(rates_args, rates_n);
  if (prop->parsed())
    return cmd_proposition_check(ps_min, ps_max, ps_count, pb_n_min, pb_n_max,
                                 pb_n_count);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const UnidentifiableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
