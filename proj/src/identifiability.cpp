#include "epiident/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epiident/observables.hpp"
#include "rootfind.hpp"

namespace epiident {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_s(double s_inf) {
  if (!(s_inf > 0) || !(s_inf < 1))
    throw InvalidArgumentError("s_inf must be in (0, 1)");
}

double ebcm_q(double s_inf) { return std::log(s_inf) / (s_inf - 1.0); }

// f2 = lim_{n->2} of the pairwise reduced form.
double pairwise_f2(double s) {
  return 2.0 * (s - std::sqrt(s)) / (s * std::log(s));
}

// f_inf = lim_{n->inf}; equals the EBCM weight q.
double pairwise_finf(double s) { return ebcm_q(s); }

// The textbook quotient (s^(1/n) - s^(2/n)) * (n-2) / (s^(2/n) - s) loses all
// digits as s^(2/n) - s -> 0 near n = 2. Writing the denominator as
// s*expm1(t) with t = ((2-n)/n)*ln s cancels the vanishing (n-2) factor
// exactly:
//   f(n) = -(s^(1/n) - s^(2/n)) * n / (s * ln s * phi(t)),
// with phi(t) = expm1(t)/t -> 1. The rewrite is algebraically identical and
// well conditioned for every n > 2, so it is used unconditionally.
double pairwise_f(double n, double s) {
  const double logs = std::log(s);
  const double s1 = std::pow(s, 1.0 / n);
  const double s2 = std::pow(s, 2.0 / n);
  const double t = ((2.0 - n) / n) * logs;
  const double phi = t == 0 ? 1.0 : std::expm1(t) / t;
  return -(s1 - s2) * n / (s * logs * phi);
}

}  // namespace

double reduced_f(ModelKind kind, double n, double s_inf) {
  check_s(s_inf);
  switch (kind) {
    case ModelKind::PairwiseKappaNm1:
      if (!(n > 2))
        throw InvalidArgumentError("reduced_f: pairwise form needs n > 2");
      return pairwise_f(n, s_inf);
    case ModelKind::EbcmPoisson: {
      const double q = ebcm_q(s_inf);
      if (!(n > q))
        throw InvalidArgumentError("reduced_f: EBCM form needs n > q");
      return (n - 1.0) / (n - q);
    }
    default:
      throw InvalidArgumentError(
          "reduced_f: defined for PairwiseKappaNm1 and EbcmPoisson only");
  }
}

ReducedFLimits reduced_f_limits(ModelKind kind, double s_inf) {
  check_s(s_inf);
  switch (kind) {
    case ModelKind::PairwiseKappaNm1:
      return {pairwise_f2(s_inf), pairwise_finf(s_inf), true};
    case ModelKind::EbcmPoisson:
      // f decreases from an unbounded left edge at n -> q towards 1.
      return {1.0, kInf, false};
    default:
      throw InvalidArgumentError(
          "reduced_f_limits: defined for PairwiseKappaNm1 and EbcmPoisson only");
  }
}

namespace {

// Smallest n > 2 with f(n) = target for the pairwise form. The curve is not
// assumed monotone: a geometric sweep of n - 2 locates the first sign-change
// bracket, which is then bisected to machine width.
double pairwise_first_crossing(double target, double s_inf) {
  const auto g = [&](double n) { return pairwise_f(n, s_inf) - target; };
  double prev_off = 1e-12;
  double prev_g = g(2.0 + prev_off);
  if (prev_g >= 0) {
    if (prev_g == 0) return 2.0 + prev_off;
    throw NoIntersectionError(
        "solve_intersection: target below the reduced curve's left limit");
  }
  constexpr double kGrowth = 1.0905077326652577;  // 2^(1/8)
  double off = 1e-6;
  for (int i = 0; i < 8 * 44; ++i) {  // reaches n - 2 ~ 1e7
    const double cur_g = g(2.0 + off);
    if (cur_g >= 0)
      return detail::bisect(g, 2.0 + prev_off, 2.0 + off, prev_g, cur_g, 0.0);
    prev_off = off;
    prev_g = cur_g;
    off *= kGrowth;
  }
  throw NoIntersectionError(
      "solve_intersection: the reduced curve never reaches the target");
}

// Unique n > q with f(n) = target for the EBCM form (strictly decreasing).
double ebcm_crossing(double target, double s_inf) {
  const double q = ebcm_q(s_inf);
  if (!(target > 1))
    throw NoIntersectionError(
        "solve_intersection: target at or below the reduced curve's limit");
  const auto g = [&](double n) { return reduced_f(ModelKind::EbcmPoisson, n, s_inf) - target; };
  double a = q * (1.0 + 1e-12) + 1e-300;
  double ga = g(a);
  if (ga <= 0) return a;
  double b = std::max(q * 2.0, q + 1.0);
  double gb = g(b);
  int guard = 0;
  while (gb > 0 && guard++ < 200) {
    a = b;
    ga = gb;
    b *= 2.0;
    gb = g(b);
  }
  if (gb > 0)
    throw NoIntersectionError("solve_intersection: no crossing found");
  return detail::bisect(g, a, b, ga, gb, 0.0);
}

}  // namespace

Intersection solve_intersection(ModelKind kind, double lambda, double s_inf,
                                double gamma) {
  if (!(gamma > 0)) throw InvalidArgumentError("gamma must be > 0");
  check_s(s_inf);
  if (kind == ModelKind::Compartmental)
    throw StrongUnidentifiabilityError(
        "solve_intersection: compartmental curves coincide; only tau*n is "
        "identified");
  // kappa = 1 shares both curves with the EBCM, so it shares the intersection.
  if (kind == ModelKind::PairwiseKappa1) kind = ModelKind::EbcmPoisson;
  if (!(lambda + gamma > 0))
    throw NoIntersectionError("solve_intersection: lambda + gamma must be > 0");

  double n_star = 0, weight = 1.0;
  if (kind == ModelKind::PairwiseKappaNm1) {
    const double target = (lambda + gamma) / gamma;
    n_star = pairwise_first_crossing(target, s_inf);
  } else {
    weight = ebcm_q(s_inf);
    const double target = (lambda + gamma) / (gamma * weight);
    n_star = ebcm_crossing(target, s_inf);
  }

  const double residual =
      std::abs(gamma * weight * reduced_f(kind, n_star, s_inf) - (lambda + gamma));
  if (!(residual < 1e-12))
    throw NumericalError("solve_intersection: residual did not converge");
  return {n_star, tau_on_eigenvalue_curve(kind, lambda, gamma, n_star)};
}

namespace {

// Endpoint of {n : f(n) = target} on the given side of n_star, under the
// monotone reduced form. Returns +-infinity when the target lies beyond the
// reachable range on that side.
double monotone_endpoint(ModelKind kind, double s_inf, double n_star,
                         double target, bool rightward) {
  const auto f = [&](double n) { return reduced_f(kind, n, s_inf); };
  const double f_star = f(n_star);
  const auto g = [&](double n) { return f(n) - target; };
  const double left_edge =
      kind == ModelKind::PairwiseKappaNm1 ? 2.0 : ebcm_q(s_inf);
  if (!rightward) {
    double a = left_edge * (1.0 + 1e-12) + (kind == ModelKind::PairwiseKappaNm1 ? 1e-12 : 0.0);
    const double ga = g(a);
    const double gs = f_star - target;
    if ((ga > 0) == (gs > 0)) return left_edge;  // target beyond the left edge
    return detail::bisect(g, a, n_star, ga, gs, 0.0);
  }
  double a = n_star, ga = f_star - target;
  double width = std::max(n_star - left_edge, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double b = left_edge + width * 2.0;
    const double gb = g(b);
    if ((gb > 0) != (ga > 0)) return detail::bisect(g, a, b, ga, gb, 0.0);
    a = b;
    ga = gb;
    width *= 2.0;
  }
  return kInf;
}

}  // namespace

EpsilonSet epsilon_solution_set(ModelKind kind, double lambda, double s_inf,
                                double gamma, double epsilon) {
  if (!(epsilon > 0)) throw InvalidArgumentError("epsilon must be > 0");
  if (kind == ModelKind::PairwiseKappa1) kind = ModelKind::EbcmPoisson;
  const Intersection is = solve_intersection(kind, lambda, s_inf, gamma);
  const double f_star = reduced_f(kind, is.n_star, s_inf);
  const ReducedFLimits lim = reduced_f_limits(kind, s_inf);

  EpsilonSet set;
  set.epsilon = epsilon;
  set.n_star = is.n_star;
  set.f_star = f_star;
  const double limit_at_inf = lim.increasing ? lim.upper : lim.lower;
  set.infinite_measure = epsilon >= std::abs(limit_at_inf - f_star);

  // For an increasing f the set is (f^-1(f*-eps), f^-1(f*+eps)); for a
  // decreasing f the targets swap sides.
  const double lo_target = lim.increasing ? f_star - epsilon : f_star + epsilon;
  const double hi_target = lim.increasing ? f_star + epsilon : f_star - epsilon;
  const double lo = monotone_endpoint(kind, s_inf, is.n_star, lo_target, false);
  const double hi = set.infinite_measure
                        ? kInf
                        : monotone_endpoint(kind, s_inf, is.n_star, hi_target, true);
  set.intervals.push_back({lo, hi});
  return set;
}

double h_function(double b, double n) {
  if (!(b > 0)) throw InvalidArgumentError("h_function: b must be > 0");
  if (!(n > 2)) throw InvalidArgumentError("h_function: n must be > 2");
  const double bn2 = std::pow(b, n - 2.0);
  const double bn1 = std::pow(b, n - 1.0);
  return n * (1.0 - b) * (1.0 - bn2) +
         (n - 2.0) * (1.0 + bn2 - 2.0 * bn1) * std::log(b);
}

PropositionReport proposition_check(std::span<const double> s_grid,
                                    std::span<const double> n_grid) {
  if (s_grid.empty() || n_grid.size() < 2)
    throw InvalidArgumentError("proposition_check: degenerate grid");
  for (double n : n_grid)
    if (!(n > 2))
      throw InvalidArgumentError("proposition_check: n grid must stay above 2");

  PropositionReport report;
  report.all_pass = true;
  report.smallest_passing_s = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> s_sorted(s_grid.begin(), s_grid.end());
  std::sort(s_sorted.begin(), s_sorted.end());
  for (double s : s_sorted) {
    const ReducedFLimits lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, s);
    bool increasing = true, bounded = true;
    double prev = -kInf;
    for (double n : n_grid) {
      const double f = pairwise_f(n, s);
      if (f <= prev) increasing = false;
      if (!(f > lim.lower && f < lim.upper)) bounded = false;
      prev = f;
    }
    report.rows.push_back({s, increasing, bounded});
    if (!(increasing && bounded)) report.all_pass = false;
  }
  // Smallest s whose whole suffix of larger tested values passes.
  for (auto it = report.rows.rbegin(); it != report.rows.rend(); ++it) {
    if (!(it->increasing && it->bounded)) break;
    report.smallest_passing_s = it->s_inf;
  }
  return report;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) throw InvalidArgumentError("linspace: needs count >= 2");
  if (!(hi > lo)) throw InvalidArgumentError("linspace: needs hi > lo");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  v.back() = hi;
  return v;
}

std::vector<double> geomspace(double lo, double hi, std::size_t count) {
  if (count < 2) throw InvalidArgumentError("geomspace: needs count >= 2");
  if (!(lo > 0) || !(hi > lo)) throw InvalidArgumentError("geomspace: needs hi > lo > 0");
  std::vector<double> v(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                              static_cast<double>(count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

}  // namespace epiident
