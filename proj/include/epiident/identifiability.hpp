#pragma once

#include <span>
#include <utility>
#include <vector>

#include "epiident/models.hpp"

namespace epiident {

// Reduced one-variable form of the intersection problem: the eigenvalue and
// final-size curves cross where gamma * weight(s_inf) * f(n) = lambda + gamma.
//
//   PairwiseKappaNm1:  f(n) = (s^(1/n) - s^(2/n)) / (s^(2/n) - s) * (n - 2),
//                      weight 1, increasing in n on the admissible range
//   EbcmPoisson:       f(n) = (n - 1) / (n - q), q = ln(s)/(s - 1),
//                      weight q, decreasing towards 1, domain n > q
double reduced_f(ModelKind kind, double n, double s_inf);

struct ReducedFLimits {
  double lower;     // infimum of f over its domain
  double upper;     // supremum (may be +infinity)
  bool increasing;  // monotone direction in n
};

ReducedFLimits reduced_f_limits(ModelKind kind, double s_inf);

struct Intersection {
  double n_star;
  double tau_star;
};

// Degree and rate at which the two observable curves cross, from the scalar
// reduced equation. Bisected to machine width on the first sign-change
// bracket; the residual |gamma*weight*f(n_star) - (lambda + gamma)| is
// verified below 1e-12. Compartmental throws StrongUnidentifiabilityError:
// with l(n) = n both curves constrain only the product tau*n. PairwiseKappa1
// shares both curves with EbcmPoisson and is solved through it.
Intersection solve_intersection(ModelKind kind, double lambda, double s_inf,
                                double gamma);

struct EpsilonSet {
  double epsilon;
  double n_star;
  double f_star;
  // Open intervals of n where |f(n) - f(n_star)| < epsilon; the last upper
  // bound may be +infinity.
  std::vector<std::pair<double, double>> intervals;
  bool infinite_measure;
};

// Degrees observationally indistinguishable from n_star at tolerance epsilon
// on the reduced curve. Endpoints come from bisection against the monotone
// reduced form, never from grid scans.
EpsilonSet epsilon_solution_set(ModelKind kind, double lambda, double s_inf,
                                double gamma, double epsilon);

// Auxiliary function whose sign on (0, 1) decides the monotonicity of the
// pairwise reduced form; vanishes to third order at b = 1.
double h_function(double b, double n);

struct PropositionRow {
  double s_inf;
  bool increasing;  // f strictly increasing across the n grid
  bool bounded;     // every f value strictly inside (lower, upper) limits
};

struct PropositionReport {
  std::vector<PropositionRow> rows;
  double smallest_passing_s;  // NaN when no suffix of the s grid passes
  bool all_pass;
};

// Empirical check of the monotonicity-and-bounds claim for the pairwise
// reduced form over a grid of final sizes; reports per-row outcomes instead
// of throwing.
PropositionReport proposition_check(std::span<const double> s_grid,
                                    std::span<const double> n_grid);

std::vector<double> linspace(double lo, double hi, std::size_t count);
std::vector<double> geomspace(double lo, double hi, std::size_t count);

}  // namespace epiident
