#pragma once

#include "epiident/models.hpp"

namespace epiident {

// Multiplier l(n) in the leading eigenvalue lambda = tau*l(n) - gamma of the
// linearization at the disease-free state.
double contact_multiplier(ModelKind kind, double n);

double leading_eigenvalue(ModelKind kind, double tau, double gamma, double n);

struct FinalSize {
  double s_inf;      // final susceptible fraction (EBCM: psi(theta_inf))
  bool subcritical;  // true when lambda <= 0; s_inf is then 1 by convention
};

// Nontrivial root of the final-size relation, bracketed on (1e-12, 1 - 1e-6)
// and bisected to 1e-12 followed by one Newton polish. phiS0 only affects
// PairwiseKappa1 / EbcmPoisson.
FinalSize final_size_implicit(ModelKind kind, double tau, double gamma, double n,
                              double phiS0 = 1.0);

// tau required to produce a given leading eigenvalue at mean degree n.
double tau_on_eigenvalue_curve(ModelKind kind, double lambda, double gamma,
                               double n);

// tau required to produce a given final susceptible fraction at mean degree n,
// assuming an (almost) fully susceptible start. phiS0 as above.
double tau_on_finalsize_curve(ModelKind kind, double s_inf, double gamma, double n,
                              double phiS0 = 1.0);

// kappa = 1 closure admits a final-size relation for arbitrary initial pair
// counts; S0, SS0, SI0, S_inf are absolute counts on the same scale.
double tau_on_finalsize_curve_kappa1_general(double S0, double SS0, double SI0,
                                             double gamma, double S_inf);

struct RatePair {
  double tau;
  double gamma;
};

// Recovers (tau, gamma) from the observable pair (lambda, s_inf) at known n by
// solving the 2x2 linear system formed by the eigenvalue relation and the
// final-size relation. Throws DegeneratePairError when the system determinant
// vanishes relative to its row norms.
RatePair solve_tau_gamma(ModelKind kind, double n, double lambda, double s_inf);

}  // namespace epiident
