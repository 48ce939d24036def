#include "epiident/observables.hpp"

#include <cmath>

#include "rootfind.hpp"

namespace epiident {

namespace {

void check_rates(double tau, double gamma, double n) {
  if (!(tau >= 0)) throw InvalidArgumentError("tau must be >= 0");
  if (!(gamma > 0)) throw InvalidArgumentError("gamma must be > 0");
  if (!(n > 0)) throw InvalidArgumentError("n must be > 0");
}

void check_phi(double phiS0) {
  if (!(phiS0 > 0) || phiS0 > 1)
    throw InvalidArgumentError("phiS0 must be in (0, 1]");
}

constexpr double kDenomFloor = 1e-14;

}  // namespace

double contact_multiplier(ModelKind kind, double n) {
  if (!(n > 0)) throw InvalidArgumentError("n must be > 0");
  switch (kind) {
    case ModelKind::Compartmental: return n;
    case ModelKind::PairwiseKappaNm1: return n - 2.0;
    case ModelKind::PairwiseKappa1: return n - 1.0;
    case ModelKind::EbcmPoisson: return n - 1.0;
  }
  return 0;
}

double leading_eigenvalue(ModelKind kind, double tau, double gamma, double n) {
  check_rates(tau, gamma, n);
  if (kind == ModelKind::Compartmental) return tau * n - gamma;
  return tau * contact_multiplier(kind, n) - gamma;
}

namespace {

// Residual of the final-size relation in the final susceptible fraction s.
// Compartmental goes through the product tau*n so parameter pairs with equal
// products evaluate identically.
struct FinalSizeEq {
  ModelKind kind;
  double tau, gamma, n, phiS0;

  double operator()(double s) const {
    switch (kind) {
      case ModelKind::Compartmental: {
        const double rate = tau * n;
        return rate * (1.0 - s) + gamma * std::log(s);
      }
      case ModelKind::PairwiseKappaNm1: {
        const double s1 = std::pow(s, 1.0 / n);
        const double s2 = std::pow(s, 2.0 / n);
        return tau * (s - s2) + gamma * (s1 - s2);
      }
      case ModelKind::PairwiseKappa1:
      case ModelKind::EbcmPoisson:
        return tau * n * phiS0 * s - (tau + gamma) * std::log(s) - tau * n;
    }
    return 0;
  }

  double derivative(double s) const {
    switch (kind) {
      case ModelKind::Compartmental:
        return -(tau * n) + gamma / s;
      case ModelKind::PairwiseKappaNm1: {
        const double s1 = std::pow(s, 1.0 / n - 1.0);
        const double s2 = std::pow(s, 2.0 / n - 1.0);
        return tau * (1.0 - (2.0 / n) * s2) +
               gamma * ((1.0 / n) * s1 - (2.0 / n) * s2);
      }
      case ModelKind::PairwiseKappa1:
      case ModelKind::EbcmPoisson:
        return tau * n * phiS0 - (tau + gamma) / s;
    }
    return 0;
  }
};

}  // namespace

FinalSize final_size_implicit(ModelKind kind, double tau, double gamma, double n,
                              double phiS0) {
  check_rates(tau, gamma, n);
  check_phi(phiS0);
  const double lambda = leading_eigenvalue(kind, tau, gamma, n);
  if (lambda <= 0) return {1.0, true};

  const FinalSizeEq eq{kind, tau, gamma, n, phiS0};
  const double lo = 1e-12, hi = 1.0 - 1e-6;
  const double flo = eq(lo), fhi = eq(hi);
  if ((flo > 0) == (fhi > 0))
    throw RootBracketingError(
        "final_size_implicit: no sign change on (1e-12, 1 - 1e-6)");
  double root = detail::bisect(eq, lo, hi, flo, fhi, 1e-12);
  root = detail::newton_polish(
      eq, [&eq](double s) { return eq.derivative(s); }, root, 0.0, 1.0);
  // A root this close to 1 cannot be told apart from the trivial one.
  if (root > 1.0 - 1e-5)
    throw RootBracketingError(
        "final_size_implicit: root not separated from the trivial root s = 1");
  return {root, false};
}

double tau_on_eigenvalue_curve(ModelKind kind, double lambda, double gamma,
                               double n) {
  if (!(gamma > 0)) throw InvalidArgumentError("gamma must be > 0");
  const double l = contact_multiplier(kind, n);
  if (!(l > 0))
    throw InvalidArgumentError(
        "tau_on_eigenvalue_curve: contact multiplier must be positive");
  if (!(lambda + gamma > 0))
    throw InvalidArgumentError("tau_on_eigenvalue_curve: needs lambda + gamma > 0");
  return (lambda + gamma) / l;
}

double tau_on_finalsize_curve(ModelKind kind, double s_inf, double gamma, double n,
                              double phiS0) {
  if (!(gamma > 0)) throw InvalidArgumentError("gamma must be > 0");
  if (!(n > 0)) throw InvalidArgumentError("n must be > 0");
  if (!(s_inf > 0) || s_inf > 1)
    throw InvalidArgumentError("s_inf must be in (0, 1]");
  check_phi(phiS0);
  switch (kind) {
    case ModelKind::Compartmental: {
      const double den = n * (1.0 - s_inf);
      if (std::abs(den) < kDenomFloor)
        throw DegenerateCurveError("tau_on_finalsize_curve: denominator vanishes");
      return -gamma * std::log(s_inf) / den;
    }
    case ModelKind::PairwiseKappaNm1: {
      if (!(n > 2))
        throw InvalidArgumentError(
            "tau_on_finalsize_curve: pairwise curve needs n > 2");
      const double s1 = std::pow(s_inf, 1.0 / n);
      const double s2 = std::pow(s_inf, 2.0 / n);
      const double den = s2 - s_inf;
      if (std::abs(den) < kDenomFloor)
        throw DegenerateCurveError("tau_on_finalsize_curve: denominator vanishes");
      return gamma * (s1 - s2) / den;
    }
    case ModelKind::PairwiseKappa1:
      // Same relation as the EBCM; with a fully susceptible start it is also
      // the general pairwise initial-condition formula, which keeps the two
      // evaluation routes genuinely independent.
      if (phiS0 == 1.0)
        return tau_on_finalsize_curve_kappa1_general(1.0, n, 0.0, gamma, s_inf);
      [[fallthrough]];
    case ModelKind::EbcmPoisson: {
      const double logs = std::log(s_inf);
      const double den = n * phiS0 * s_inf - logs - n;
      if (std::abs(den) < kDenomFloor)
        throw DegenerateCurveError("tau_on_finalsize_curve: denominator vanishes");
      return gamma * logs / den;
    }
  }
  throw InvalidArgumentError("tau_on_finalsize_curve: unknown model kind");
}

double tau_on_finalsize_curve_kappa1_general(double S0, double SS0, double SI0,
                                             double gamma, double S_inf) {
  if (!(gamma > 0)) throw InvalidArgumentError("gamma must be > 0");
  if (!(S0 > 0)) throw InvalidArgumentError("S0 must be > 0");
  if (SS0 < 0 || SI0 < 0)
    throw InvalidArgumentError("pair counts must be >= 0");
  if (!(S_inf > 0) || S_inf > S0 * (1 + 1e-12))
    throw InvalidArgumentError("S_inf must be in (0, S0]");
  const double logratio = std::log(S_inf) - std::log(S0);
  const double num = gamma * S_inf * logratio;
  const double t1 = (SS0 / (S0 * S0)) * S_inf * S_inf;
  const double t2 = -S_inf * logratio;
  const double t3 = -(SI0 / S0 + SS0 / S0) * S_inf;
  const double den = t1 + t2 + t3;
  const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
  if (std::abs(den) < kDenomFloor * scale || scale == 0)
    throw DegenerateCurveError(
        "tau_on_finalsize_curve_kappa1_general: denominator vanishes");
  return num / den;
}

RatePair solve_tau_gamma(ModelKind kind, double n, double lambda, double s_inf) {
  if (!(n > 0)) throw InvalidArgumentError("n must be > 0");
  if (!(s_inf > 0) || s_inf > 1)
    throw InvalidArgumentError("s_inf must be in (0, 1]");
  const double l = contact_multiplier(kind, n);

  // Final-size relation written as a*tau + b*gamma = 0.
  double a = 0, b = 0;
  switch (kind) {
    case ModelKind::Compartmental:
      a = n * (1.0 - s_inf);
      b = std::log(s_inf);
      break;
    case ModelKind::PairwiseKappaNm1: {
      const double s1 = std::pow(s_inf, 1.0 / n);
      const double s2 = std::pow(s_inf, 2.0 / n);
      a = s_inf - s2;
      b = s1 - s2;
      break;
    }
    case ModelKind::PairwiseKappa1:
    case ModelKind::EbcmPoisson: {
      const double logs = std::log(s_inf);
      a = n * s_inf - logs - n;
      b = -logs;
      break;
    }
  }

  // [ l   -1 ] [tau  ]   [lambda]
  // [ a    b ] [gamma] = [  0   ]
  const double det = l * b + a;
  const double scale = std::hypot(l, 1.0) * std::hypot(a, b);
  if (std::abs(det) <= 1e-12 * scale)
    throw DegeneratePairError(
        "solve_tau_gamma: eigenvalue and final-size relations are parallel");
  return {lambda * b / det, -lambda * a / det};
}

}  // namespace epiident
