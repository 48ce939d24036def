#include "epiident/models.hpp"

#include <cmath>
#include <string>

namespace epiident {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Compartmental: return "compartmental";
    case ModelKind::PairwiseKappaNm1: return "pairwise-nm1";
    case ModelKind::PairwiseKappa1: return "pairwise-k1";
    case ModelKind::EbcmPoisson: return "ebcm";
  }
  return "?";
}

bool parse_model_kind(std::string_view name, ModelKind& out) {
  if (name == "compartmental") out = ModelKind::Compartmental;
  else if (name == "pairwise-nm1") out = ModelKind::PairwiseKappaNm1;
  else if (name == "pairwise-k1") out = ModelKind::PairwiseKappa1;
  else if (name == "ebcm") out = ModelKind::EbcmPoisson;
  else return false;
  return true;
}

void validate_params(ModelKind kind, const EpidemicParams& p) {
  if (!(p.tau >= 0)) throw InvalidArgumentError("tau must be >= 0");
  if (!(p.gamma > 0)) throw InvalidArgumentError("gamma must be > 0");
  if (!(p.n > 0)) throw InvalidArgumentError("n must be > 0");
  if (!(p.N > 0)) throw InvalidArgumentError("N must be > 0");
  const InitialConditions& ic = p.init;
  switch (kind) {
    case ModelKind::Compartmental:
      if (ic.S0 < 0 || ic.I0 < 0) throw InvalidArgumentError("S0, I0 must be >= 0");
      if (ic.S0 + ic.I0 > p.N * (1 + 1e-12))
        throw InvalidArgumentError("S0 + I0 exceeds N");
      break;
    case ModelKind::PairwiseKappaNm1:
    case ModelKind::PairwiseKappa1:
      if (ic.S0 < 0 || ic.I0 < 0 || ic.SS0 < 0 || ic.SI0 < 0)
        throw InvalidArgumentError("pairwise initial counts must be >= 0");
      if (ic.S0 + ic.I0 > p.N * (1 + 1e-12))
        throw InvalidArgumentError("S0 + I0 exceeds N");
      if (ic.SS0 + ic.SI0 > p.n * p.N * (1 + 1e-12))
        throw InvalidArgumentError("pair counts exceed n*N");
      break;
    case ModelKind::EbcmPoisson:
      if (!(ic.theta0 > 0) || ic.theta0 > 1)
        throw InvalidArgumentError("theta0 must be in (0, 1]");
      if (ic.phiS0 < 0 || ic.phiR0 < 0 || ic.phiS0 + ic.phiR0 > 1 + 1e-12)
        throw InvalidArgumentError("phiS0, phiR0 must be >= 0 with phiS0 + phiR0 <= 1");
      break;
  }
}

InitialConditions default_initial_conditions(ModelKind kind, double N, double I0,
                                             double n) {
  if (!(N > 0)) throw InvalidArgumentError("N must be > 0");
  if (!(I0 > 0) || !(I0 < N))
    throw InvalidArgumentError("seed must satisfy 0 < I0 < N");
  InitialConditions ic;
  const double S0 = N - I0;
  switch (kind) {
    case ModelKind::Compartmental:
      ic.S0 = S0;
      ic.I0 = I0;
      break;
    case ModelKind::PairwiseKappaNm1:
    case ModelKind::PairwiseKappa1:
      if (!(n > 0)) throw InvalidArgumentError("n must be > 0");
      ic.S0 = S0;
      ic.I0 = I0;
      ic.SS0 = n * S0 * S0 / N;
      ic.SI0 = n * S0 * I0 / N;
      break;
    case ModelKind::EbcmPoisson:
      ic.theta0 = 1;
      ic.phiS0 = S0 / N;
      ic.phiR0 = 0;
      break;
  }
  return ic;
}

StateVector initial_state(ModelKind kind, const EpidemicParams& p) {
  StateVector s;
  s.dim = state_dim(kind);
  switch (kind) {
    case ModelKind::Compartmental:
      s[0] = p.init.S0;
      s[1] = p.init.I0;
      break;
    case ModelKind::PairwiseKappaNm1:
    case ModelKind::PairwiseKappa1:
      s[0] = p.init.S0;
      s[1] = p.init.I0;
      s[2] = p.init.SI0;
      s[3] = p.init.SS0;
      break;
    case ModelKind::EbcmPoisson:
      s[0] = p.init.theta0;
      break;
  }
  return s;
}

double seed_infected(ModelKind kind, const EpidemicParams& p) {
  if (kind == ModelKind::EbcmPoisson)
    return p.N * (1.0 - p.init.phiS0 - p.init.phiR0);
  return p.init.I0;
}

bool rhs_raw(ModelKind kind, const double* y, const EpidemicParams& p,
             double* out) noexcept {
  switch (kind) {
    case ModelKind::Compartmental: {
      // Written through the product tau*n so that parameter pairs with equal
      // products evaluate identically.
      const double rate = p.tau * p.n;
      const double infection = rate * y[0] * y[1] / p.N;
      out[0] = -infection;
      out[1] = infection - p.gamma * y[1];
      break;
    }
    case ModelKind::PairwiseKappaNm1:
    case ModelKind::PairwiseKappa1: {
      const double S = y[0], I = y[1], SI = y[2], SS = y[3];
      if (!(S > 0)) return false;
      const double kappa =
          kind == ModelKind::PairwiseKappa1 ? 1.0 : (p.n - 1.0) / p.n;
      const double pressure = p.tau * kappa * SI / S;
      out[0] = -p.tau * SI;
      out[1] = p.tau * SI - p.gamma * I;
      out[2] = -(p.tau + p.gamma) * SI + pressure * (SS - SI);
      out[3] = -2.0 * pressure * SS;
      break;
    }
    case ModelKind::EbcmPoisson: {
      const double theta = y[0];
      out[0] = -p.tau * theta + p.tau * p.init.phiS0 * std::exp(p.n * (theta - 1.0)) +
               p.gamma * (1.0 - theta) + p.tau * p.init.phiR0;
      break;
    }
  }
  const std::size_t d = state_dim(kind);
  for (std::size_t i = 0; i < d; ++i)
    if (!std::isfinite(out[i])) return false;
  return true;
}

void rhs(ModelKind kind, std::span<const double> state, const EpidemicParams& p,
         std::span<double> out) {
  const std::size_t d = state_dim(kind);
  if (state.size() != d || out.size() != d)
    throw InvalidArgumentError("rhs: state dimension mismatch for model kind");
  if ((kind == ModelKind::PairwiseKappaNm1 || kind == ModelKind::PairwiseKappa1) &&
      !(state[0] > 0))
    throw SingularStateError("rhs: pairwise closure requires [S] > 0");
  if (!rhs_raw(kind, state.data(), p, out.data()))
    throw SingularStateError("rhs: derivative is not finite at this state");
}

}  // namespace epiident
