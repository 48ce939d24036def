#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "epiident/errors.hpp"

namespace epiident {

// Mean-field SIR families on a network with mean degree n.
enum class ModelKind {
  Compartmental,     // classic SIR with contact rate tau*n
  PairwiseKappaNm1,  // pair approximation, triple closure kappa = (n-1)/n
  PairwiseKappa1,    // pair approximation, triple closure kappa = 1
  EbcmPoisson,       // edge-based compartmental model, Poisson degree
};

const char* to_string(ModelKind kind);
bool parse_model_kind(std::string_view name, ModelKind& out);

// Which fields are meaningful depends on the model kind; unused fields are
// ignored by validation.
struct InitialConditions {
  double S0 = 0;      // susceptible individuals (Compartmental, Pairwise*)
  double I0 = 0;      // infected individuals (Compartmental, Pairwise*)
  double SS0 = 0;     // S-S pairs, both directions counted (Pairwise*)
  double SI0 = 0;     // S-I pairs, both directions counted (Pairwise*)
  double theta0 = 1;  // probability a random link has not transmitted (EBCM)
  double phiS0 = 1;   // probability the link's far node started susceptible (EBCM)
  double phiR0 = 0;   // probability the link's far node started recovered (EBCM)
};

struct EpidemicParams {
  double tau = 0;    // per-link transmission rate
  double gamma = 0;  // recovery rate
  double n = 0;      // mean degree
  double N = 0;      // population size
  InitialConditions init;
};

// State layout per kind:
//   Compartmental    (S, I)            dim 2
//   Pairwise*        ([S],[I],[SI],[SS]) dim 4
//   EbcmPoisson      (theta)           dim 1
constexpr std::size_t max_state_dim = 4;

constexpr std::size_t state_dim(ModelKind kind) {
  switch (kind) {
    case ModelKind::Compartmental: return 2;
    case ModelKind::PairwiseKappaNm1: return 4;
    case ModelKind::PairwiseKappa1: return 4;
    case ModelKind::EbcmPoisson: return 1;
  }
  return 0;
}

// Fixed-capacity state; only the first dim entries are meaningful.
struct StateVector {
  std::array<double, max_state_dim> v{};
  std::size_t dim = 0;

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  const double* data() const { return v.data(); }
  double* data() { return v.data(); }
};

// Throws InvalidArgumentError on rate/size/initial-condition violations.
void validate_params(ModelKind kind, const EpidemicParams& p);

// Seeds I0 infected into an otherwise susceptible population of size N.
// Pairwise pair counts follow the binomial mixing convention
// [XY]0 = n*X0*Y0/N; EBCM starts at theta0 = 1 with phiS0 = (N-I0)/N.
InitialConditions default_initial_conditions(ModelKind kind, double N, double I0,
                                             double n);

StateVector initial_state(ModelKind kind, const EpidemicParams& p);

// Number of initially infected implied by the initial conditions.
double seed_infected(ModelKind kind, const EpidemicParams& p);

// Time derivative of the state. Throws InvalidArgumentError on a dimension
// mismatch and SingularStateError when a pairwise state has [S] <= 0.
void rhs(ModelKind kind, std::span<const double> state, const EpidemicParams& p,
         std::span<double> out);

// Non-throwing variant used inside the integrator's stage loop: returns false
// when the state lies outside the model domain or a derivative is non-finite,
// so the caller can shrink the step instead of unwinding.
bool rhs_raw(ModelKind kind, const double* state, const EpidemicParams& p,
             double* out) noexcept;

}  // namespace epiident
