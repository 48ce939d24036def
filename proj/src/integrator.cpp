#include "epiident/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace epiident {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Error weights, 5th minus 4th order solution.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
constexpr double facc1 = 5.0;   // largest step shrink per step
constexpr double facc2 = 0.1;   // inverse of largest step growth

using Vec = std::array<double, max_state_dim>;

struct Stepper {
  ModelKind kind;
  const EpidemicParams& p;
  std::size_t dim;

  bool eval(const Vec& y, Vec& f) const noexcept {
    return rhs_raw(kind, y.data(), p, f.data());
  }
};

// Coefficients of the quartic interpolant over one accepted step.
struct DenseCoeffs {
  Vec r1, r2, r3, r4, r5;

  void collocate(std::size_t i, double y_old, double y_new, double h,
                 double k1, double k7, double contd5) {
    r1[i] = y_old;
    const double ydiff = y_new - y_old;
    r2[i] = ydiff;
    const double bspl = h * k1 - ydiff;
    r3[i] = bspl;
    r4[i] = ydiff - h * k7 - bspl;
    r5[i] = contd5;
  }

  double at(std::size_t i, double theta) const {
    const double theta1 = 1.0 - theta;
    return r1[i] +
           theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
  }
};

// Admissible-region check with numerical slack. Counts may undershoot zero by
// at most 1e-9 * N; the EBCM link probability stays in [0, 1] up to 1e-9.
void check_invariants(ModelKind kind, const Vec& y, std::size_t dim, double N) {
  if (kind == ModelKind::EbcmPoisson) {
    if (y[0] < -1e-9 || y[0] > 1.0 + 1e-9)
      throw IntegrationError("integrate: theta left [0, 1]");
    return;
  }
  const double slack = 1e-9 * N;
  for (std::size_t i = 0; i < dim; ++i)
    if (y[i] < -slack)
      throw IntegrationError("integrate: state component went negative");
}

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, std::size_t dim,
                  double rel_tol, double abs_tol) {
  double sum = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double sc = abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(dim));
}

// Step-size guess from the scaled sizes of the state and its first two
// derivatives, in the spirit of the usual starting-step heuristics.
double initial_step(const Stepper& st, const Vec& y0, const Vec& f0, double t_end,
                    double rel_tol, double abs_tol) {
  double dnf = 0, dny = 0;
  for (std::size_t i = 0; i < st.dim; ++i) {
    const double sc = abs_tol + rel_tol * std::abs(y0[i]);
    dnf += (f0[i] / sc) * (f0[i] / sc);
    dny += (y0[i] / sc) * (y0[i] / sc);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, t_end);

  Vec y1, f1;
  for (std::size_t i = 0; i < st.dim; ++i) y1[i] = y0[i] + h * f0[i];
  if (!st.eval(y1, f1)) return std::min(1e-6 * t_end, h);

  double der2 = 0;
  for (std::size_t i = 0; i < st.dim; ++i) {
    const double sc = abs_tol + rel_tol * std::abs(y0[i]);
    der2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(der2, std::sqrt(dnf));
  const double h1 =
      der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, t_end});
}

}  // namespace

Trajectory integrate(ModelKind kind, const EpidemicParams& p, double t_end,
                     double dt_out, double rel_tol, double abs_tol) {
  validate_params(kind, p);
  if (!(t_end > 0)) throw InvalidArgumentError("integrate: t_end must be > 0");
  if (!(dt_out > 0)) throw InvalidArgumentError("integrate: dt_out must be > 0");
  if (!(rel_tol > 0) || rel_tol > 1e-2)
    throw InvalidArgumentError("integrate: rel_tol must be in (0, 1e-2]");
  if (!(abs_tol > 0) || abs_tol > 1e-2)
    throw InvalidArgumentError("integrate: abs_tol must be in (0, 1e-2]");
  const double steps = t_end / dt_out;
  const long long m = std::llround(steps);
  if (m < 1 || std::abs(steps - static_cast<double>(m)) > 1e-9)
    throw InvalidArgumentError("integrate: t_end must be a multiple of dt_out");

  const Stepper st{kind, p, state_dim(kind)};
  const double hmin = 1e-12 * t_end;

  Trajectory traj;
  traj.kind = kind;
  traj.params = p;
  traj.dt_out = dt_out;
  traj.times.reserve(static_cast<std::size_t>(m) + 1);
  traj.states.reserve(static_cast<std::size_t>(m) + 1);

  StateVector start = initial_state(kind, p);
  Vec y = start.v, k1, k7, ynew, yerr, ks2, ks3, ks4, ks5, ks6, ytmp;
  if (!st.eval(y, k1))
    throw SingularStateError("integrate: initial state is not integrable");

  auto push = [&](double t, const Vec& v) {
    traj.times.push_back(t);
    StateVector s;
    s.dim = st.dim;
    s.v = v;
    traj.states.push_back(s);
  };
  push(0.0, y);

  double t = 0;
  double h = initial_step(st, y, k1, t_end, rel_tol, abs_tol);
  double facold = 1e-4;
  long long next_out = 1;
  long long accepted = 0, rejected = 0;
  const long long max_steps = 100'000'000;

  while (t < t_end) {
    if (h < hmin)
      throw StepSizeUnderflowError("integrate: step size underflow");
    if (accepted + rejected > max_steps)
      throw IntegrationError("integrate: step budget exhausted");
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }

    bool domain_ok = true;
    auto stage = [&](const double* coef, int count, Vec& out) {
      for (std::size_t i = 0; i < st.dim; ++i) {
        double acc = 0;
        const Vec* kk[6] = {&k1, &ks2, &ks3, &ks4, &ks5, &ks6};
        for (int j = 0; j < count; ++j) acc += coef[j] * (*kk[j])[i];
        ytmp[i] = y[i] + h * acc;
      }
      domain_ok = st.eval(ytmp, out);
    };

    const double s2[] = {a21};
    const double s3[] = {a31, a32};
    const double s4[] = {a41, a42, a43};
    const double s5[] = {a51, a52, a53, a54};
    const double s6[] = {a61, a62, a63, a64, a65};
    stage(s2, 1, ks2);
    if (domain_ok) stage(s3, 2, ks3);
    if (domain_ok) stage(s4, 3, ks4);
    if (domain_ok) stage(s5, 4, ks5);
    if (domain_ok) stage(s6, 5, ks6);
    if (domain_ok) {
      for (std::size_t i = 0; i < st.dim; ++i)
        ynew[i] = y[i] + h * (a71 * k1[i] + a73 * ks3[i] + a74 * ks4[i] +
                              a75 * ks5[i] + a76 * ks6[i]);
      domain_ok = st.eval(ynew, k7);
    }
    if (!domain_ok) {
      // A stage left the model domain; retry with a smaller step.
      h *= 0.5;
      ++rejected;
      continue;
    }

    for (std::size_t i = 0; i < st.dim; ++i)
      yerr[i] = h * (e1 * k1[i] + e3 * ks3[i] + e4 * ks4[i] + e5 * ks5[i] +
                     e6 * ks6[i] + e7 * k7[i]);
    const double err = error_norm(yerr, y, ynew, st.dim, rel_tol, abs_tol);

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(facc2, std::min(facc1, fac / safe));
    double hnew = h / fac;

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      ++accepted;
      check_invariants(kind, ynew, st.dim, p.N);

      if (next_out <= m) {
        DenseCoeffs dense;
        for (std::size_t i = 0; i < st.dim; ++i) {
          const double contd5 = h * (d1 * k1[i] + d3 * ks3[i] + d4 * ks4[i] +
                                     d5 * ks5[i] + d6 * ks6[i] + d7 * k7[i]);
          dense.collocate(i, y[i], ynew[i], h, k1[i], k7[i], contd5);
        }
        const double eps = 1e-12 * t_end;
        while (next_out <= m) {
          const double tout = static_cast<double>(next_out) * dt_out;
          if (tout > t + h + eps) break;
          if (last && next_out == m) break;  // emit the endpoint exactly
          const double theta = std::clamp((tout - t) / h, 0.0, 1.0);
          Vec v;
          for (std::size_t i = 0; i < st.dim; ++i) v[i] = dense.at(i, theta);
          push(tout, v);
          ++next_out;
        }
      }

      t += h;
      y = ynew;
      k1 = k7;  // first-same-as-last
      if (last && next_out == m) {
        push(static_cast<double>(m) * dt_out, y);
        ++next_out;
      }
      if (t >= t_end) break;
      h = hnew;
    } else {
      ++rejected;
      h = h / std::min(facc1, fac11 / safe);
    }
  }

  if (next_out <= m) {
    // Rounding left trailing grid points at t_end; they equal the final state.
    while (next_out <= m) {
      push(static_cast<double>(next_out) * dt_out, y);
      ++next_out;
    }
  }
  return traj;
}

double susceptible_count(const Trajectory& traj, std::size_t index) {
  const StateVector& s = traj.states.at(index);
  switch (traj.kind) {
    case ModelKind::Compartmental:
    case ModelKind::PairwiseKappaNm1:
    case ModelKind::PairwiseKappa1:
      return s[0];
    case ModelKind::EbcmPoisson:
      return traj.params.N * traj.params.init.phiS0 *
             std::exp(traj.params.n * (s[0] - 1.0));
  }
  return 0;
}

double cumulative_infections(const Trajectory& traj, std::size_t index) {
  return traj.params.N - susceptible_count(traj, index);
}

std::vector<double> prevalence_series(const Trajectory& traj) {
  const std::size_t m = traj.states.size();
  std::vector<double> out(m);
  if (traj.kind != ModelKind::EbcmPoisson) {
    for (std::size_t i = 0; i < m; ++i) out[i] = traj.states[i][1];
    return out;
  }
  // Reconstruct I = C - R from dR/dt = gamma * I, discretized with the
  // trapezoidal rule along the sampled cumulative-infection curve.
  const double g = traj.params.gamma, dt = traj.dt_out;
  double R = 0;
  double C_prev = cumulative_infections(traj, 0);
  out[0] = C_prev - R;
  for (std::size_t i = 1; i < m; ++i) {
    const double C = cumulative_infections(traj, i);
    R = (R * (1.0 - 0.5 * g * dt) + 0.5 * g * dt * (C_prev + C)) /
        (1.0 + 0.5 * g * dt);
    out[i] = std::max(0.0, C - R);
    C_prev = C;
  }
  return out;
}

double final_susceptible_fraction(const Trajectory& traj) {
  if (traj.states.empty())
    throw InvalidArgumentError("final_susceptible_fraction: empty trajectory");
  const std::size_t last = traj.states.size() - 1;
  if (traj.kind == ModelKind::EbcmPoisson)
    return std::exp(traj.params.n * (traj.states[last][0] - 1.0));
  return traj.states[last][0] / traj.params.N;
}

IncidenceSeries daily_incidence(const Trajectory& traj) {
  if (traj.times.size() < 2)
    throw InvalidArgumentError("daily_incidence: trajectory too short");
  const double per_day_f = 1.0 / traj.dt_out;
  const long long per_day = std::llround(per_day_f);
  if (per_day < 1 || std::abs(per_day_f - static_cast<double>(per_day)) > 1e-9)
    throw InvalidArgumentError(
        "daily_incidence: dt_out must divide one day exactly");
  const double t_end = traj.times.back();
  const long long days = static_cast<long long>(std::floor(t_end + 1e-9));

  IncidenceSeries inc;
  inc.new_cases.reserve(static_cast<std::size_t>(days));
  double prev = cumulative_infections(traj, 0);
  for (long long d = 1; d <= days; ++d) {
    const std::size_t idx = static_cast<std::size_t>(d * per_day);
    if (idx >= traj.states.size())
      throw InvalidArgumentError("daily_incidence: grid does not reach day " +
                                 std::to_string(d));
    const double cur = cumulative_infections(traj, idx);
    inc.new_cases.push_back(cur - prev);
    prev = cur;
  }
  return inc;
}

}  // namespace epiident
