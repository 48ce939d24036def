#pragma once

#include <cmath>

#include "epiident/errors.hpp"

namespace epiident::detail {

// Bisection on a bracketing pair (fa and fb of opposite sign) down to an
// absolute interval width xtol. Returns the midpoint of the final interval.
template <class F>
double bisect(F&& f, double a, double b, double fa, double fb, double xtol,
              int max_iter = 200) {
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0))
    throw RootBracketingError("bisect: endpoints do not bracket a sign change");
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // interval at machine resolution
    const double fm = f(m);
    if (fm == 0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

// One guarded Newton step from x0; falls back to x0 when the step leaves
// (lo, hi) or the derivative is too small to trust.
template <class F, class DF>
double newton_polish(F&& f, DF&& df, double x0, double lo, double hi) {
  const double d = df(x0);
  if (!std::isfinite(d) || d == 0) return x0;
  const double x1 = x0 - f(x0) / d;
  if (!std::isfinite(x1) || x1 <= lo || x1 >= hi) return x0;
  return x1;
}

}  // namespace epiident::detail
