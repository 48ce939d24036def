#include <doctest.h>

#include <cmath>
#include <limits>

#include "epiident/identifiability.hpp"
#include "epiident/observables.hpp"

using namespace epiident;

namespace {

constexpr double kGamma = 1.0 / 7.0;

double f2_closed(double s) { return 2 * (s - std::sqrt(s)) / (s * std::log(s)); }
double finf_closed(double s) { return std::log(s) / (s - 1); }

struct MasterObs {
  double lambda;
  double s_inf;
};

MasterObs master_observables(ModelKind kind) {
  const double tau = 0.1429, n = 6;
  return {leading_eigenvalue(kind, tau, kGamma, n),
          final_size_implicit(kind, tau, kGamma, n).s_inf};
}

}  // namespace

TEST_CASE("reduced-function limits") {
  SUBCASE("published band at s_inf = 0.9") {
    const auto lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, 0.9);
    CHECK(lim.lower == doctest::Approx(1.027).epsilon(1e-3));
    CHECK(lim.upper == doctest::Approx(1.054).epsilon(1e-3));
    CHECK(lim.increasing);
  }
  SUBCASE("closed forms at s_inf = 0.5") {
    const auto lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, 0.5);
    CHECK(lim.lower == doctest::Approx(f2_closed(0.5)).epsilon(1e-14));
    CHECK(lim.upper == doctest::Approx(finf_closed(0.5)).epsilon(1e-14));
    CHECK(lim.lower == doctest::Approx(1.19517).epsilon(1e-4));
    CHECK(lim.upper == doctest::Approx(1.38629).epsilon(1e-4));
  }
  SUBCASE("band collapses as the epidemic vanishes") {
    const auto lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, 0.999);
    CHECK(lim.upper - lim.lower < 1e-3);
    CHECK(lim.lower > 1.0);
  }
  SUBCASE("ebcm decreases to 1") {
    const auto lim = reduced_f_limits(ModelKind::EbcmPoisson, 0.9);
    CHECK(lim.lower == 1.0);
    CHECK(std::isinf(lim.upper));
    CHECK_FALSE(lim.increasing);
  }
}

TEST_CASE("reduced-function values") {
  CHECK(reduced_f(ModelKind::EbcmPoisson, 10, 0.9) == doctest::Approx(1.006).epsilon(1e-3));
  SUBCASE("pairwise approaches its limits") {
    const auto lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, 0.9);
    CHECK(reduced_f(ModelKind::PairwiseKappaNm1, 2 + 1e-8, 0.9) ==
          doctest::Approx(lim.lower).epsilon(1e-6));
    // n = 1e7 keeps the s^(1/n) differences resolvable in double precision
    CHECK(reduced_f(ModelKind::PairwiseKappaNm1, 1e7, 0.9) ==
          doctest::Approx(lim.upper).epsilon(1e-6));
  }
  SUBCASE("the expm1 rewrite matches the textbook quotient where it is stable") {
    for (double s : {0.05, 0.5, 0.9}) {
      for (double n : {2.5, 3.0, 6.0, 50.0}) {
        const double s1 = std::pow(s, 1.0 / n);
        const double s2 = std::pow(s, 2.0 / n);
        const double plain = (s1 - s2) * (n - 2.0) / (s2 - s);
        CHECK(reduced_f(ModelKind::PairwiseKappaNm1, n, s) ==
              doctest::Approx(plain).epsilon(1e-12));
      }
    }
  }
  SUBCASE("no seam approaching n = 2") {
    // |f(2+off) - f2| = O(off); a branch seam or cancellation blowup would
    // deviate by far more than the 10*off allowance.
    for (double s : {0.05, 0.5, 0.9}) {
      const double f2 = reduced_f_limits(ModelKind::PairwiseKappaNm1, s).lower;
      for (double off : {1e-3, 1e-6, 1e-9, 1e-12})
        CHECK(reduced_f(ModelKind::PairwiseKappaNm1, 2 + off, s) ==
              doctest::Approx(f2).epsilon(10 * off + 1e-13));
    }
  }
  SUBCASE("domain checks") {
    CHECK_THROWS_AS(reduced_f(ModelKind::PairwiseKappaNm1, 2.0, 0.9),
                    InvalidArgumentError);
    CHECK_THROWS_AS(reduced_f(ModelKind::PairwiseKappaNm1, 5.0, 1.0),
                    InvalidArgumentError);
    const double q = std::log(0.9) / (0.9 - 1);
    CHECK_THROWS_AS(reduced_f(ModelKind::EbcmPoisson, q * 0.999, 0.9),
                    InvalidArgumentError);
    CHECK_THROWS_AS(reduced_f(ModelKind::Compartmental, 6, 0.5),
                    InvalidArgumentError);
  }
}

TEST_CASE("pairwise monotonicity and range containment above the bound") {
  const auto grid = geomspace(2.01, 500, 200);
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
    const auto lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, s);
    double prev = -1;
    for (double n : grid) {
      const double f = reduced_f(ModelKind::PairwiseKappaNm1, n, s);
      CHECK(f > prev);
      CHECK(f > lim.lower);
      CHECK(f < lim.upper);
      prev = f;
    }
  }
}

TEST_CASE("intersection recovery") {
  SUBCASE("pairwise master round-trip") {
    const auto obs = master_observables(ModelKind::PairwiseKappaNm1);
    const auto hit =
        solve_intersection(ModelKind::PairwiseKappaNm1, obs.lambda, obs.s_inf, kGamma);
    CHECK(hit.n_star == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(hit.tau_star == doctest::Approx(0.1429).epsilon(1e-6));
  }
  SUBCASE("ebcm master round-trip") {
    const auto obs = master_observables(ModelKind::EbcmPoisson);
    const auto hit =
        solve_intersection(ModelKind::EbcmPoisson, obs.lambda, obs.s_inf, kGamma);
    CHECK(hit.n_star == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(hit.tau_star == doctest::Approx(0.1429).epsilon(1e-6));
  }
  SUBCASE("residual is at solver precision") {
    const auto obs = master_observables(ModelKind::PairwiseKappaNm1);
    const auto hit =
        solve_intersection(ModelKind::PairwiseKappaNm1, obs.lambda, obs.s_inf, kGamma);
    const double f = reduced_f(ModelKind::PairwiseKappaNm1, hit.n_star, obs.s_inf);
    CHECK(std::abs(kGamma * f - (obs.lambda + kGamma)) < 1e-12);
  }
  SUBCASE("compartmental is structurally unidentifiable") {
    CHECK_THROWS_AS(solve_intersection(ModelKind::Compartmental, 0.4, 0.2, kGamma),
                    StrongUnidentifiabilityError);
  }
  SUBCASE("targets outside the range of f") {
    const double s = 0.9;
    const auto lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, s);
    const double low_lambda = kGamma * (lim.lower - 1) - 1e-4;
    CHECK_THROWS_AS(
        solve_intersection(ModelKind::PairwiseKappaNm1, low_lambda, s, kGamma),
        NoIntersectionError);
    const double high_lambda = kGamma * (lim.upper - 1) + 1e-4;
    CHECK_THROWS_AS(
        solve_intersection(ModelKind::PairwiseKappaNm1, high_lambda, s, kGamma),
        NoIntersectionError);
  }
}

TEST_CASE("epsilon near-solution sets") {
  const double s = 0.9;
  const auto lim = reduced_f_limits(ModelKind::PairwiseKappaNm1, s);
  // Place the intersection at n = 6 by constructing a consistent lambda.
  const double f6 = reduced_f(ModelKind::PairwiseKappaNm1, 6, s);
  const double lambda = kGamma * (f6 - 1);

  SUBCASE("epsilon above the whole band swallows the domain") {
    const auto set =
        epsilon_solution_set(ModelKind::PairwiseKappaNm1, lambda, s, kGamma, 0.03);
    REQUIRE(set.intervals.size() == 1);
    CHECK(set.intervals[0].first == 2.0);
    CHECK(std::isinf(set.intervals[0].second));
    CHECK(set.infinite_measure);
    CHECK(0.03 > lim.upper - lim.lower);
  }
  SUBCASE("tiny epsilon pins the intersection") {
    const auto set =
        epsilon_solution_set(ModelKind::PairwiseKappaNm1, lambda, s, kGamma, 1e-7);
    REQUIRE(set.intervals.size() == 1);
    const auto [lo, hi] = set.intervals[0];
    CHECK_FALSE(set.infinite_measure);
    CHECK(lo > 2);
    CHECK(std::isfinite(hi));
    CHECK(lo < 6);
    CHECK(hi > 6);
    // Interior samples satisfy the defining inequality, outside samples break it.
    for (int i = 1; i < 1000; ++i) {
      const double n = lo + (hi - lo) * i / 1000.0;
      CHECK(std::abs(reduced_f(ModelKind::PairwiseKappaNm1, n, s) - set.f_star) < 1e-7);
    }
    const double margin = 1e-3 * (hi - lo);
    CHECK(std::abs(reduced_f(ModelKind::PairwiseKappaNm1, lo - margin, s) - set.f_star) >
          1e-7);
    CHECK(std::abs(reduced_f(ModelKind::PairwiseKappaNm1, hi + margin, s) - set.f_star) >
          1e-7);
  }
  SUBCASE("epsilon reaching the upper limit yields a half line") {
    const double eps = lim.upper - f6 + 1e-12;
    const auto set =
        epsilon_solution_set(ModelKind::PairwiseKappaNm1, lambda, s, kGamma, eps);
    REQUIRE(set.intervals.size() == 1);
    CHECK(set.infinite_measure);
    CHECK(std::isinf(set.intervals[0].second));
    CHECK(set.intervals[0].first > 2);
    CHECK(set.intervals[0].first < 6);
  }
  SUBCASE("ebcm set is a single interval around the intersection") {
    const double q = std::log(s) / (s - 1);
    const double fe = reduced_f(ModelKind::EbcmPoisson, 6, s);
    const double lam = kGamma * (q * fe - 1);
    const auto set = epsilon_solution_set(ModelKind::EbcmPoisson, lam, s, kGamma, 1e-4);
    REQUIRE(set.intervals.size() == 1);
    const auto [lo, hi] = set.intervals[0];
    CHECK(lo > q);
    CHECK(lo < 6);
    CHECK(hi > 6);
    CHECK_FALSE(set.infinite_measure);
    for (int i = 1; i < 1000; ++i) {
      const double n = lo + (hi - lo) * i / 1000.0;
      CHECK(std::abs(reduced_f(ModelKind::EbcmPoisson, n, s) - set.f_star) < 1e-4);
    }
  }
  SUBCASE("epsilon must be positive") {
    CHECK_THROWS_AS(
        epsilon_solution_set(ModelKind::PairwiseKappaNm1, lambda, s, kGamma, 0.0),
        InvalidArgumentError);
  }
}

TEST_CASE("proposition machinery") {
  SUBCASE("h vanishes to second order at b = 1 and decays cubically") {
    // step 1e-5 keeps the h'''' truncation term in the second difference
    // (~d^2/12 * h'''' ~ 4e3 * d^2) below the 1e-6 acceptance line
    const double d = 1e-5;
    for (double n : {3.0, 6.0, 10.0}) {
      CHECK(h_function(1.0, n) == 0.0);
      const double hp = (h_function(1 + d, n) - h_function(1 - d, n)) / (2 * d);
      const double hpp =
          (h_function(1 + d, n) - 2 * h_function(1.0, n) + h_function(1 - d, n)) /
          (d * d);
      const double hppp = (h_function(1 + 2 * d, n) - 2 * h_function(1 + d, n) +
                           2 * h_function(1 - d, n) - h_function(1 - 2 * d, n)) /
                          (2 * d * d * d);
      CHECK(std::abs(hp) < 1e-6);
      CHECK(std::abs(hpp) < 1e-6);
      CHECK(hppp < 0);
    }
  }
  SUBCASE("h positive left of 1") {
    for (double n : {3.0, 6.0, 10.0})
      for (double b = 0.95; b < 1.0 - 1e-12; b += 1e-3)
        CHECK(h_function(b, n) > 0);
  }
  SUBCASE("report over the published grid") {
    std::vector<double> s_grid;
    for (double s = 0.1; s < 0.96; s += 0.05) s_grid.push_back(s);
    const auto n_grid = geomspace(2.01, 500, 200);
    const auto report = proposition_check(s_grid, n_grid);
    CHECK(report.all_pass);
    CHECK(report.smallest_passing_s == doctest::Approx(0.1));
    CHECK(report.rows.size() == s_grid.size());
    for (const auto& row : report.rows) {
      CHECK(row.increasing);
      CHECK(row.bounded);
    }
  }
}

TEST_CASE("grid helpers") {
  const auto lin = linspace(2.0, 10.0, 5);
  REQUIRE(lin.size() == 5);
  CHECK(lin.front() == 2.0);
  CHECK(lin.back() == 10.0);
  CHECK(lin[2] == doctest::Approx(6.0));

  const auto geo = geomspace(1.0, 100.0, 3);
  REQUIRE(geo.size() == 3);
  CHECK(geo.front() == 1.0);
  CHECK(geo.back() == 100.0);
  CHECK(geo[1] == doctest::Approx(10.0));

  CHECK_THROWS_AS(linspace(1.0, 0.0, 5), InvalidArgumentError);
  CHECK_THROWS_AS(geomspace(0.0, 1.0, 5), InvalidArgumentError);
  CHECK_THROWS_AS(linspace(0.0, 1.0, 1), InvalidArgumentError);
}
