#include <doctest.h>

#include <cmath>
#include <cstring>

#include "epiident/surface.hpp"

using namespace epiident;

namespace {

constexpr double kGamma = 1.0 / 7.0;

EpidemicParams master_pairwise() {
  EpidemicParams p;
  p.tau = 0.1429;
  p.gamma = kGamma;
  p.n = 6;
  p.N = 10000;
  p.init = default_initial_conditions(ModelKind::PairwiseKappaNm1, p.N, 1, p.n);
  return p;
}

}  // namespace

TEST_CASE("trajectory distance") {
  IncidenceSeries a, b;
  a.new_cases = {3.0, 4.0, 0.0};
  b.new_cases = {3.0, 4.0, 0.0};
  CHECK(trajectory_distance(a, b, 100.0) == 0.0);

  b.new_cases = {0.0, 0.0, 0.0};
  CHECK(trajectory_distance(a, b, 100.0) == doctest::Approx(0.05).epsilon(1e-14));

  b.new_cases = {0.0, 0.0};
  CHECK_THROWS_AS(trajectory_distance(a, b, 100.0), InvalidArgumentError);
}

TEST_CASE("open-low grids") {
  const auto g = grid_open_low({0.0, 1.2, 60});
  REQUIRE(g.size() == 60);
  CHECK(g.front() == doctest::Approx(0.02));
  CHECK(g.front() > 0);
  CHECK(g.back() == 1.2);

  CHECK_THROWS_AS(grid_open_low({0.0, 1.2, 1}), InvalidArgumentError);
  CHECK_THROWS_AS(grid_open_low({1.2, 0.0, 10}), InvalidArgumentError);
}

TEST_CASE("surface self-distance vanishes at the master cell") {
  const EpidemicParams p = master_pairwise();
  const double taus[] = {0.1, p.tau};
  const double degrees[] = {4.0, p.n};
  const auto s =
      distance_surface(p, ModelKind::PairwiseKappaNm1, taus, degrees, 365.0);
  REQUIRE(s.D.size() == 4);
  CHECK(s.at(1, 1) < 1e-6);
  for (double d : s.D) {
    CHECK(std::isfinite(d));
    CHECK(d >= 0);
  }
  // Off-master cells are genuinely far.
  CHECK(s.at(0, 0) > 1e-3);
}

TEST_CASE("parallel sweep is bitwise equal to the serial reference") {
  const EpidemicParams p = master_pairwise();
  const auto taus = grid_open_low({0.05, 0.5, 3});
  const auto degrees = grid_open_low({2.0, 9.0, 3});
  const auto par =
      distance_surface(p, ModelKind::PairwiseKappaNm1, taus, degrees, 180.0);
  const auto ser = distance_surface_serial(p, ModelKind::PairwiseKappaNm1, taus,
                                           degrees, 180.0);
  REQUIRE(par.D.size() == ser.D.size());
  CHECK(std::memcmp(par.D.data(), ser.D.data(), par.D.size() * sizeof(double)) == 0);

  const auto capped =
      distance_surface(p, ModelKind::PairwiseKappaNm1, taus, degrees, 180.0, 1);
  CHECK(std::memcmp(par.D.data(), capped.D.data(), par.D.size() * sizeof(double)) ==
        0);
}

TEST_CASE("surface preconditions") {
  EpidemicParams p = master_pairwise();
  const auto taus = grid_open_low({0.05, 0.5, 2});
  const auto degrees = grid_open_low({2.0, 9.0, 2});

  SUBCASE("horizon must cover the master epidemic") {
    CHECK_THROWS_AS(
        distance_surface(p, ModelKind::PairwiseKappaNm1, taus, degrees, 5.0),
        InvalidArgumentError);
  }
  SUBCASE("master must be supercritical") {
    p.tau = 0.001;
    CHECK_THROWS_AS(
        distance_surface(p, ModelKind::PairwiseKappaNm1, taus, degrees, 365.0),
        InvalidArgumentError);
  }
  SUBCASE("grids must be at least 2x2 and increasing") {
    const double one[] = {0.1};
    CHECK_THROWS_AS(distance_surface(p, ModelKind::PairwiseKappaNm1, one, degrees,
                                     365.0),
                    InvalidArgumentError);
    const double unsorted[] = {0.5, 0.1};
    CHECK_THROWS_AS(distance_surface(p, ModelKind::PairwiseKappaNm1, unsorted,
                                     degrees, 365.0),
                    InvalidArgumentError);
  }
}

TEST_CASE("incidence curve length follows the horizon") {
  const EpidemicParams p = master_pairwise();
  const auto inc = incidence_curve(ModelKind::PairwiseKappaNm1, p, 120.0);
  CHECK(inc.new_cases.size() == 120);
  CHECK_THROWS_AS(incidence_curve(ModelKind::PairwiseKappaNm1, p, 0.5),
                  InvalidArgumentError);
}
