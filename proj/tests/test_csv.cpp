#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>

#include "epiident/csv.hpp"
#include "epiident/errors.hpp"

using namespace epiident;

TEST_CASE("doubles format to the shortest round-trip string") {
  CHECK(csv::format_double(0.1429) == "0.1429");
  CHECK(csv::format_double(0.0) == "0");
  CHECK(csv::format_double(-2.5) == "-2.5");
  CHECK(csv::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");

  const double values[] = {1.0 / 3.0, 1e-300, 59988.0006, -0.1,
                           std::nextafter(1.0, 2.0)};
  for (double v : values) {
    const double back = csv::parse_double(csv::format_double(v));
    CHECK(back == v);
  }
  CHECK(std::isnan(csv::parse_double("nan")));
}

TEST_CASE("parse rejects malformed numbers") {
  CHECK_THROWS_AS(csv::parse_double("abc"), ParseError);
  CHECK_THROWS_AS(csv::parse_double("1.5x"), ParseError);
  CHECK_THROWS_AS(csv::parse_double(""), ParseError);
}

TEST_CASE("tables round-trip structurally and byte for byte") {
  csv::Table t;
  t.comments = {"n_star=6, tau_star=0.1429", "omitted 1 out-of-domain row"};
  t.header = {"n", "tau_eigenvalue", "tau_finalsize"};
  t.rows = {{"4", "0.19", "0.2"}, {"6", "0.1429", "0.1429"}};

  const std::string text = csv::to_string(t);
  const csv::Table back = csv::parse(text);
  CHECK(back == t);
  CHECK(csv::to_string(back) == text);
}

TEST_CASE("tables without comments parse as plain csv") {
  const csv::Table t = csv::parse("a,b\n1,2\n3,4\n");
  CHECK(t.comments.empty());
  REQUIRE(t.header.size() == 2);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
}

TEST_CASE("parse failures") {
  CHECK_THROWS_AS(csv::parse(""), ParseError);
  CHECK_THROWS_AS(csv::parse("a,b\n1\n"), ParseError);
}

TEST_CASE("file round-trip") {
  csv::Table t;
  t.header = {"x", "y"};
  t.rows = {{csv::format_double(0.25), csv::format_double(1e-9)}};
  const std::string path = "csv_roundtrip_test.csv";
  csv::write_file(path, t);
  const csv::Table back = csv::read_file(path);
  CHECK(back == t);
  std::remove(path.c_str());
}
