#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "catalog.hpp"
#include "larep/poly.hpp"

using namespace larep;

TEST_CASE("parser basics") {
  std::vector<std::string> xy{"x1", "x2"};

  CHECK(parse_poly("0", {"x1"}).is_zero());

  Poly p = parse_poly("3/2*x1 - x2^3", xy);
  Poly expect(2);
  expect.add_term({1, 0}, Rational(3, 2));
  expect.add_term({0, 3}, -1);
  CHECK(p == expect);

  CHECK(parse_poly("x1*x1 + x1^2", {"x1"}) == parse_poly("2*x1^2", {"x1"}));
  CHECK(parse_poly("  - x1 +   x1 ", {"x1"}).is_zero());
  CHECK(parse_poly("5", {}) == Poly::constant(0, 5));
}

TEST_CASE("parser rejects bad input with offsets") {
  CHECK_THROWS_AS(parse_poly("1.5*x1", {"x1"}), ParseError);
  CHECK_THROWS_AS(parse_poly("x3", {"x1", "x2"}), ParseError);
  CHECK_THROWS_AS(parse_poly("x1 +", {"x1"}), ParseError);
  CHECK_THROWS_AS(parse_poly("1/0", {"x1"}), ParseError);
  try {
    parse_poly("x1 + @", {"x1"});
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }
}

TEST_CASE("partial derivatives") {
  std::vector<std::string> xy{"x1", "x2"};
  Poly p = parse_poly("x1^2*x2", xy);
  CHECK(p.partial(0) == parse_poly("2*x1*x2", xy));
  CHECK(parse_poly("7/3", xy).partial(1).is_zero());
  CHECK_THROWS_AS(p.partial(5), std::out_of_range);

  // mixed partials commute on random polynomials
  testing::Rng rng(7001);
  for (int t = 0; t < 40; ++t) {
    Poly q = rng.poly(3, 5, 6);
    CHECK(q.partial(0).partial(2) == q.partial(2).partial(0));
  }
}

TEST_CASE("leibniz rule") {
  testing::Rng rng(7002);
  for (int t = 0; t < 40; ++t) {
    Poly p = rng.poly(2, 4, 4), q = rng.poly(2, 4, 4);
    CHECK((p * q).partial(0) == p.partial(0) * q + p * q.partial(0));
  }
}

TEST_CASE("evaluation") {
  std::vector<std::string> xy{"x1", "x2"};
  Poly p = parse_poly("x1^2 + x2", xy);
  CHECK(p.eval(std::vector<Rational>{2, 3}) == 7);
  CHECK(Poly(2).eval(std::vector<Rational>{5, 5}) == 0);

  // exact evaluation agrees with binary64 evaluation
  testing::Rng rng(7003);
  for (int t = 0; t < 40; ++t) {
    Poly q = rng.poly(2, 4, 5);
    std::vector<Rational> pt{rng.rational(), rng.rational()};
    std::vector<double> dpt{static_cast<double>(pt[0]), static_cast<double>(pt[1])};
    double exact = static_cast<double>(q.eval(pt));
    double approx = q.eval(dpt);
    CHECK(std::abs(exact - approx) <= 1e-12 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("ring axioms on random samples") {
  testing::Rng rng(7004);
  for (int t = 0; t < 25; ++t) {
    Poly a = rng.poly(2, 3, 4), b = rng.poly(2, 3, 4), c = rng.poly(2, 3, 4);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("print/parse round trip") {
  std::vector<std::string> xy{"x1", "x2"};
  testing::Rng rng(7005);
  for (int t = 0; t < 40; ++t) {
    Poly p = rng.poly(2, 4, 5);
    CHECK(parse_poly(p.to_string(xy), xy) == p);
  }
  CHECK(Poly(2).to_string(xy) == "0");
}

TEST_CASE("degree convention") {
  CHECK(Poly(3).degree() == -1);
  CHECK(Poly::constant(3, 2).degree() == 0);
  CHECK(parse_poly("x1*x2^2", {"x1", "x2"}).degree() == 3);
}
