#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lvl/morse_poly.hpp"

using namespace lvl;

namespace {
CriticalManifoldDatum point(int lambda) { return {lambda, IntPolynomial{1}}; }
CriticalManifoldDatum circle(int lambda) { return {lambda, IntPolynomial{1, 1}}; }
}  // namespace

TEST_CASE("polynomial arithmetic") {
  const IntPolynomial p{1, 1};
  CHECK(p * p == IntPolynomial{1, 2, 1});
  CHECK((p - p).is_zero());
  CHECK((p - p).degree() == -1);
  CHECK(IntPolynomial{1, 0, 0} == IntPolynomial{1});
  CHECK(IntPolynomial::monomial(3, 2) == IntPolynomial{0, 0, 3});
  CHECK(IntPolynomial{1, 1}.at_minus_one() == 0);
  CHECK(IntPolynomial{2, -1, 4}.at_minus_one() == 7);
  CHECK(IntPolynomial{0, 1, 2, 1}.to_string() == "t + 2t^2 + t^3");
  CHECK(IntPolynomial{1, 0, -1}.to_string() == "1 - t^2");
  CHECK(IntPolynomial{}.to_string() == "0");
}

TEST_CASE("S^2 x S^2 inventory gives R = t + t^2") {
  // max circle (index 3), min circle (index 0), four saddle points of index 2
  std::vector<CriticalManifoldDatum> c{circle(3), circle(0), point(2), point(2), point(2), point(2)};
  const auto r = bott_morse_check(c, IntPolynomial{1, 0, 2, 0, 1});
  CHECK(r.divisible);
  CHECK(r.ok);
  CHECK(r.remainder == 0);
  CHECK(r.quotient == IntPolynomial{0, 1, 1});
  CHECK(r.difference == IntPolynomial{0, 1, 2, 1});
}

TEST_CASE("S^1 x S^2 inventory gives R = 1 + t^2") {
  std::vector<CriticalManifoldDatum> c{point(3), point(3), point(0), point(0), circle(1), circle(1)};
  const auto r = bott_morse_check(c, IntPolynomial{1, 1, 1, 1});
  CHECK(r.ok);
  CHECK(r.quotient == IntPolynomial{1, 0, 1});
}

TEST_CASE("a perfect function on S^3") {
  std::vector<CriticalManifoldDatum> c{point(0), point(3)};
  const auto r = bott_morse_check(c, IntPolynomial{1, 0, 0, 1});
  CHECK(r.ok);
  CHECK(r.quotient.is_zero());
}

TEST_CASE("check is invariant under reordering the inventory") {
  std::vector<CriticalManifoldDatum> c{point(2), circle(0), point(2), circle(3), point(2), point(2)};
  const auto r = bott_morse_check(c, IntPolynomial{1, 0, 2, 0, 1});
  CHECK(r.ok);
  CHECK(r.quotient == IntPolynomial{0, 1, 1});
}

TEST_CASE("missing critical point breaks divisibility") {
  std::vector<CriticalManifoldDatum> c{circle(3), circle(0), point(2), point(2), point(2)};
  const auto r = bott_morse_check(c, IntPolynomial{1, 0, 2, 0, 1});
  CHECK_FALSE(r.divisible);
  CHECK_FALSE(r.ok);
  CHECK(r.remainder != 0);
  CHECK(r.remainder == r.difference.at_minus_one());
}

TEST_CASE("divisible but with a negative coefficient") {
  // too few critical points: difference -(1 + t)
  std::vector<CriticalManifoldDatum> c{};
  const auto r = bott_morse_check(c, IntPolynomial{1, 1});
  CHECK(r.divisible);
  CHECK_FALSE(r.ok);
  CHECK(r.quotient == IntPolynomial{-1});
}

TEST_CASE("data from Morse data") {
  MorseData iso;
  iso.eigenvalues = {-2, -1, 3};
  iso.morse_index = 2;
  iso.transversal_index = 2;
  const auto d = datum_from_morse(iso);
  CHECK(d.lambda == 2);
  CHECK(d.poincare == IntPolynomial{1});

  MorseData circ;
  circ.eigenvalues = {-1, 0, 2};
  circ.morse_index = 1;
  circ.nullity = 1;
  circ.transversal_index = 1;
  CHECK(datum_from_morse(circ).poincare == IntPolynomial{1, 1});

  MorseData deg;
  deg.eigenvalues = {0, 0, 1};
  deg.nullity = 2;
  CHECK_THROWS_AS(datum_from_morse(deg), std::invalid_argument);
}
