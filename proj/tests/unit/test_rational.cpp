#include <doctest.h>

#include "treelike/rational.hpp"

using treelike::DomainError;
using treelike::Rational;

TEST_SUITE("exact_arith") {
  TEST_CASE("rationals stay in lowest terms with a positive denominator") {
    const Rational r(6, -8);
    CHECK(r.str() == "-3/4");
    CHECK(r.denominator() == 4);
    CHECK(Rational(0, 5).str() == "0/1");
    CHECK(Rational(4).str() == "4/1");
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(-Rational(1, 3) == Rational(-1, 3));
  }

  TEST_CASE("division by zero is a domain error") {
    CHECK_THROWS_AS(Rational(1, 0), DomainError);
    CHECK_THROWS_AS(Rational(1) / Rational(0), DomainError);
  }

  TEST_CASE("parse round-trips and rejects junk") {
    for (const char* s : {"0/1", "7/9", "-5/288", "12345678901234567890123/7"})
      CHECK(Rational::parse(s).str() == s);
    CHECK(Rational::parse("4/6") == Rational(2, 3));
    CHECK(Rational::parse("3") == Rational(3));
    for (const char* s : {"", "/", "1/", "a/2", "1/0", "1//2", "1/2x"}) CHECK_THROWS_AS(Rational::parse(s), DomainError);
  }

  TEST_CASE("pow2 and floor") {
    CHECK(treelike::pow2(3) == Rational(8));
    CHECK(treelike::pow2(-3) == Rational(1, 8));
    CHECK(treelike::floor_long(Rational(7, 2)) == 3);
    CHECK(treelike::floor_long(Rational(-7, 2)) == -4);
  }

  TEST_CASE("fixed-point output rounds half to even") {
    using treelike::fixed_half_even;
    CHECK(fixed_half_even(Rational(1, 8), 2) == "0.12");
    CHECK(fixed_half_even(Rational(3, 8), 2) == "0.38");
    CHECK(fixed_half_even(Rational(-1, 8), 2) == "-0.12");
    CHECK(fixed_half_even(Rational(2, 3), 2) == "0.67");
    CHECK(fixed_half_even(Rational(5), 2) == "5.00");
    CHECK(fixed_half_even(Rational(5, 2), 0) == "2");
    CHECK(fixed_half_even(Rational(-1, 1000), 2) == "0.00");
  }

  TEST_CASE("hash agrees with equality") {
    CHECK(Rational(2, 4).hash() == Rational(1, 2).hash());
    CHECK(std::hash<Rational>{}(Rational(3)) == Rational(6, 2).hash());
  }
}
