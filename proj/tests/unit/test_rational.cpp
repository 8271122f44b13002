#include "doctest.h"
#include "polysmooth/errors.hpp"
#include "polysmooth/exact_linalg.hpp"
#include "polysmooth/exact_lp.hpp"
#include "polysmooth/rational.hpp"
#include "polysmooth/simplex_distance.hpp"
#include "support.hpp"

using namespace polysmooth;
using testing::pt;

TEST_CASE("parse_rational accepts fractions, integers and decimals exactly") {
  CHECK(parse_rational("3/7") == Rational(3, 7));
  CHECK(parse_rational("-12") == Rational(-12));
  CHECK(parse_rational("0.05") == Rational(1, 20));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(testing::error_code_of([] { parse_rational("abc"); }) == ErrorCode::ParseError);
  CHECK(testing::error_code_of([] { parse_rational("1/0"); }) == ErrorCode::ParseError);
}

TEST_CASE("to_string round trips") {
  for (Rational q : {Rational(0), Rational(-5, 3), Rational(22, 7), Rational(1, 1 << 20)})
    CHECK(parse_rational(to_string(q)) == q);
}

TEST_CASE("square root bounds bracket the root") {
  for (Rational q : {Rational(2), Rational(1, 3), Rational(10, 7), Rational(1, 1000000)}) {
    Rational lo = sqrt_lower(q), hi = sqrt_upper(q);
    CHECK(lo * lo <= q);
    CHECK(hi * hi >= q);
    CHECK(lo <= hi);
  }
  CHECK(sqrt_lower(Rational(9, 4)) == Rational(3, 2));
  CHECK(sqrt_upper(Rational(1, 100)) == Rational(1, 10));
}

TEST_CASE("matrix inverse and determinant") {
  RationalMatrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 1;
  CHECK(determinant(a) == 1);
  auto inv = inverse(a);
  REQUIRE(inv);
  auto id = a * *inv;
  CHECK(id(0, 0) == 1);
  CHECK(id(0, 1) == 0);
  CHECK(id(1, 0) == 0);
  CHECK(id(1, 1) == 1);
  RationalMatrix s(2, 2);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(1, 0) = 2;
  s(1, 1) = 4;
  CHECK_FALSE(inverse(s));
  CHECK(rank(s) == 1);
  CHECK(is_positive_semidefinite(s));
  s(1, 1) = 3;
  CHECK_FALSE(is_positive_semidefinite(s));
}

TEST_CASE("affine frame projects orthogonally with exact weights") {
  AffineFrame f({pt({0, 0}), pt({1, 0})});
  auto pr = f.project(pt({Rational(1, 4), Rational(3, 10)}));
  CHECK(pr.foot == pt({Rational(1, 4), 0}));
  CHECK(pr.weights == std::vector<Rational>{Rational(3, 4), Rational(1, 4)});
  CHECK(pr.normal_sq == Rational(9, 100));
  CHECK(testing::error_code_of([] { AffineFrame({pt({0, 0}), pt({0, 0})}); }) == ErrorCode::AffineDependence);
}

TEST_CASE("hull distances are exact") {
  std::vector<Point> seg{pt({0, 0}), pt({1, 0})};
  CHECK(squared_distance_to_hull(pt({Rational(1, 2), 2}), seg) == 4);
  CHECK(squared_distance_to_hull(pt({2, 0}), seg) == 1);
  std::vector<Point> other{pt({3, 1}), pt({3, -1})};
  CHECK(squared_distance_between_hulls(seg, other) == 4);
  std::vector<Point> crossing{pt({Rational(1, 2), -1}), pt({Rational(1, 2), 1})};
  CHECK(squared_distance_between_hulls(seg, crossing) == 0);
}
