#include <cmath>
#include <memory>

#include "doctest.h"
#include "polysmooth/cover.hpp"
#include "polysmooth/errors.hpp"
#include "polysmooth/exact_linalg.hpp"
#include "polysmooth/sampling.hpp"
#include "polysmooth/smooth_calculus.hpp"
#include "support.hpp"

using namespace polysmooth;
using testing::pt;

namespace {

// Hermite oracle: solve for the degree 2nu+1 polynomial with P(0)=0, P(1)=1
// and derivatives 1..nu vanishing at both ends.
std::vector<Rational> hermite_oracle(int nu) {
  const int n = 2 * nu + 2;
  RationalMatrix a(n, n);
  std::vector<Rational> b(n, Rational(0));
  int row = 0;
  for (int end = 0; end < 2; ++end)
    for (int d = 0; d <= nu; ++d, ++row) {
      for (int p = d; p < n; ++p) {
        Rational falling = 1;
        for (int i = 0; i < d; ++i) falling *= p - i;
        a(row, p) = end == 0 ? (p == d ? falling : Rational(0)) : falling;
      }
      if (end == 1 && d == 0) b[row] = 1;
    }
  return *solve(a, b);
}

std::shared_ptr<const SkeletonCover> cover_of(const ComplexPtr& k, const Rational& delta) {
  return std::make_shared<SkeletonCover>(build_cover(k, delta));
}

}  // namespace

TEST_CASE("smoothstep of order 1 and 2") {
  CHECK(smoothstep(1).coefficients() == std::vector<Rational>{0, 0, 3, -2});
  CHECK(smoothstep(2).coefficients() == std::vector<Rational>{0, 0, 0, 10, -15, 6});
}

TEST_CASE("smoothstep matches the Hermite interpolant") {
  for (int nu = 1; nu <= 6; ++nu) CHECK(smoothstep(nu).coefficients() == hermite_oracle(nu));
}

TEST_CASE("smoothstep endpoint derivatives vanish and the profile is monotone") {
  for (int nu = 1; nu <= 4; ++nu) {
    auto p = smoothstep(nu);
    CHECK(p.value(Rational(0)) == 0);
    CHECK(p.value(Rational(1)) == 1);
    CHECK(p.value(Rational(1, 2)) == Rational(1, 2));
    for (int k = 1; k <= nu; ++k) {
      CHECK(std::abs(p.derivative(0.0, k)) < 1e-12);
      CHECK(std::abs(p.derivative(1.0, k)) < 1e-9);
    }
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      double v = p(i / 200.0);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(p(-0.5) == 0.0);
    CHECK(p(1.5) == 1.0);
  }
  CHECK(testing::error_code_of([] { smoothstep(0); }) == ErrorCode::RangeError);
}

TEST_CASE("ball bump profile") {
  auto cover = cover_of(testing::unit_segment(), Rational(1, 5));
  const auto& ball = cover->elements[0];
  BumpFunction b(ball, std::make_shared<SmoothstepProfile>(2));
  const Rational r = ball.radius();
  CHECK(b.value(pt({r / 3})) == 1.0);
  CHECK(b.value(pt({r / 4})) == 1.0);
  CHECK(b.value(pt({r * 2 / 3})) == 0.0);
  CHECK(b.value(pt({r})) == 0.0);
  double mid = b.value(pt({r / 2}));
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("tube bump equals one on the inner part and zero outside U") {
  auto k = testing::unit_segment();
  auto cover = cover_of(k, Rational(1, 5));
  const auto& tube = cover->elements[2];
  BumpFunction b(tube, std::make_shared<SmoothstepProfile>(1));
  CHECK(b.value(pt({Rational(1, 2)})) == 1.0);
  // c = eps/2; weights below c leave U
  const Rational c = tube.epsilon() / 2;
  CHECK(b.value(pt({c / 2})) == 0.0);
  CHECK_FALSE(tube.in_open(pt({c / 2})));
}

TEST_CASE("partition of unity sums to one and vanishes off U") {
  for (auto k : {testing::split_segment(), testing::triangle_boundary(), testing::square()}) {
    auto cover = cover_of(k, Rational(1, 8));
    PartitionOfUnity pou(cover, 2);
    for (const auto& x : lattice_samples(*k, 3000)) {
      auto w = pou.evaluate(x);
      double s = 0.0;
      for (const auto& [i, v] : w) {
        s += v;
        CHECK(v > 0.0);
        CHECK(cover->elements[i].in_open(x));
      }
      CHECK(std::abs(s - 1.0) <= 1e-12);
      auto xf = to_doubles(x);
      for (std::size_t i = 0; i < cover->elements.size(); ++i)
        if (!cover->elements[i].in_open(x)) CHECK(pou.bump(i)(xf) == 0.0);
    }
  }
}

TEST_CASE("a point covered by a single bump gets weight one") {
  auto k = testing::unit_segment();
  auto cover = cover_of(k, Rational(1, 5));
  PartitionOfUnity pou(cover, 1);
  auto w = pou.evaluate(pt({0}));
  REQUIRE(w.size() == 1);
  CHECK(w[0].first == 0);
  CHECK(w[0].second == 1.0);
  auto mid = pou.evaluate(pt({Rational(1, 2)}));
  REQUIRE(mid.size() == 1);
  CHECK(mid[0].first == 2);
}

TEST_CASE("evaluation away from every core") {
  auto k = testing::unit_segment();
  PartitionOfUnity pou(cover_of(k, Rational(1, 5)), 1);
  CHECK(testing::error_code_of([&] { pou.evaluate(pt({5})); }) == ErrorCode::ZeroDenominator);
}

TEST_CASE("smoothness order examples") {
  auto abs_rep = smoothness_order([](double t) { return std::abs(t); }, 3);
  CHECK(abs_rep.measured_order == 0);
  CHECK(abs_rep.first_failing == 1);

  auto p1 = smoothstep(1);
  auto step = smoothness_order([&](double t) { return t <= 0 ? 0.0 : p1(t); }, 3);
  CHECK(step.measured_order == 1);
  CHECK(step.first_failing == 2);

  auto poly = smoothness_order([](double t) { return 1 + t - 3 * t * t + t * t * t * t; }, 4);
  CHECK(poly.measured_order == 4);
  CHECK_FALSE(poly.first_failing);
}

TEST_CASE("smoothness order along a direction") {
  auto f = [](std::span<const double> x) { return std::vector<double>{std::abs(x[0]) * x[1], x[1]}; };
  std::vector<double> seam{0.0, 1.0}, dir{1.0, 0.0};
  auto rep = smoothness_order(f, seam, dir, 2);
  CHECK(rep.measured_order == 0);
  std::vector<double> along{0.0, 1.0};
  CHECK(smoothness_order(f, seam, along, 2).measured_order == 2);
}

TEST_CASE("bump seams are exactly of class nu") {
  auto cover = cover_of(testing::unit_segment(), Rational(1, 5));
  const double r = cover->elements[0].radius().get_d();
  for (int nu = 1; nu <= 3; ++nu) {
    PartitionOfUnity pou(cover, nu);
    const auto& ball = pou.bump(0);
    for (double frac : {1.0 / 3.0, 2.0 / 3.0}) {
      auto g = [&](double t) {
        double x = (frac + t) * r;
        return ball(std::span<const double>(&x, 1));
      };
      auto rep = smoothness_order(g, nu + 1);
      CHECK(rep.measured_order == nu);
      CHECK(rep.first_failing == nu + 1);
    }
  }
}
