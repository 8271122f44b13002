#include <cmath>

#include "doctest.h"
#include "polysmooth/crossings.hpp"
#include "support.hpp"

using namespace polysmooth;
using testing::pt;

namespace {

CoordinateDivisor triple() { return CoordinateDivisor::make(3, {0, 1, 2}); }

long binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

TEST_CASE("strata of x1 x2 x3 = 0") {
  auto x = triple();
  auto lines = sing_stratification(x, 1);
  CHECK(lines.size() == 3);
  for (const auto& s : lines) CHECK(s.dim(3) == 1);
  auto origin = sing_stratification(x, 2);
  REQUIRE(origin.size() == 1);
  CHECK(origin[0].dim(3) == 0);
  CHECK(origin[0].contains(pt({0, 0, 0})));
  CHECK(sing_stratification(x, 3).empty());
  auto comps = sing_stratification(x, 0);
  CHECK(comps.size() == 3);
}

TEST_CASE("stratum counts over partial divisors") {
  for (unsigned mask = 1; mask < 16; ++mask) {
    std::vector<std::size_t> j;
    for (std::size_t i = 0; i < 4; ++i)
      if (mask & (1u << i)) j.push_back(i);
    auto x = CoordinateDivisor::make(4, j);
    for (int level = 0; level < 5; ++level) {
      auto strata = sing_stratification(x, level);
      CHECK(static_cast<long>(strata.size()) == binomial(static_cast<long>(j.size()), level + 1));
      for (const auto& s : strata) {
        CHECK(s.dim(4) == static_cast<std::size_t>(4 - level - 1));
        for (auto i : s.indices) CHECK(std::find(j.begin(), j.end(), i) != j.end());
      }
    }
  }
}

TEST_CASE("compatible retraction onto a coordinate line") {
  auto x = triple();
  Stratum z;
  for (const auto& s : sing_stratification(x, 1))
    if (s.indices == std::vector<std::size_t>{0, 1}) z = s;
  auto rho = compatible_retraction(z, x);
  const Point p = pt({Rational(1, 3), Rational(-2, 5), Rational(7, 9)});
  CHECK(rho(p) == pt({0, 0, Rational(7, 9)}));
  CHECK(rho(pt({0, Rational(1, 4), 2})) == pt({0, 0, 2}));
  CHECK(rho(rho(p)) == rho(p));
  // every stratum meeting Z is carried into its intersection with Z
  for (int level = 0; level < 3; ++level)
    for (const auto& y : sing_stratification(x, level)) {
      Point q = p;
      for (auto i : y.indices) q[i] = 0;
      CHECK(y.contains(rho(q)));
      CHECK(z.contains(rho(q)));
    }
}

TEST_CASE("collar squash thresholds") {
  auto psi = collar_squash(0, Rational(3, 10), 1);
  CHECK(psi(pt({Rational(1, 20)})) == pt({0}));
  CHECK(psi(pt({Rational(1, 10)})) == pt({0}));
  CHECK(psi(pt({Rational(1, 5)})) == pt({Rational(1, 5)}));
  CHECK(psi(pt({Rational(-3, 20)})) == pt({Rational(-3, 20)}));
  CHECK(psi.in_plateau(pt({Rational(-1, 12)})));
  CHECK_FALSE(psi.in_plateau(pt({Rational(1, 10)})));
  for (int i = -30; i <= 30; ++i) {
    Rational t(i, 200);
    Rational moved = abs(psi(pt({t}))[0] - t);
    CHECK(moved <= abs(t));
    if (abs(t) < Rational(3, 20)) CHECK(moved < Rational(3, 20));
  }
}

TEST_CASE("collar squash leaves other components alone") {
  auto psi = collar_squash(0, Rational(3, 10), 2);
  for (int i = -10; i <= 10; ++i) {
    Point y = pt({Rational(i, 40), 0});
    CHECK(psi(y)[1] == 0);
    Point z = pt({0, Rational(i, 40)});
    CHECK(psi(z)[0] == 0);
  }
}

TEST_CASE("float and exact squashes agree") {
  auto psi = collar_squash(1, Rational(1, 10), 3);
  for (int i = -20; i <= 20; ++i) {
    Rational t(i, 300);
    Point p = pt({Rational(1, 2), t});
    auto e = psi(p);
    auto f = psi(to_doubles(p));
    CHECK(f[1] == doctest::Approx(e[1].get_d()).epsilon(1e-12));
  }
}

TEST_CASE("weak retraction of the coordinate cross") {
  auto rho = weak_retraction(CoordinateDivisor::make(2, {0, 1}), Rational(3, 10), 1);
  CHECK(rho(pt({Rational(1, 20), Rational(1, 20)})) == pt({0, 0}));
  CHECK(rho(pt({Rational(1, 20), 0})) == pt({0, 0}));
  CHECK(rho(pt({1, 1})) == pt({1, 1}));
  CHECK_FALSE(rho.in_domain(pt({1, 1})));
  CHECK(rho.in_domain(pt({Rational(1, 20), 1})));
  CHECK(rho.domain_witness(pt({1, Rational(1, 20)})) == std::optional<std::size_t>(1));
}

TEST_CASE("retraction lands on the divisor") {
  auto rho = weak_retraction(triple(), Rational(1, 10), 2);
  auto pts = domain_samples(rho, 11);
  REQUIRE_FALSE(pts.empty());
  auto rep = retraction_products(rho, pts);
  CHECK(rep.rejected == 0);
  CHECK(rep.all_exact_zero);
  CHECK(rep.max_abs_product_float <= 1e-12);
  std::vector<Point> outside{pt({1, 1, 1})};
  auto bad = retraction_products(rho, outside);
  CHECK(bad.rejected == 1);
  CHECK_FALSE(bad.diagnostics.empty());
}

TEST_CASE("grid inside the first collar plateau") {
  auto rho = weak_retraction(CoordinateDivisor::make(2, {0, 1}), Rational(3, 10), 1);
  for (int i = -3; i <= 3; ++i)
    for (int j = -10; j <= 10; ++j) {
      Point p = pt({Rational(i, 30), Rational(j, 10)});
      CHECK(rho(p)[0] == 0);
    }
}

TEST_CASE("displacement shrinks with eta") {
  auto x = CoordinateDivisor::make(2, {0, 1});
  double prev = INFINITY;
  for (Rational eta : {Rational(3, 10), Rational(1, 10), Rational(1, 100)}) {
    auto rep = displacement_on_divisor(weak_retraction(x, eta, 1), 101);
    CHECK(rep.ok());
    CHECK(rep.bound == doctest::Approx(eta.get_d()));
    CHECK(rep.max_displacement <= prev);
    if (eta >= Rational(1, 10)) CHECK(rep.max_displacement > 0.0);
    prev = rep.max_displacement;
    std::size_t total = 0;
    for (auto h : rep.histogram) total += h;
    CHECK(total == rep.samples);
  }
}

TEST_CASE("squash seams are of class nu and sharp at the outer seam") {
  for (int nu = 1; nu <= 3; ++nu) {
    auto rho = weak_retraction(CoordinateDivisor::make(2, {0, 1}), Rational(3, 10), nu);
    auto seams = squash_seams(rho, nu + 1);
    CHECK(seams.size() == 4);
    for (const auto& s : seams) {
      CHECK(s.measured_order >= nu);
      if (s.position == Rational(3, 20)) CHECK(s.first_failing == nu + 1);
    }
  }
}
