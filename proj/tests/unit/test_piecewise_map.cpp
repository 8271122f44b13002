#include <cmath>

#include "doctest.h"
#include "polysmooth/errors.hpp"
#include "polysmooth/piecewise_map.hpp"
#include "polysmooth/sampling.hpp"
#include "support.hpp"

using namespace polysmooth;
using testing::pt;

namespace {

// Sampled lower bound on the Lipschitz constant.
double sampled_lipschitz(const PiecewiseMap& g) {
  auto xs = lattice_samples(*g.source(), 200);
  double best = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      double d = std::sqrt(squared_distance(xs[i], xs[j]).get_d());
      double e = std::sqrt(squared_distance(g(xs[i]), g(xs[j])).get_d());
      best = std::max(best, e / d);
    }
  return best;
}

}  // namespace

TEST_CASE("polynomial evaluation and derivatives") {
  // p(x, y) = 3x^2 y - y + 1/2
  Polynomial p(2, {{{2, 1}, Rational(3)}, {{0, 1}, Rational(-1)}, {{0, 0}, Rational(1, 2)}});
  CHECK(p.degree() == 3);
  CHECK(p(pt({2, Rational(1, 3)})) == Rational(4) - Rational(1, 3) + Rational(1, 2));
  std::vector<double> xf{2.0, 1.0 / 3.0};
  CHECK(p(xf) == doctest::Approx(4.0 - 1.0 / 3.0 + 0.5));
  auto dx = p.derivative(0);
  CHECK(dx(pt({1, 1})) == 6);
  auto dy = p.derivative(1);
  CHECK(dy(pt({2, 5})) == 11);
  CHECK(Polynomial::constant(2, Rational(7))(pt({9, 9})) == 7);
  std::vector<Rational> a{Rational(1), Rational(-2)};
  CHECK(Polynomial::affine(a, Rational(3))(pt({1, 1})) == 2);
}

TEST_CASE("PL maps evaluate exactly and report a sound Lipschitz bound") {
  auto k = testing::split_segment();
  auto tent = PiecewiseMap::from_pl(PLMap(k, {pt({0}), pt({1}), pt({0})}));
  CHECK(tent(pt({Rational(1, 4)})) == pt({Rational(1, 2)}));
  auto lip = tent.lipschitz_bound();
  REQUIRE(lip);
  CHECK(lip->get_d() >= sampled_lipschitz(tent) - 1e-12);
  CHECK(lip->get_d() <= 2.0 * (1 + 1e-6));

  auto sq = testing::square();
  auto shear = PiecewiseMap::from_pl(PLMap(sq, {pt({0, 0}), pt({1, 0}), pt({3, 1}), pt({2, 1})}));
  auto lip2 = shear.lipschitz_bound();
  REQUIRE(lip2);
  CHECK(lip2->get_d() >= sampled_lipschitz(shear) - 1e-12);
}

TEST_CASE("continuity radius follows the Lipschitz bound") {
  auto k = testing::split_segment();
  auto tent = PiecewiseMap::from_pl(PLMap(k, {pt({0}), pt({1}), pt({0})}));
  double r = tent.continuity_radius(0.1);
  CHECK(r * tent.lipschitz_bound()->get_d() <= 0.1 + 1e-15);
  CHECK(r > 0.04);
  auto flat = PiecewiseMap::from_pl(PLMap(k, {pt({1}), pt({1}), pt({1})}));
  CHECK(std::isinf(flat.continuity_radius(0.1)));
}

TEST_CASE("polynomial pieces must glue") {
  auto k = testing::split_segment();
  // |x - 1/2| realized by two affine pieces
  std::vector<Rational> down{Rational(-1)}, up{Rational(1)};
  std::vector<std::vector<Polynomial>> pieces{{Polynomial::affine(down, Rational(1, 2))},
                                              {Polynomial::affine(up, Rational(-1, 2))}};
  auto m = PiecewiseMap::polynomial(k, pieces, 0);
  CHECK(m(pt({Rational(1, 4)})) == pt({Rational(1, 4)}));
  CHECK(m(pt({Rational(3, 4)})) == pt({Rational(1, 4)}));
  CHECK(m.lipschitz_bound()->get_d() >= 1.0);

  std::vector<std::vector<Polynomial>> bad{{Polynomial::affine(down, Rational(1, 2))},
                                           {Polynomial::affine(up, Rational(0))}};
  CHECK_FALSE(pieces_agree_on_faces(*k, bad));
  CHECK(testing::error_code_of([&] { PiecewiseMap::polynomial(k, bad, 0); }) == ErrorCode::BadGluing);

  // quadratic pieces meeting at 1/2: x^2 and x - 1/4
  std::vector<std::vector<Polynomial>> quad{{Polynomial(1, {{{2}, Rational(1)}})},
                                            {Polynomial(1, {{{1}, Rational(1)}, {{0}, Rational(-1, 4)}})}};
  CHECK(pieces_agree_on_faces(*k, quad));
}

TEST_CASE("opaque maps need a modulus or a Lipschitz constant") {
  auto k = testing::unit_segment();
  auto eval = [](std::span<const double> x) { return std::vector<double>{std::sqrt(x[0])}; };
  auto bare = PiecewiseMap::opaque(k, 1, eval);
  CHECK_FALSE(bare.has_modulus());
  CHECK(testing::error_code_of([&] { bare.continuity_radius(0.1); }) == ErrorCode::ModulusUnavailable);

  auto with_mod = PiecewiseMap::opaque(k, 1, eval, [](double t) { return std::sqrt(t); });
  CHECK(with_mod.has_modulus());
  double r = with_mod.continuity_radius(0.1);
  CHECK(std::sqrt(r) <= 0.1);
  CHECK(r > 0.009);
}
