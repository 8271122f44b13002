#include <memory>

#include "doctest.h"
#include "polysmooth/cover.hpp"
#include "polysmooth/errors.hpp"
#include "polysmooth/sampling.hpp"
#include "support.hpp"

using namespace polysmooth;
using testing::make;
using testing::pt;

TEST_CASE("shrinking a segment by one half") {
  auto seg = testing::unit_segment();
  auto s = shrink(*seg, Simplex({0, 1}), Rational(1, 2));
  CHECK(s.closed_vertices == std::vector<Point>{pt({Rational(1, 4)}), pt({Rational(3, 4)})});
  CHECK(s.weight_threshold() == Rational(1, 4));
}

TEST_CASE("shrinking the standard triangle") {
  auto tri = testing::standard_triangle();
  auto s = shrink(*tri, Simplex({0, 1, 2}), Rational(1, 4));
  CHECK(s.closed_vertices[0] == pt({Rational(1, 12), Rational(1, 12)}));
  CHECK(s.closed_vertices[1] == pt({Rational(5, 6), Rational(1, 12)}));
}

TEST_CASE("epsilon outside (0,1) is rejected") {
  auto seg = testing::unit_segment();
  CHECK(testing::error_code_of([&] { shrink(*seg, Simplex({0, 1}), Rational(1)); }) == ErrorCode::EpsilonOutOfRange);
  CHECK(testing::error_code_of([&] { shrink(*seg, Simplex({0, 1}), Rational(0)); }) == ErrorCode::EpsilonOutOfRange);
}

TEST_CASE("shrink monotonicity and interior weights") {
  auto tri = testing::standard_triangle();
  AffineFrame frame(tri->points_of(Simplex({0, 1, 2})));
  for (int a = 1; a < 8; ++a)
    for (int b = a; b < 8; ++b) {
      Rational e1(a, 8), e2(b, 8);
      auto big = shrink(*tri, Simplex({0, 1, 2}), e1);
      auto small = shrink(*tri, Simplex({0, 1, 2}), e2);
      for (const auto& v : small.closed_vertices) {
        auto w = *frame.coordinates(v);
        for (const auto& c : w) CHECK(c >= big.weight_threshold());
      }
      for (const auto& v : small.closed_vertices)
        for (const auto& c : *frame.coordinates(v)) CHECK(c >= e2 / 3);
    }
}

TEST_CASE("retraction of a widening tube") {
  auto k = make({pt({0, 0}), pt({1, 0})}, {{0, 1}});
  auto tube = widen(*k, shrink(*k, Simplex({0, 1}), Rational(1, 2)), Rational(2, 5));
  CHECK(retract(tube, pt({Rational(1, 2), Rational(3, 10)})) == pt({Rational(1, 2), 0}));
  auto inside = pt({Rational(2, 5), 0});
  CHECK(retract(tube, inside) == inside);
  CHECK(retract(tube, retract(tube, pt({Rational(3, 5), Rational(-1, 5)}))) == pt({Rational(3, 5), 0}));
  CHECK(testing::error_code_of([&] { retract(tube, pt({Rational(1, 2), Rational(1, 2)})); }) ==
        ErrorCode::OutsideTube);
}

TEST_CASE("cover of one segment") {
  auto seg = testing::unit_segment();
  auto cover = build_cover(seg, Rational(1, 5));
  REQUIRE(cover.elements.size() == 3);
  for (int v = 0; v < 2; ++v) {
    const auto& ball = cover.elements[v];
    CHECK(ball.kind() == CoverElement::Kind::Ball);
    CHECK(ball.radius() < Rational(1, 5));
    CHECK(ball.radius() * 2 < 1);
  }
  CHECK(cover.elements[2].kind() == CoverElement::Kind::Tube);
  CHECK(verify_cover(cover).ok());
}

TEST_CASE("cover of a single vertex") {
  auto k = make({pt({1, 2})}, {{0}});
  auto cover = build_cover(k, Rational(1, 3));
  REQUIRE(cover.elements.size() == 1);
  CHECK(cover.elements[0].kind() == CoverElement::Kind::Ball);
  CHECK(cover.elements[0].retract(pt({1, 2})) == pt({1, 2}));
  CHECK(verify_cover(cover).ok());
}

TEST_CASE("cover of a two-edge path") {
  auto k = testing::two_edge_path();
  auto cover = build_cover(k, Rational(1, 4));
  CHECK(verify_cover(cover).ok());
  // closure of the first edge's tube misses the far vertex
  auto e01 = *k->index_of(Simplex({0, 1}));
  CHECK_FALSE(cover.elements[e01].in_closure(k->vertex(2)));
}

TEST_CASE("closures only meet simplices containing their base") {
  for (auto k : {testing::two_edge_path(), testing::triangle_boundary(), testing::square()}) {
    auto cover = build_cover(k, Rational(1, 3));
    auto pts = lattice_samples(*k, 3000);
    for (const auto& e : cover.elements)
      for (const auto& x : pts)
        if (e.in_closure(x)) CHECK(e.simplex().is_face_of(locate(*k, x).simplex));
  }
}

TEST_CASE("retraction displacement stays below delta") {
  auto k = testing::square();
  const Rational delta(1, 6);
  auto cover = build_cover(k, delta);
  for (const auto& e : cover.elements)
    for (const auto& x : lattice_samples(*k, 2000))
      if (e.in_open(x)) CHECK(squared_distance(x, e.retract(x)) < delta * delta);
}

TEST_CASE("built covers pass refinement certification alone") {
  CoverOptions bisect;
  bisect.barycentric_first = false;
  for (auto k : {testing::unit_segment(), testing::two_edge_path(), testing::triangle_boundary(), testing::square(),
                 testing::tetrahedron_boundary()}) {
    auto cover = build_cover(k, Rational(1, 4));
    auto rep = verify_cover(cover, bisect);
    CHECK(rep.ok());
    CHECK(rep.pieces_checked > 0);
  }
}

TEST_CASE("cores cover every lattice point") {
  for (auto k : {testing::square(), testing::tetrahedron_boundary()}) {
    auto cover = build_cover(k, Rational(1, 20));
    for (const auto& x : lattice_samples(*k, 3000)) {
      bool covered = false;
      for (const auto& e : cover.elements) covered = covered || e.in_core(x);
      CHECK(covered);
    }
  }
}

TEST_CASE("small delta stays cheap") {
  auto cover = build_cover(testing::square(), pow2(-14));
  CHECK(verify_cover(cover).ok());
}

TEST_CASE("oversized vertex balls violate separation") {
  auto seg = testing::unit_segment();
  SkeletonCover cover;
  cover.complex = seg;
  cover.delta = 2;
  cover.elements.push_back(CoverElement::ball(0, Simplex({0}), pt({0}), Rational(1)));
  cover.elements.push_back(CoverElement::ball(1, Simplex({1}), pt({1}), Rational(1)));
  cover.elements.push_back(CoverElement::tube(2, Simplex({0, 1}), seg->points_of(Simplex({0, 1})), Rational(1, 2),
                                              Rational(1, 10)));
  auto rep = verify_cover(cover);
  CHECK_FALSE(rep.ok());
  bool saw_ii = false;
  for (const auto& v : rep.violations) saw_ii = saw_ii || v.property == "ii";
  CHECK(saw_ii);
}

TEST_CASE("a gap in the middle of an edge is reported") {
  auto seg = testing::unit_segment();
  SkeletonCover cover;
  cover.complex = seg;
  cover.delta = Rational(1, 5);
  cover.elements.push_back(CoverElement::ball(0, Simplex({0}), pt({0}), Rational(1, 10)));
  cover.elements.push_back(CoverElement::ball(1, Simplex({1}), pt({1}), Rational(1, 10)));
  cover.elements.push_back(CoverElement::tube(2, Simplex({0, 1}), seg->points_of(Simplex({0, 1})), Rational(7, 10),
                                              Rational(1, 10)));
  auto rep = verify_cover(cover);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.violations.front().property == "i");
  CHECK(rep.violations.front().detail.find("subsimplex") != std::string::npos);
}

TEST_CASE("radius at delta violates the displacement bound") {
  auto seg = testing::unit_segment();
  auto cover = build_cover(seg, Rational(1, 5));
  cover.delta = cover.elements[2].radius();
  auto rep = verify_cover(cover);
  bool saw_iii = false;
  for (const auto& v : rep.violations) saw_iii = saw_iii || v.property == "iii";
  CHECK(saw_iii);
}

TEST_CASE("elements disjoint from a simplex") {
  auto k = testing::two_edge_path();
  auto cover = build_cover(k, Rational(1, 4));
  auto far = elements_disjoint_from(cover, *k->index_of(Simplex({2})));
  // every element except the ball at vertex 2
  CHECK(far.size() == cover.elements.size() - 1);
  auto top = elements_disjoint_from(cover, *k->index_of(Simplex({0, 1})));
  CHECK(top.size() == 2);
}

TEST_CASE("invalid delta") {
  CHECK(testing::error_code_of([] { build_cover(testing::unit_segment(), Rational(0)); }) == ErrorCode::RangeError);
}
