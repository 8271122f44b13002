#include "doctest.h"
#include "polysmooth/errors.hpp"
#include "polysmooth/sampling.hpp"
#include "polysmooth/simplicial_map.hpp"
#include "support.hpp"

using namespace polysmooth;
using testing::make;
using testing::pt;

namespace {

PLMap tent() { return PLMap(testing::split_segment(), {pt({0}), pt({1}), pt({0})}); }

}  // namespace

TEST_CASE("is_simplicial") {
  auto k = testing::square();
  std::vector<VertexId> id{0, 1, 2, 3};
  CHECK(is_simplicial(id, *k, *k).ok);

  auto two_points = make({pt({0}), pt({5})}, {{0}, {1}});
  std::vector<VertexId> split{0, 1};
  auto res = is_simplicial(split, *testing::unit_segment(), *two_points);
  CHECK_FALSE(res.ok);
  REQUIRE(res.violator);
  CHECK(*res.violator == Simplex({0, 1}));

  std::vector<VertexId> collapse{0, 1, 1};
  CHECK(is_simplicial(collapse, *testing::standard_triangle(), *testing::standard_triangle()).ok);
}

TEST_CASE("evaluate_pl") {
  auto seg = testing::unit_segment();
  PLMap id(seg, {pt({0}), pt({1})});
  CHECK(evaluate_pl(id, pt({Rational(1, 3)})) == pt({Rational(1, 3)}));
  PLMap collapse(seg, {pt({Rational(2, 5)}), pt({Rational(2, 5)})});
  CHECK(collapse(pt({Rational(7, 9)})) == pt({Rational(2, 5)}));
  CHECK(tent()(pt({Rational(1, 4)})) == pt({Rational(1, 2)}));
  CHECK(testing::error_code_of([&] { id(pt({3})); }) == ErrorCode::NotInComplex);
}

TEST_CASE("star condition examples") {
  auto seg = testing::unit_segment();
  EvaluableMap idf(PLMap(seg, {pt({0}), pt({1})}));
  std::vector<VertexId> id{0, 1};
  CHECK(star_condition(*seg, *seg, idf, id));

  // tent on the unsubdivided segment, g(0) = g(1) = 0
  EvaluableMap tent_on_seg(tent());
  auto tent_src = testing::split_segment();
  std::vector<VertexId> zero{0, 0, 0};
  CHECK_FALSE(star_condition(*tent_src, *seg, tent_on_seg, zero));

  auto k1 = testing::split_segment();
  EvaluableMap id1(PLMap(k1, {pt({0}), pt({Rational(1, 2)}), pt({1})}));
  std::vector<VertexId> snap{0, 0, 1};
  CHECK(star_condition(*k1, *seg, id1, snap));
}

TEST_CASE("target level for a mesh bound") {
  auto seg = testing::unit_segment();
  CHECK(target_level_for(*seg, Rational(3, 10)) == 2);
  CHECK(target_level_for(*seg, Rational(3, 5)) == 1);
}

TEST_CASE("simplicial approximation of the identity") {
  auto seg = testing::unit_segment();
  EvaluableMap f(PLMap(seg, {pt({0}), pt({1})}));
  auto sa = simplicial_approximation(seg, seg, f, Rational(3, 10));
  CHECK(sa.target_level == 2);
  CHECK(sa.target_mesh_squared == Rational(1, 16));
  CHECK(is_simplicial(sa.map.vertex_map, *sa.map.source, *sa.map.target).ok);
  CHECK(star_condition(*sa.map.source, *sa.map.target, f, sa.map.vertex_map));
}

TEST_CASE("constant map at a vertex needs no subdivision") {
  auto seg = testing::unit_segment();
  auto l = testing::split_segment();
  EvaluableMap f(PLMap(seg, {pt({Rational(1, 2)}), pt({Rational(1, 2)})}));
  auto sa = simplicial_approximation(seg, l, f, Rational(3, 5));
  CHECK(sa.source_level == 0);
  for (VertexId w : sa.map.vertex_map) CHECK(sa.map.target->vertex(w) == pt({Rational(1, 2)}));
}

TEST_CASE("tent map with eps 0.6") {
  auto seg = testing::unit_segment();
  auto k = testing::split_segment();
  EvaluableMap f(tent());
  auto sa = simplicial_approximation(k, seg, f, Rational(3, 5));
  CHECK(sa.target_level == 1);
  CHECK(sa.target_mesh_squared == Rational(1, 4));
  PLMap g = PLMap::from_simplicial(sa.map);
  CHECK(g(pt({0})) == pt({0}));
  CHECK(g(pt({Rational(1, 2)})) == pt({1}));
  CHECK(g(pt({1})) == pt({0}));
}

TEST_CASE("error bound and common carrier on a grid") {
  auto seg = testing::unit_segment();
  auto k = testing::split_segment();
  EvaluableMap f(tent());
  auto sa = simplicial_approximation(k, seg, f, Rational(1, 10));
  PLMap g = PLMap::from_simplicial(sa.map);
  const auto& l = *sa.map.target;
  for (const auto& x : lattice_samples(*k, 2000)) {
    Point gx = g(x), fx = f(x);
    CHECK(squared_distance(gx, fx) <= sa.target_mesh_squared);
    auto a = locate(l, gx), b = locate(l, fx);
    std::vector<VertexId> ids = a.simplex.ids();
    ids.insert(ids.end(), b.simplex.ids().begin(), b.simplex.ids().end());
    CHECK(l.index_of(Simplex(ids)).has_value());
  }
}

TEST_CASE("vertex assignment is deterministic") {
  auto seg = testing::unit_segment();
  auto k = testing::split_segment();
  EvaluableMap f(tent());
  auto a = simplicial_approximation(k, seg, f, Rational(1, 5));
  auto b = simplicial_approximation(k, seg, f, Rational(1, 5));
  CHECK(a.map.vertex_map == b.map.vertex_map);
}

TEST_CASE("opaque maps are certified by sampling") {
  auto seg = testing::unit_segment();
  OpaqueMap half{[](const Point& x) -> std::optional<Point> { return Point{x[0] / 2}; }, Rational(1, 2), 1};
  auto sa = simplicial_approximation(seg, seg, EvaluableMap(half), Rational(1, 2));
  CHECK(is_simplicial(sa.map.vertex_map, *sa.map.source, *sa.map.target).ok);
  OpaqueMap refuses{[](const Point&) -> std::optional<Point> { return std::nullopt; }, Rational(1), 1};
  CHECK(testing::error_code_of([&] { EvaluableMap m(refuses);
    m(pt({0}));
  }) == ErrorCode::EvaluationFailure);
}
