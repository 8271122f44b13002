#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "polysmooth/complex.hpp"
#include "polysmooth/errors.hpp"
#include "polysmooth/sampling.hpp"
#include "support.hpp"

using namespace polysmooth;
using testing::make;
using testing::pt;

namespace {

// Independent oracle: brute-force max pairwise squared distance per simplex.
Rational oracle_mesh2(const SimplicialComplex& k) {
  Rational best = 0;
  for (const auto& s : k.simplices())
    for (VertexId a : s.ids())
      for (VertexId b : s.ids()) {
        Rational d = 0;
        for (std::size_t i = 0; i < k.ambient_dim(); ++i) {
          Rational t = k.vertex(a)[i] - k.vertex(b)[i];
          d += t * t;
        }
        best = std::max(best, d);
      }
  return best;
}

std::size_t count_dim(const SimplicialComplex& k, int d) {
  return std::count_if(k.simplices().begin(), k.simplices().end(), [&](const Simplex& s) { return s.dim() == d; });
}

}  // namespace

TEST_CASE("face closure of a segment") {
  auto k = testing::unit_segment();
  CHECK(k->simplices().size() == 3);
  CHECK(k->index_of(Simplex({0})));
  CHECK(k->index_of(Simplex({1})));
  CHECK(k->index_of(Simplex({0, 1})));
}

TEST_CASE("tetrahedron boundary has 4 vertices, 6 edges, 4 triangles") {
  auto k = testing::tetrahedron_boundary();
  CHECK(count_dim(*k, 0) == 4);
  CHECK(count_dim(*k, 1) == 6);
  CHECK(count_dim(*k, 2) == 4);
  CHECK(k->dim() == 2);
}

TEST_CASE("overlapping half-edges are rejected") {
  auto code = testing::error_code_of([] {
    build_complex({pt({0, 0}), pt({2, 0}), pt({0, 1}), pt({1, 0}), pt({3, 0}), pt({1, -1})}, {{0, 1, 2}, {3, 4, 5}});
  });
  CHECK(code == ErrorCode::BadGluing);
}

TEST_CASE("input validation errors") {
  CHECK(testing::error_code_of([] { build_complex({pt({0, 0}), pt({1, 1}), pt({2, 2})}, {{0, 1, 2}}); }) ==
        ErrorCode::AffineDependence);
  CHECK(testing::error_code_of([] { build_complex({pt({0}), pt({0})}, {{0, 1}}); }) == ErrorCode::DuplicateVertex);
  CHECK(testing::error_code_of([] { build_complex({pt({0}), pt({1})}, {{0, 5}}); }) == ErrorCode::UnknownVertex);
  CHECK(testing::error_code_of([] { build_complex({pt({0}), pt({1, 0})}, {{0, 1}}); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(testing::error_code_of([] { build_complex({}, {}); }) == ErrorCode::EmptyComplex);
}

TEST_CASE("barycentric subdivision counts") {
  auto seg = barycentric_subdivide(*testing::unit_segment(), 1);
  CHECK(seg.num_vertices() == 3);
  CHECK(count_dim(seg, 1) == 2);
  std::set<Rational> xs;
  for (const auto& v : seg.vertices()) xs.insert(v[0]);
  CHECK(xs == std::set<Rational>{0, Rational(1, 2), 1});

  auto tri = barycentric_subdivide(*testing::standard_triangle(), 1);
  CHECK(count_dim(tri, 2) == 6);
  CHECK(tri.num_vertices() == 7);

  auto tri2 = barycentric_subdivide(*testing::standard_triangle(), 2);
  CHECK(count_dim(tri2, 2) == 36);
}

TEST_CASE("mesh sizes") {
  auto seg = testing::unit_segment();
  CHECK(mesh_size_squared(*seg) == 1);
  CHECK(mesh_size_squared(barycentric_subdivide(*seg, 4)) == Rational(1, 256));
  CHECK(mesh_size_squared(*testing::standard_triangle()) == 2);
  CHECK(mesh_size(*testing::standard_triangle()) == doctest::Approx(std::sqrt(2.0)));

  auto k3 = barycentric_subdivide(*testing::standard_triangle(), 3);
  CHECK(mesh_size_squared(k3) == oracle_mesh2(k3));
  // (2/3)^3 * sqrt(2), squared
  CHECK(mesh_size_squared(k3) <= Rational(64, 729) * 2);
}

TEST_CASE("mesh contraction by d/(d+1) per round") {
  for (auto k : {testing::standard_triangle(), testing::tetrahedron_boundary(), testing::square()}) {
    SimplicialComplex cur = *k;
    const Rational ratio2 = Rational(k->dim() * k->dim(), (k->dim() + 1) * (k->dim() + 1));
    for (int r = 0; r < 3; ++r) {
      SimplicialComplex next = barycentric_subdivide(cur, 1);
      CHECK(mesh_size_squared(next) <= ratio2 * mesh_size_squared(cur));
      cur = std::move(next);
    }
  }
}

TEST_CASE("subdivision soundness: new vertices lie in the original complex") {
  auto k = testing::triangle_boundary();
  auto k2 = barycentric_subdivide(*k, 2);
  for (const auto& v : k2.vertices()) CHECK(try_locate(*k, v).has_value());
}

TEST_CASE("star of a vertex") {
  auto seg = testing::unit_segment();
  auto st = star(*seg, 0);
  std::set<Simplex> got;
  for (auto i : st) got.insert(seg->simplex(i));
  CHECK(got == std::set<Simplex>{Simplex({0}), Simplex({0, 1})});

  auto split = testing::split_segment();
  CHECK(star(*split, 1).size() == 3);

  auto tet = testing::tetrahedron_boundary();
  auto st3 = star(*tet, 0);
  CHECK(st3.size() == 7);
  CHECK(testing::error_code_of([&] { star(*seg, 7); }) == ErrorCode::UnknownVertex);
}

TEST_CASE("locate") {
  auto seg = testing::unit_segment();
  auto a = locate(*seg, pt({Rational(1, 4)}));
  CHECK(a.simplex == Simplex({0, 1}));
  CHECK(a.weights == std::vector<Rational>{Rational(3, 4), Rational(1, 4)});
  auto b = locate(*seg, pt({0}));
  CHECK(b.simplex == Simplex({0}));
  CHECK(b.weights == std::vector<Rational>{1});
  CHECK(testing::error_code_of([&] { locate(*seg, pt({2})); }) == ErrorCode::NotInComplex);
}

TEST_CASE("locate round trip reproduces the point exactly") {
  auto k = testing::square();
  for (const auto& x : lattice_samples(*k, 500)) {
    auto loc = locate(*k, x);
    Point back(k->ambient_dim(), Rational(0));
    for (std::size_t i = 0; i < loc.simplex.size(); ++i) back = back + loc.weights[i] * k->vertex(loc.simplex.ids()[i]);
    CHECK(back == x);
    for (const auto& w : loc.weights) CHECK(w > 0);
  }
}

TEST_CASE("float location agrees with exact location") {
  auto k = testing::square();
  auto x = pt({Rational(3, 4), Rational(1, 4)});
  auto f = locate_f(*k, to_doubles(x));
  REQUIRE(f);
  CHECK(Simplex({0, 1, 2}) == k->simplex(f->simplex_index));
  CHECK_FALSE(locate_f(*k, std::vector<double>{2.0, 2.0}));
}
