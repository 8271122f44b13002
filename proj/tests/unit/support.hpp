#pragma once

#include <memory>
#include <vector>

#include "polysmooth/complex.hpp"
#include "polysmooth/errors.hpp"

namespace testing {

using polysmooth::ComplexPtr;
using polysmooth::Point;
using polysmooth::Rational;
using polysmooth::VertexId;

inline Point pt(std::initializer_list<Rational> c) { return Point(c); }

inline ComplexPtr make(std::vector<Point> v, const std::vector<std::vector<VertexId>>& s) {
  return std::make_shared<polysmooth::SimplicialComplex>(polysmooth::build_complex(std::move(v), s));
}

inline ComplexPtr unit_segment() { return make({pt({0}), pt({1})}, {{0, 1}}); }
inline ComplexPtr split_segment() { return make({pt({0}), pt({Rational(1, 2)}), pt({1})}, {{0, 1}, {1, 2}}); }
inline ComplexPtr standard_triangle() { return make({pt({0, 0}), pt({1, 0}), pt({0, 1})}, {{0, 1, 2}}); }
inline ComplexPtr two_edge_path() { return make({pt({0, 0}), pt({1, 0}), pt({1, 1})}, {{0, 1}, {1, 2}}); }
inline ComplexPtr triangle_boundary() {
  return make({pt({0, 0}), pt({1, 0}), pt({0, 1})}, {{0, 1}, {1, 2}, {0, 2}});
}
inline ComplexPtr square() { return make({pt({0, 0}), pt({1, 0}), pt({1, 1}), pt({0, 1})}, {{0, 1, 2}, {0, 2, 3}}); }
inline ComplexPtr tetrahedron_boundary() {
  return make({pt({0, 0, 0}), pt({1, 0, 0}), pt({0, 1, 0}), pt({0, 0, 1})}, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

template <class F>
polysmooth::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const polysmooth::Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a polysmooth::Error");
}

}  // namespace testing
