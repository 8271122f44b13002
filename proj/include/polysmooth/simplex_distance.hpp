#pragma once

#include <span>

#include "polysmooth/rational.hpp"

namespace polysmooth {

/// Exact squared Euclidean distance between the convex hulls of two
/// affinely independent point sets. Enumerates face pairs and keeps the
/// feasible stationary points of the unconstrained least-squares problem.
Rational squared_distance_between_hulls(std::span<const Point> a, std::span<const Point> b);

inline Rational squared_distance_to_hull(const Point& x, std::span<const Point> b) {
  return squared_distance_between_hulls(std::span<const Point>(&x, 1), b);
}

}  // namespace polysmooth
