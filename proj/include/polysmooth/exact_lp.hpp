#pragma once

#include <vector>

#include "polysmooth/exact_linalg.hpp"

namespace polysmooth {

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Rational value;
  std::vector<Rational> x;
};

/// maximize c.x subject to A x = b, x >= 0, in exact arithmetic.
/// Two-phase tableau simplex with Bland's rule (terminates on degenerate input).
LpResult solve_lp(const RationalMatrix& a, const std::vector<Rational>& b, const std::vector<Rational>& c);

}  // namespace polysmooth
