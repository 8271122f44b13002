#include "polysmooth/exact_lp.hpp"

#include <optional>

namespace polysmooth {

namespace {

struct Tableau {
  std::size_t m = 0;
  std::size_t n = 0;  // structural columns (excluding rhs)
  std::vector<std::vector<Rational>> rows;  // m rows of n+1 entries
  std::vector<Rational> cost;               // reduced costs, n+1 entries (last = -objective)
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t j = 0; j <= n; ++j) rows[i][j] -= f * rows[r][j];
    }
    if (sgn(cost[c]) != 0) {
      Rational f = cost[c];
      for (std::size_t j = 0; j <= n; ++j) cost[j] -= f * rows[r][j];
    }
    basis[r] = c;
  }

  // Maximizes; cost holds reduced costs c_j - z_j. Returns false if unbounded.
  bool run(const std::vector<bool>& allowed) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < n; ++j)
        if (allowed[j] && sgn(cost[j]) > 0) {
          enter = j;
          break;
        }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < m; ++i) {
        if (sgn(rows[i][*enter]) <= 0) continue;
        Rational ratio = rows[i][n] / rows[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }
};

}  // namespace

LpResult solve_lp(const RationalMatrix& a, const std::vector<Rational>& b, const std::vector<Rational>& c) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Tableau t;
  t.m = m;
  t.n = n + m;
  t.rows.assign(m, std::vector<Rational>(t.n + 1));
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = sgn(b[i]) < 0;
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = flip ? Rational(-a(i, j)) : a(i, j);
    t.rows[i][n + i] = 1;
    t.rows[i][t.n] = flip ? Rational(-b[i]) : b[i];
    t.basis[i] = n + i;
  }
  // Phase 1: maximize -sum(artificials).
  t.cost.assign(t.n + 1, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= t.n; ++j)
      if (j < n || j == t.n) t.cost[j] += t.rows[i][j];
  std::vector<bool> allowed(t.n, true);
  t.run(allowed);
  LpResult result;
  if (sgn(t.cost[t.n]) != 0) {
    result.status = LpResult::Status::Infeasible;
    return result;
  }
  // Drive artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < t.m;) {
    if (t.basis[i] < n) {
      ++i;
      continue;
    }
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(t.rows[i][j]) != 0) {
        col = j;
        break;
      }
    if (col) {
      t.pivot(i, *col);
      ++i;
    } else {
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
      --t.m;
    }
  }
  // Phase 2.
  for (std::size_t j = n; j < t.n; ++j) allowed[j] = false;
  t.cost.assign(t.n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) t.cost[j] = c[j];
  for (std::size_t i = 0; i < t.m; ++i) {
    Rational cb = c[t.basis[i]];
    if (sgn(cb) == 0) continue;
    for (std::size_t j = 0; j <= t.n; ++j) t.cost[j] -= cb * t.rows[i][j];
  }
  if (!t.run(allowed)) {
    result.status = LpResult::Status::Unbounded;
    return result;
  }
  result.status = LpResult::Status::Optimal;
  result.value = -t.cost[t.n];
  result.x.assign(n, 0);
  for (std::size_t i = 0; i < t.m; ++i)
    if (t.basis[i] < n) result.x[t.basis[i]] = t.rows[i][t.n];
  return result;
}

}  // namespace polysmooth
