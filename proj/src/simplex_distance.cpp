#include "polysmooth/simplex_distance.hpp"

#include <optional>

#include "polysmooth/exact_linalg.hpp"

namespace polysmooth {

namespace {

std::vector<std::vector<std::size_t>> nonempty_subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

// Closest points between aff(F) and aff(G); nullopt when the stationary point
// is not unique or leaves one of the closed faces.
std::optional<Rational> face_pair_distance(std::span<const Point> a, const std::vector<std::size_t>& f,
                                           std::span<const Point> b, const std::vector<std::size_t>& g) {
  const std::size_t p = a[0].size();
  const std::size_t nf = f.size() - 1;
  const std::size_t ng = g.size() - 1;
  const std::size_t n = nf + ng;
  Point r0 = a[f[0]] - b[g[0]];
  if (n == 0) return squared_norm(r0);
  RationalMatrix d(p, n);
  for (std::size_t j = 0; j < nf; ++j)
    for (std::size_t i = 0; i < p; ++i) d(i, j) = a[f[j + 1]][i] - a[f[0]][i];
  for (std::size_t j = 0; j < ng; ++j)
    for (std::size_t i = 0; i < p; ++i) d(i, nf + j) = -(b[g[j + 1]][i] - b[g[0]][i]);
  RationalMatrix dt = d.transpose();
  RationalMatrix gram = dt * d;
  std::vector<Rational> rhs = dt * std::span<const Rational>(r0);
  for (auto& v : rhs) v = -v;
  auto z = solve(gram, rhs);
  if (!z) return std::nullopt;
  Rational sum_f = 0, sum_g = 0;
  for (std::size_t j = 0; j < nf; ++j) {
    if (sgn((*z)[j]) < 0) return std::nullopt;
    sum_f += (*z)[j];
  }
  for (std::size_t j = 0; j < ng; ++j) {
    if (sgn((*z)[nf + j]) < 0) return std::nullopt;
    sum_g += (*z)[nf + j];
  }
  if (sum_f > 1 || sum_g > 1) return std::nullopt;
  Point diff = r0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < n; ++j) diff[i] += d(i, j) * (*z)[j];
  return squared_norm(diff);
}

}  // namespace

Rational squared_distance_between_hulls(std::span<const Point> a, std::span<const Point> b) {
  std::optional<Rational> best;
  const auto fa = nonempty_subsets(a.size());
  const auto fb = nonempty_subsets(b.size());
  for (const auto& f : fa)
    for (const auto& g : fb) {
      auto dist = face_pair_distance(a, f, b, g);
      if (dist && (!best || *dist < *best)) best = *dist;
    }
  return *best;  // vertex pairs always produce a candidate
}

}  // namespace polysmooth
