#include "polysmooth/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "polysmooth/errors.hpp"

namespace polysmooth {

namespace {

void lattice_rec(std::size_t parts, int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= remaining; ++a) {
    cur.push_back(a);
    lattice_rec(parts, remaining - a, cur, out);
    cur.pop_back();
  }
}

std::size_t lattice_size(int dim, int order) {
  // C(order + dim, dim)
  double r = 1.0;
  for (int i = 1; i <= dim; ++i) r = r * (order + i) / i;
  return static_cast<std::size_t>(std::llround(r));
}

}  // namespace

std::vector<Point> simplex_lattice(std::span<const Point> vertices, int order) {
  if (vertices.empty()) return {};
  if (order < 1) return {barycenter(vertices)};
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  lattice_rec(vertices.size(), order, cur, comps);
  std::vector<Point> out;
  out.reserve(comps.size());
  const std::size_t p = vertices.front().size();
  for (const auto& c : comps) {
    Point x(p);
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c[j] != 0)
        for (std::size_t i = 0; i < p; ++i) x[i] += Rational(c[j], order) * vertices[j][i];
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Point> lattice_samples(const SimplicialComplex& k, std::size_t target) {
  const auto& maxi = k.maximal_simplices();
  if (maxi.empty()) return {};
  auto total_for = [&](int order) {
    std::size_t t = 0;
    for (std::size_t si : maxi) t += lattice_size(k.simplex(si).dim(), order);
    return t;
  };
  int order = 1;
  while (order < (1 << 20) && total_for(order * 2) <= target) order *= 2;
  while (total_for(order + 1) <= target) ++order;
  auto cmp = [](const Point& a, const Point& b) { return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()); };
  std::set<Point, decltype(cmp)> pts(cmp);
  for (std::size_t si : maxi) {
    auto verts = k.points_of(k.simplex(si));
    for (auto& x : simplex_lattice(verts, k.simplex(si).dim() == 0 ? 0 : order)) pts.insert(std::move(x));
  }
  return {pts.begin(), pts.end()};
}

std::vector<Point> random_samples(const SimplicialComplex& k, std::size_t count, std::uint64_t seed) {
  const auto& maxi = k.maximal_simplices();
  if (maxi.empty()) return {};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, maxi.size() - 1);
  std::exponential_distribution<double> expo(1.0);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const Simplex& s = k.simplex(maxi[pick(rng)]);
    auto verts = k.points_of(s);
    // uniform weights via normalized exponentials, quantized to 2^-30
    std::vector<double> w(s.size());
    double sum = 0.0;
    for (auto& x : w) sum += (x = expo(rng));
    std::vector<long> q(s.size());
    long rest = 1L << 30;
    for (std::size_t j = 0; j + 1 < s.size(); ++j) {
      q[j] = std::min(rest, static_cast<long>(std::floor(w[j] / sum * static_cast<double>(1L << 30))));
      rest -= q[j];
    }
    q.back() = rest;
    Point x(k.ambient_dim());
    for (std::size_t j = 0; j < s.size(); ++j)
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += Rational(q[j], 1L << 30) * verts[j][i];
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Point> samples(const SimplicialComplex& k, std::size_t count, std::optional<std::uint64_t> seed) {
  return seed ? random_samples(k, count, *seed) : lattice_samples(k, count);
}

}  // namespace polysmooth
