#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polysmooth/complex.hpp"

namespace polysmooth {

/// Barycentric lattice of the given order on a simplex: points
/// sum_i (a_i / order) v_i with nonnegative integers a_i summing to order.
std::vector<Point> simplex_lattice(std::span<const Point> vertices, int order);

/// Deterministic sample of |K| with roughly `target` points: the same
/// lattice order on every maximal simplex, duplicates on shared faces
/// removed, ordered lexicographically.
std::vector<Point> lattice_samples(const SimplicialComplex& k, std::size_t target = 10000);

/// Pseudorandom points of |K| (uniform simplex weights on maximal simplices
/// chosen with probability proportional to the lattice share), rounded to
/// exact dyadic rationals. Deterministic for a given seed.
std::vector<Point> random_samples(const SimplicialComplex& k, std::size_t count, std::uint64_t seed);

/// Lattice samples, or random ones when a seed is given.
std::vector<Point> samples(const SimplicialComplex& k, std::size_t count, std::optional<std::uint64_t> seed);

}  // namespace polysmooth
