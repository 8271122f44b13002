#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "polysmooth/exact_linalg.hpp"
#include "polysmooth/rational.hpp"

namespace polysmooth {

using VertexId = std::size_t;

/// A simplex as a strictly increasing list of vertex ids.
class Simplex {
 public:
  Simplex() = default;
  /// Sorts and deduplicates the ids.
  explicit Simplex(std::vector<VertexId> ids);

  const std::vector<VertexId>& ids() const { return ids_; }
  int dim() const { return static_cast<int>(ids_.size()) - 1; }
  std::size_t size() const { return ids_.size(); }
  bool contains(VertexId v) const;
  bool is_face_of(const Simplex& other) const;
  /// Faces obtained by dropping vertices; includes the simplex itself, never the empty set.
  std::vector<Simplex> faces() const;

  auto operator<=>(const Simplex& other) const {
    if (auto c = ids_.size() <=> other.ids_.size(); c != 0) return c;
    return ids_ <=> other.ids_;
  }
  bool operator==(const Simplex&) const = default;

 private:
  std::vector<VertexId> ids_;
};

/// Barycentric coordinates of a point with respect to the open simplex that
/// contains it: all weights strictly positive and summing to one.
struct BarycentricCoords {
  Simplex simplex;
  std::vector<Rational> weights;
};

/// Finite geometric simplicial complex with exact rational vertices.
/// Immutable once built; simplices are ordered by (dimension, ids), so the
/// 0-simplex {v} has index v.
class SimplicialComplex {
 public:
  /// Validated construction: face closure, affine independence and the
  /// common-face gluing axiom are all checked exactly.
  static SimplicialComplex build(std::vector<Point> vertices, const std::vector<std::vector<VertexId>>& top_simplices);
  /// Construction for inputs known to be valid (used by subdivision).
  static SimplicialComplex build_trusted(std::vector<Point> vertices, const std::vector<Simplex>& top_simplices);

  std::size_t ambient_dim() const { return ambient_dim_; }
  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(VertexId v) const { return vertices_.at(v); }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const Simplex& simplex(std::size_t index) const { return simplices_.at(index); }
  std::optional<std::size_t> index_of(const Simplex& s) const;
  /// Simplices that are not a proper face of another simplex.
  const std::vector<std::size_t>& maximal_simplices() const { return maximal_; }
  std::vector<Point> points_of(const Simplex& s) const;
  std::vector<std::vector<double>> points_of_f(const Simplex& s) const;

  /// For complexes produced by subdivision: index of the smallest simplex of
  /// the root complex containing each simplex. Empty for built complexes.
  const std::vector<std::size_t>& provenance() const { return provenance_; }
  int subdivision_level() const { return level_; }

  /// Axis-aligned bounds of a simplex, in doubles widened outward by one ulp-scale margin.
  const std::pair<std::vector<double>, std::vector<double>>& bounds(std::size_t simplex_index) const {
    return bounds_.at(simplex_index);
  }

  /// Exact affine frame of the i-th maximal simplex (same order as maximal_simplices()).
  const AffineFrame& maximal_frame(std::size_t i) const { return maximal_frames_.at(i); }

  friend SimplicialComplex barycentric_subdivide(const SimplicialComplex& k, int rounds);

 private:
  void finalize(const std::vector<Simplex>& tops);

  std::size_t ambient_dim_ = 0;
  int dim_ = -1;
  int level_ = 0;
  std::vector<Point> vertices_;
  std::vector<Simplex> simplices_;
  std::map<Simplex, std::size_t> index_;
  std::vector<std::size_t> maximal_;
  std::vector<std::size_t> provenance_;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> bounds_;
  std::vector<AffineFrame> maximal_frames_;
};

using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

SimplicialComplex build_complex(std::vector<Point> vertices, const std::vector<std::vector<VertexId>>& top_simplices);

/// k-th iterated barycentric subdivision; provenance maps back to k's root.
SimplicialComplex barycentric_subdivide(const SimplicialComplex& k, int rounds);

/// Max over simplices of the squared diameter (max pairwise vertex distance), exact.
Rational mesh_size_squared(const SimplicialComplex& k);
double mesh_size(const SimplicialComplex& k);

/// Indices of the simplices whose open interiors make up Star(v, K).
std::vector<std::size_t> star(const SimplicialComplex& k, VertexId v);

/// Unique open simplex containing x, with strictly positive weights.
std::optional<BarycentricCoords> try_locate(const SimplicialComplex& k, const Point& x);
/// Throws Error(NotInComplex).
BarycentricCoords locate(const SimplicialComplex& k, const Point& x);

/// Float point location: index of a maximal simplex whose weights are all
/// >= -tol, with those weights; nullopt when no simplex qualifies.
struct LocatedF {
  std::size_t simplex_index;
  std::vector<double> weights;
};
std::optional<LocatedF> locate_f(const SimplicialComplex& k, std::span<const double> x, double tol = 1e-12);

/// Barycenter of a list of points.
Point barycenter(std::span<const Point> points);

}  // namespace polysmooth
