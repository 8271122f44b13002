#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polysmooth/complex.hpp"
#include "polysmooth/exact_linalg.hpp"

namespace polysmooth {

/// (1-eps)-shrinking of an open simplex: the image of sigma^0 under the
/// homothety of ratio 1-eps centred at the barycenter. In barycentric terms
/// it is {all weights > eps/(d+1)}.
struct ShrunkSimplex {
  Simplex base;
  Rational epsilon;
  std::vector<Point> closed_vertices;  // b + (1-eps)(v - b)

  Rational weight_threshold() const { return epsilon / Rational(static_cast<long>(base.size())); }
  /// Open membership for a point of the base's affine hull, given its weights.
  bool contains_weights(std::span<const Rational> weights) const;
};

/// Throws Error(EpsilonOutOfRange) unless 0 < eps < 1.
ShrunkSimplex shrink(const SimplicialComplex& k, const Simplex& s, const Rational& eps);
ShrunkSimplex shrink(std::vector<Point> vertices, const Simplex& s, const Rational& eps);

/// delta-widening of a shrunk simplex along the orthogonal projection onto
/// its affine hull.
struct WideningTube {
  ShrunkSimplex base;
  Rational delta;
  AffineFrame frame;

  bool contains(const Point& x) const;
  bool closure_contains(const Point& x) const;
};

WideningTube widen(const SimplicialComplex& k, ShrunkSimplex base, const Rational& delta);

/// Orthogonal projection onto the base's affine hull; throws Error(OutsideTube).
Point retract(const WideningTube& tube, const Point& x);

/// One open set U of the cover together with its retraction r: U -> V.
/// Vertices get balls (r constant), higher simplices get widening tubes.
/// Membership predicates are exact and refer to the ambient set; U itself is
/// the intersection with |K|.
class CoverElement {
 public:
  enum class Kind { Ball, Tube };

  static CoverElement ball(std::size_t simplex_index, Simplex s, Point center, Rational radius);
  static CoverElement tube(std::size_t simplex_index, Simplex s, std::vector<Point> vertices, Rational epsilon,
                           Rational delta);

  Kind kind() const { return kind_; }
  std::size_t simplex_index() const { return simplex_index_; }
  const Simplex& simplex() const { return simplex_; }
  int dim() const { return simplex_.dim(); }
  /// Ball radius, or tube normal radius.
  const Rational& radius() const { return radius_; }
  const Rational& epsilon() const { return epsilon_; }
  const AffineFrame& frame() const { return frame_; }
  const std::vector<double>& bounds_lo() const { return lo_; }
  const std::vector<double>& bounds_hi() const { return hi_; }

  bool in_open(const Point& x) const;
  bool in_closure(const Point& x) const;
  /// Region where the element's bump is positive; its closure lies inside U.
  bool in_core(const Point& x) const;
  Point retract(const Point& x) const;
  WideningTube as_tube() const;

  /// Closed shrunk simplex vertices (the single center for balls).
  const std::vector<Point>& shrunk_vertices() const { return shrunk_; }

 private:
  Kind kind_ = Kind::Ball;
  std::size_t simplex_index_ = 0;
  Simplex simplex_;
  Rational radius_;
  Rational epsilon_;
  AffineFrame frame_;
  std::vector<Point> shrunk_;
  std::vector<double> lo_, hi_;
};

struct LevelParameters {
  int dim = 0;
  Rational epsilon;  // 0 for the vertex level
  Rational delta;    // ball radius at level 0, tube radius above
};

/// One element per simplex of K (elements[i] belongs to simplex i), built by
/// induction over skeleton dimension.
struct SkeletonCover {
  ComplexPtr complex;
  Rational delta;
  std::vector<CoverElement> elements;
  std::vector<LevelParameters> levels;
};

struct CoverOptions {
  /// Refinement rounds allowed when certifying coverage, counted beyond the
  /// level where pieces reach the smallest element radius.
  int certification_depth = 16;
  int max_halvings = 64;
  /// Try the closed-form barycentric certificate before bisection.
  bool barycentric_first = true;
};

/// Throws Error(RangeError) for delta <= 0, Error(DeltaTooLarge) if the
/// parameter search fails (not expected for valid complexes).
SkeletonCover build_cover(const ComplexPtr& k, const Rational& delta, const CoverOptions& options = {});

struct CoverViolation {
  std::string property;  // "i", "ii" or "iii"
  std::optional<std::size_t> element;
  std::optional<std::size_t> simplex;
  std::string detail;
};

struct CoverReport {
  std::vector<CoverViolation> violations;
  std::size_t pieces_checked = 0;
  Rational max_retraction_radius;
  bool ok() const { return violations.empty(); }
};

/// (i) cores cover |K| (certified by exact refinement), (ii) Cl(U_s) misses
/// every closed simplex not containing s, (iii) retraction displacement < delta.
CoverReport verify_cover(const SkeletonCover& cover, const CoverOptions& options = {});

/// Smallest length scale of the cover: element radii and the in-simplex
/// width of tube cores.
Rational feature_size(const SkeletonCover& cover);

/// Elements whose simplex is not a face of t, i.e. whose open simplex misses t.
std::vector<std::size_t> elements_disjoint_from(const SkeletonCover& cover, std::size_t t_index);

}  // namespace polysmooth
