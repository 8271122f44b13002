#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polysmooth/complex.hpp"

namespace polysmooth {

/// Vertex assignment between two complexes. `vertex_map[v]` is the target
/// vertex of source vertex v.
struct SimplicialMap {
  ComplexPtr source;
  ComplexPtr target;
  std::vector<VertexId> vertex_map;
};

struct SimplicialCheck {
  bool ok = true;
  std::optional<Simplex> violator;
};

/// Every source simplex must map onto the vertex set of a target simplex.
SimplicialCheck is_simplicial(std::span<const VertexId> vertex_map, const SimplicialComplex& source,
                              const SimplicialComplex& target);

/// Continuous map affine on each simplex of its source complex, given by
/// the images of the source vertices.
class PLMap {
 public:
  PLMap(ComplexPtr source, std::vector<Point> images);
  static PLMap from_simplicial(const SimplicialMap& g);

  const ComplexPtr& source() const { return source_; }
  const std::vector<Point>& images() const { return images_; }
  std::size_t target_dim() const { return images_.front().size(); }

  /// Exact evaluation; throws Error(NotInComplex).
  Point operator()(const Point& x) const;
  /// Affine interpolation of the vertex images of `s` with the given weights.
  Point on_simplex(const Simplex& s, std::span<const Rational> weights) const;

 private:
  ComplexPtr source_;
  std::vector<Point> images_;
};

Point evaluate_pl(const PLMap& g, const Point& x);

/// A map known only through evaluations, with a declared Lipschitz constant.
/// The evaluator may decline a point (returns nullopt), e.g. a table lookup miss.
struct OpaqueMap {
  std::function<std::optional<Point>(const Point&)> evaluate;
  Rational lipschitz;
  std::size_t target_dim = 0;
};

class EvaluableMap {
 public:
  EvaluableMap(PLMap pl) : impl_(std::move(pl)) {}
  EvaluableMap(OpaqueMap opaque) : impl_(std::move(opaque)) {}

  const PLMap* as_pl() const { return std::get_if<PLMap>(&impl_); }
  const OpaqueMap* as_opaque() const { return std::get_if<OpaqueMap>(&impl_); }
  std::size_t target_dim() const;
  /// Throws Error(EvaluationFailure) when an opaque evaluator declines.
  Point operator()(const Point& x) const;

 private:
  std::variant<PLMap, OpaqueMap> impl_;
};

enum class StarDecision { Holds, Violated, Undecided };

struct StarResult {
  StarDecision decision = StarDecision::Holds;
  std::optional<VertexId> vertex;  // first vertex where the condition failed or was undecided
  std::string detail;
};

struct StarOptions {
  /// Largest barycentric lattice order used when certifying opaque maps.
  int max_sampling_order = 64;
};

/// f(Star(v, K)) inside Star(w, L) for a single vertex pair.
StarDecision star_condition_at(const SimplicialComplex& k, const SimplicialComplex& l, const EvaluableMap& f,
                               VertexId v, VertexId w, const StarOptions& options = {});

StarResult check_star_condition(const SimplicialComplex& k, const SimplicialComplex& l, const EvaluableMap& f,
                                std::span<const VertexId> vertex_map, const StarOptions& options = {});

/// Boolean form; throws Error(Undecided) when an opaque map cannot be certified.
bool star_condition(const SimplicialComplex& k, const SimplicialComplex& l, const EvaluableMap& f,
                    std::span<const VertexId> vertex_map, const StarOptions& options = {});

struct SimplicialApproximation {
  int source_level = 0;  // k
  int target_level = 0;  // l
  SimplicialMap map;     // K^(k) -> L^(l)
  Rational target_mesh_squared;
};

struct ApproximationOptions {
  int max_source_level = 12;
  int max_target_level = 24;
  StarOptions star;
};

/// Smallest l with mesh(L^(l)) < eps, compared on squares.
int target_level_for(const SimplicialComplex& l, const Rational& eps, int max_level = 24);

/// Finds k, l and a simplicial g: K^(k) -> L^(l) satisfying the star
/// condition for f. Throws Error(SubdivisionLimit) or Error(Undecided).
SimplicialApproximation simplicial_approximation(const ComplexPtr& k, const ComplexPtr& l, const EvaluableMap& f,
                                                 const Rational& eps, const ApproximationOptions& options = {});

}  // namespace polysmooth
