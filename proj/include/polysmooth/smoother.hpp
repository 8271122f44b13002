#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polysmooth/cover.hpp"
#include "polysmooth/piecewise_map.hpp"
#include "polysmooth/simplicial_map.hpp"
#include "polysmooth/smooth_calculus.hpp"

namespace polysmooth {

/// carrier[t] is the index in `target` of a closed simplex containing g(t),
/// for every simplex index t of the source complex.
struct CarrierAssignment {
  ComplexPtr source;
  ComplexPtr target;
  std::vector<std::size_t> carrier;
};

/// PL maps: exact (smallest target simplex containing the vertex images).
/// Other maps: the smallest simplex containing sampled images of each
/// simplex (lattice of the given order). Throws Error(CarrierViolation) when
/// the images are not contained in a single closed simplex of the target.
CarrierAssignment compute_carriers(const PiecewiseMap& g, const ComplexPtr& target, int sample_order = 8);

/// Smallest closed simplex of l containing all the points, if any (exact).
std::optional<std::size_t> carrier_of_points(const SimplicialComplex& l, std::span<const Point> points);

/// W_t = |K| minus the closures of all cover elements whose simplex is not
/// a face of t.
struct CarrierNeighborhood {
  std::size_t simplex = 0;
  std::vector<std::size_t> excluded;  // element indices

  /// Exact membership for a point of |K|.
  bool contains(const SkeletonCover& cover, const Point& x) const;
};

std::vector<CarrierNeighborhood> carrier_neighborhoods(const SkeletonCover& cover);

/// H(x) = sum_s theta_s(x) g(r_s(x)).
class SmoothedMap {
 public:
  SmoothedMap(std::shared_ptr<const PiecewiseMap> g, CarrierAssignment carriers,
              std::shared_ptr<const SkeletonCover> cover, int nu, double eta);

  const PiecewiseMap& source_map() const { return *g_; }
  const SimplicialComplex& source() const { return *g_->source(); }
  const SkeletonCover& cover() const { return *cover_; }
  const PartitionOfUnity& partition() const { return *pou_; }
  const CarrierAssignment& carriers() const { return carriers_; }
  int order() const { return pou_->order(); }
  double eta() const { return eta_; }
  std::size_t target_dim() const { return g_->target_dim(); }

  /// Throws Error(NotInComplex) for points off |K|.
  std::vector<double> operator()(std::span<const double> x) const;
  Point evaluate(const Point& x) const;
  /// The same formula on a neighbourhood of |K| in the ambient space, with
  /// each piece extended polynomially; throws Error(ZeroDenominator) where
  /// no bump is positive.
  std::vector<double> extended(std::span<const double> x) const;

  struct Terms {
    PartitionOfUnity::Weights weights;
    std::vector<std::vector<double>> images;  // g(r_s(x)) per active element
    std::vector<double> value;
  };
  /// Evaluation with exact support decisions, reporting the active terms.
  Terms terms(const Point& x) const;

 private:
  std::vector<double> combine(const PartitionOfUnity::Weights& weights,
                              const std::vector<std::vector<double>>& images) const;
  std::vector<double> image_of(std::size_t element, std::span<const double> x,
                               AffineFrame::ProjectionF& scratch) const;
  std::shared_ptr<const PiecewiseMap> g_;
  CarrierAssignment carriers_;
  std::shared_ptr<const SkeletonCover> cover_;
  std::shared_ptr<const PartitionOfUnity> pou_;
  double eta_;
  std::vector<std::size_t> element_piece_;               // maximal index containing each element's simplex
  std::vector<std::vector<double>> vertex_images_;       // PL: float images of source vertices
};

/// Radius delta for the cover: continuity radius of g at eta/2, rounded down
/// to a dyadic rational and capped by the diameter of |K|.
Rational cover_radius_for(const PiecewiseMap& g, double eta);

/// Builds the cover from g's modulus and smooths. Throws
/// Error(ModulusUnavailable), Error(CarrierViolation).
SmoothedMap smooth_map(std::shared_ptr<const PiecewiseMap> g, CarrierAssignment carriers, double eta, int nu,
                       const CoverOptions& cover_options = {});

struct IotaMap {
  std::shared_ptr<const SmoothedMap> map;
  int level = 0;
  int order = 0;
  double bound() const;  // 2^-level
};

IotaMap iota(const ComplexPtr& k, int nu, int n, const CoverOptions& cover_options = {});

/// f composed with iota, evaluated with the piece of f belonging to the
/// carrier of x so the composition is smooth.
class PullbackMap {
 public:
  PullbackMap(std::shared_ptr<const PiecewiseMap> f, IotaMap iota);
  std::vector<double> operator()(std::span<const double> x) const;
  /// Same on an ambient neighbourhood of |K|.
  std::vector<double> extended(std::span<const double> x) const;
  /// Lip(f) 2^-n; throws Error(ModulusUnavailable).
  double convergence_bound() const;
  const IotaMap& iota() const { return iota_; }

 private:
  std::shared_ptr<const PiecewiseMap> f_;
  IotaMap iota_;
};

PullbackMap pullback_smooth(std::shared_ptr<const PiecewiseMap> f, IotaMap iota);

struct ApproximationResult {
  SimplicialApproximation simplicial;
  std::shared_ptr<const SmoothedMap> map;
  Rational eps;
  Rational simplicial_budget;
  double smoothing_budget = 0.0;
};

struct ApproximateOptions {
  Rational simplicial_share{1, 2};
  ApproximationOptions simplicial;
  CoverOptions cover;
};

/// Simplicial approximation within share*eps, then smoothing within the rest.
ApproximationResult approximate_map(const ComplexPtr& k, const ComplexPtr& l, const EvaluableMap& f,
                                    const Rational& eps, int nu, const ApproximateOptions& options = {});

struct MapCertificate {
  std::size_t samples = 0;
  double max_error = 0.0;       // sup |H - reference|
  double error_bound = 0.0;
  bool error_ok = true;
  double min_carrier_weight = 1.0;  // smallest barycentric coordinate of H(x) in its carrier
  double max_carrier_normal = 0.0;
  std::size_t carrier_soft_failures = 0;
  double max_partition_defect = 0.0;  // |sum theta - 1|
  bool convexity_ok = true;
  std::vector<std::string> failures;
  bool ok() const { return error_ok && convexity_ok && carrier_soft_failures == 0 && failures.empty(); }
};

using Reference = std::function<std::vector<double>(const Point&)>;

/// Checks error against the reference (default: the source map g), carrier
/// containment H(x) in xi_t for the open simplex t of x, and the convexity
/// witness at every sample. Throws Error(CarrierViolation) on a hard failure
/// (barycentric coordinate below -1e-6).
MapCertificate certify_map(const SmoothedMap& h, std::span<const Point> samples, double error_bound,
                           const Reference& reference = {});

/// Seams of K crossed by short segments; every codimension-one face and
/// every vertex is checked. Returns the smallest measured order.
struct SeamReport {
  int min_order = 0;
  std::size_t seams = 0;
  std::vector<std::pair<std::size_t, int>> per_seam;  // (simplex index, order)
};
SeamReport seam_smoothness(const std::function<std::vector<double>(std::span<const double>)>& f,
                           const SimplicialComplex& k, double step, int nu_max);

}  // namespace polysmooth
