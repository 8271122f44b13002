#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polysmooth/cover.hpp"

namespace polysmooth {

/// Degree 2nu+1 Hermite step P on [0,1]: P(0)=0, P(1)=1, derivatives 1..nu
/// vanish at both ends. Extended by 0 below 0 and by 1 above 1, so C^nu.
class SmoothstepProfile {
 public:
  /// Throws Error(RangeError) for nu < 1.
  explicit SmoothstepProfile(int nu);

  int order() const { return nu_; }
  /// c_0..c_{2nu+1} with P(u) = sum c_k u^k.
  const std::vector<Rational>& coefficients() const { return coeffs_; }

  Rational value(const Rational& u) const;
  double operator()(double u) const;
  /// k-th derivative of the extended function (k >= 0).
  double derivative(double u, int k) const;

 private:
  int nu_;
  std::vector<Rational> coeffs_;
  std::vector<double> coeffs_f_;
};

SmoothstepProfile smoothstep(int nu);

/// Bump attached to a cover element. Ball: 1 - P(3(q - 1/9)) with
/// q = |x - v|^2 / r^2, so 1 for |x - v| <= r/3 and 0 from 2r/3 on.
/// Tube: prod_i P(3(w_i / c - 4/3)) * (1 - P(3(n / delta^2 - 1/9))) with w the
/// barycentric coordinates of the projection, c = eps/(d+1) and n the squared
/// normal distance. Positive exactly on the element's core.
class BumpFunction {
 public:
  BumpFunction(const CoverElement& element, std::shared_ptr<const SmoothstepProfile> profile);

  const CoverElement& element() const { return *element_; }
  const SmoothstepProfile& profile() const { return *profile_; }

  double operator()(std::span<const double> x) const;
  /// Same, but returns exactly 0 when x is outside the core (exact test).
  double value(const Point& x) const;
  double eval(std::span<const double> x, AffineFrame::ProjectionF& scratch) const;

 private:
  const CoverElement* element_;
  std::shared_ptr<const SmoothstepProfile> profile_;
  double inv_r2_ = 0.0;
  double inv_c_ = 0.0;
};

/// theta_s = bump_s / sum of bumps.
class PartitionOfUnity {
 public:
  using Weights = std::vector<std::pair<std::size_t, double>>;

  PartitionOfUnity(std::shared_ptr<const SkeletonCover> cover, int nu);

  const SkeletonCover& cover() const { return *cover_; }
  std::size_t size() const { return bumps_.size(); }
  const BumpFunction& bump(std::size_t i) const { return bumps_.at(i); }
  int order() const { return profile_->order(); }

  /// Nonzero theta values at x, sorted by element index.
  /// Throws Error(ZeroDenominator) when no bump is positive at x.
  Weights evaluate(std::span<const double> x) const;
  /// Exact support decisions: elements whose core misses x get weight 0.
  Weights evaluate(const Point& x) const;
  /// Elements whose bounding box contains x.
  std::vector<std::size_t> candidates(std::span<const double> x) const;

 private:
  std::shared_ptr<const SkeletonCover> cover_;
  std::shared_ptr<const SmoothstepProfile> profile_;
  std::vector<BumpFunction> bumps_;
  // bucket grid over the first few coordinates
  std::size_t grid_dims_ = 0;
  std::vector<double> grid_lo_, grid_step_;
  std::vector<std::size_t> grid_n_;
  std::vector<std::vector<std::size_t>> buckets_;
};

struct SmoothnessOptions {
  std::vector<double> ladder{1e-2, 1e-3, 1e-4};
  double factor = 5.0;
};

struct SmoothnessReport {
  int measured_order = -1;             // largest k with orders 0..k matching
  std::optional<int> first_failing;    // nullopt when all orders up to nu_max match
  std::vector<double> mismatch;        // per order, worst |D+ - D-| over the ladder
  std::vector<double> tolerance;       // per order, tolerance at that worst step
};

/// One-sided finite differences of g at the seam t = 0, orders 0..nu_max.
/// Order k matches when |D_k^+(h) - D_k^-(h)| <= factor (k+2) h S_{k+1} + roundoff
/// for every h of the ladder, S_{k+1} being the larger one-sided (k+1)-th
/// difference quotient. Throws Error(EvaluationFailure) on non-finite values.
SmoothnessReport smoothness_order(const std::function<double(double)>& g, int nu_max,
                                  const SmoothnessOptions& options = {});

/// Vector-valued version: g restricted to the line x0 + t n, every component
/// checked, the worst order reported.
SmoothnessReport smoothness_order(const std::function<std::vector<double>(std::span<const double>)>& f,
                                  std::span<const double> seam_point, std::span<const double> direction,
                                  int nu_max, const SmoothnessOptions& options = {});

}  // namespace polysmooth
