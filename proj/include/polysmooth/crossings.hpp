#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polysmooth/rational.hpp"
#include "polysmooth/smooth_calculus.hpp"

namespace polysmooth {

/// X = union over j in J of the coordinate hyperplanes {x_j = 0} in R^d.
/// Indices are 0-based here; file formats and the CLI use 1-based indices.
struct CoordinateDivisor {
  std::size_t dim = 0;
  std::vector<std::size_t> components;  // sorted, unique
  std::optional<std::pair<Point, Point>> box;

  /// Throws Error(RangeError) for an empty or out-of-range index set.
  static CoordinateDivisor make(std::size_t dim, std::vector<std::size_t> components,
                                std::optional<std::pair<Point, Point>> box = std::nullopt);
  bool contains(const Point& x) const;
};

/// {x_i = 0 for i in indices}, a level-(|indices|-1) stratum.
struct Stratum {
  int level = 0;
  std::vector<std::size_t> indices;
  std::size_t dim(std::size_t ambient) const { return ambient - indices.size(); }
  bool contains(const Point& x) const;
};

/// All level-l strata: index subsets of size l+1. Empty when l+1 > |J|.
std::vector<Stratum> sing_stratification(const CoordinateDivisor& x, int level);

/// Coordinate projection onto a stratum, compatible with every component.
class CompatibleRetraction {
 public:
  explicit CompatibleRetraction(Stratum z) : z_(std::move(z)) {}
  const Stratum& stratum() const { return z_; }
  Point operator()(const Point& x) const;
  std::vector<double> operator()(std::span<const double> x) const;

 private:
  Stratum z_;
};

/// Throws Error(RangeError) when z is not a stratum of x.
CompatibleRetraction compatible_retraction(const Stratum& z, const CoordinateDivisor& x);

/// x_j -> f(x_j / eta) x_j with f even, 0 for |t| <= 1/3, 1 for |t| >= 1/2,
/// f(t) = P((|t| - 1/3) 6) between.
class CollarSquash {
 public:
  CollarSquash(std::size_t coordinate, Rational eta, int nu);

  std::size_t coordinate() const { return j_; }
  const Rational& eta() const { return eta_; }
  int order() const { return profile_->order(); }

  Rational factor(const Rational& t) const;  // f(t / eta)
  double factor(double t) const;
  Point operator()(const Point& x) const;
  std::vector<double> operator()(std::span<const double> x) const;
  /// |x_j| < eta/3: the open set this squash sends into {x_j = 0}.
  bool in_plateau(const Point& x) const;

 private:
  std::size_t j_;
  Rational eta_;
  double eta_f_;
  std::shared_ptr<const SmoothstepProfile> profile_;
};

CollarSquash collar_squash(std::size_t coordinate, const Rational& eta, int nu);

/// rho = Psi_{j_1} o ... o Psi_{j_s}, components in increasing order; the
/// squashes act on distinct coordinates, so the composition is evaluated
/// coordinatewise.
class WeakRetraction {
 public:
  WeakRetraction(CoordinateDivisor divisor, Rational eta, int nu);

  const CoordinateDivisor& divisor() const { return divisor_; }
  const Rational& eta() const { return eta_; }
  int order() const { return nu_; }
  const std::vector<CollarSquash>& squashes() const { return squashes_; }

  Point operator()(const Point& x) const;
  std::vector<double> operator()(std::span<const double> x) const;

  /// Exact W membership; W is the union of the sets |x_j| < eta/3, since the
  /// later squashes never change coordinate j.
  bool in_domain(const Point& x) const;
  /// First component whose plateau contains x.
  std::optional<std::size_t> domain_witness(const Point& x) const;

 private:
  CoordinateDivisor divisor_;
  Rational eta_;
  int nu_;
  std::vector<CollarSquash> squashes_;
};

WeakRetraction weak_retraction(const CoordinateDivisor& x, const Rational& eta, int nu);

struct ProductsReport {
  std::size_t samples = 0;
  std::size_t rejected = 0;             // outside W
  bool all_exact_zero = true;           // exact products over J vanish
  double max_abs_product_float = 0.0;   // float evaluation
  std::vector<std::string> diagnostics;
};

ProductsReport retraction_products(const WeakRetraction& rho, std::span<const Point> samples);

struct DisplacementReport {
  std::size_t samples = 0;
  double max_displacement = 0.0;
  double bound = 0.0;  // |J| eta / 2
  std::vector<std::size_t> histogram;  // 10 bins over [0, bound]
  bool ok() const { return max_displacement <= bound; }
};

/// Grid of X intersected with the box (default [-1,1]^d), per_axis points per coordinate.
DisplacementReport displacement_on_divisor(const WeakRetraction& rho, int per_axis = 21);

/// Lattice points of the box lying in W (rational), about per_axis^d points filtered.
std::vector<Point> domain_samples(const WeakRetraction& rho, int per_axis = 21);

struct SquashSeam {
  std::size_t coordinate = 0;
  Rational position;  // eta/3 or eta/2
  int measured_order = -1;
  std::optional<int> first_failing;
};

/// Smoothness of rho along each coordinate axis at |x_j| in {eta/3, eta/2},
/// orders up to nu_max.
std::vector<SquashSeam> squash_seams(const WeakRetraction& rho, int nu_max);

}  // namespace polysmooth
