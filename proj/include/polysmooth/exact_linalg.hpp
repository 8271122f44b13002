#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polysmooth/rational.hpp"

namespace polysmooth {

inline constexpr std::size_t kMaxAmbientDim = 8;

/// Dense row-major matrix over Q.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalMatrix transpose() const;
  RationalMatrix operator*(const RationalMatrix& other) const;
  std::vector<Rational> operator*(std::span<const Rational> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

std::size_t rank(RationalMatrix a);
Rational determinant(RationalMatrix a);
std::optional<RationalMatrix> inverse(const RationalMatrix& a);
/// Solves a square nonsingular system; nullopt when singular.
std::optional<std::vector<Rational>> solve(RationalMatrix a, std::vector<Rational> b);
/// Exact test: every principal minor is nonnegative.
bool is_positive_semidefinite(const RationalMatrix& a);

/// Orthogonal projection onto the affine hull of a simplex together with
/// affine (barycentric) coordinates, in exact and double precision.
class AffineFrame {
 public:
  AffineFrame() = default;
  /// Throws Error(AffineDependence) when the points are affinely dependent.
  explicit AffineFrame(std::vector<Point> vertices);

  std::size_t dim() const { return vertices_.size() - 1; }
  std::size_t ambient_dim() const { return vertices_.front().size(); }
  const std::vector<Point>& vertices() const { return vertices_; }

  struct Projection {
    Point foot;
    std::vector<Rational> weights;  // affine coordinates of foot, sum to 1
    Rational normal_sq;             // |x - foot|^2
  };
  Projection project(const Point& x) const;
  /// Affine coordinates of x when x lies on the affine hull, nullopt otherwise.
  std::optional<std::vector<Rational>> coordinates(const Point& x) const;
  Point point_at(std::span<const Rational> weights) const;

  struct ProjectionF {
    std::vector<double> weights;
    double normal_sq = 0.0;
  };
  void project(std::span<const double> x, ProjectionF& out) const;

 private:
  std::vector<Point> vertices_;
  RationalMatrix pseudo_;  // (E^T E)^{-1} E^T, dim x ambient
  RationalMatrix edges_;   // ambient x dim
  std::vector<double> origin_f_;
  std::vector<double> pseudo_f_;
  std::vector<double> edges_f_;
};

}  // namespace polysmooth
