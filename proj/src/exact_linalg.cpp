#include "polysmooth/exact_linalg.hpp"

#include "polysmooth/errors.hpp"

namespace polysmooth {

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& other) const {
  RationalMatrix out(rows_, other.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(r, k);
      if (sgn(a) == 0) continue;
      for (std::size_t c = 0; c < other.cols_; ++c) out(r, c) += a * other(k, c);
    }
  return out;
}

std::vector<Rational> RationalMatrix::operator*(std::span<const Rational> v) const {
  std::vector<Rational> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
  return out;
}

namespace {

// Forward elimination in place; returns the rank and accumulates the
// determinant sign/product for square inputs.
std::size_t eliminate(RationalMatrix& a, Rational* det) {
  std::size_t row = 0;
  if (det) *det = 1;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < a.rows() && sgn(a(pivot, col)) == 0) ++pivot;
    if (pivot == a.rows()) {
      if (det) *det = 0;
      continue;
    }
    if (pivot != row) {
      for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(pivot, c), a(row, c));
      if (det) *det = -*det;
    }
    if (det) *det *= a(row, col);
    for (std::size_t r = row + 1; r < a.rows(); ++r) {
      if (sgn(a(r, col)) == 0) continue;
      Rational f = a(r, col) / a(row, col);
      for (std::size_t c = col; c < a.cols(); ++c) a(r, c) -= f * a(row, c);
    }
    ++row;
  }
  return row;
}

}  // namespace

std::size_t rank(RationalMatrix a) { return eliminate(a, nullptr); }

Rational determinant(RationalMatrix a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  if (a.rows() == 0) return 1;
  Rational det;
  std::size_t r = eliminate(a, &det);
  return r == a.rows() ? det : Rational(0);
}

std::optional<std::vector<Rational>> solve(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a(pivot, col)) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a(r, col)) == 0) continue;
      Rational f = a(r, col) / a(col, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a(i, i);
  return b;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
  const std::size_t n = a.rows();
  RationalMatrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Rational> e(n);
    e[c] = 1;
    auto col = solve(a, e);
    if (!col) return std::nullopt;
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = (*col)[r];
  }
  return inv;
}

bool is_positive_semidefinite(const RationalMatrix& a) {
  const std::size_t n = a.rows();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    RationalMatrix minor(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c) minor(r, c) = a(idx[r], idx[c]);
    if (sgn(determinant(minor)) < 0) return false;
  }
  return true;
}

AffineFrame::AffineFrame(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw Error(ErrorCode::EmptyComplex, "frame of an empty vertex list");
  const std::size_t p = vertices_.front().size();
  const std::size_t e = vertices_.size() - 1;
  for (const auto& v : vertices_)
    if (v.size() != p) throw Error(ErrorCode::DimensionMismatch, "vertices of mixed dimension");
  if (p > kMaxAmbientDim) throw Error(ErrorCode::RangeError, "ambient dimension above 8 is not supported");
  edges_ = RationalMatrix(p, e);
  for (std::size_t j = 0; j < e; ++j)
    for (std::size_t i = 0; i < p; ++i) edges_(i, j) = vertices_[j + 1][i] - vertices_[0][i];
  if (e > 0) {
    RationalMatrix et = edges_.transpose();
    auto gram_inv = inverse(et * edges_);
    if (!gram_inv) throw Error(ErrorCode::AffineDependence, "affinely dependent vertices");
    pseudo_ = *gram_inv * et;
  } else {
    pseudo_ = RationalMatrix(0, p);
  }
  origin_f_ = to_doubles(vertices_[0]);
  pseudo_f_.resize(e * p);
  edges_f_.resize(p * e);
  for (std::size_t r = 0; r < e; ++r)
    for (std::size_t c = 0; c < p; ++c) pseudo_f_[r * p + c] = pseudo_(r, c).get_d();
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < e; ++c) edges_f_[r * e + c] = edges_(r, c).get_d();
}

AffineFrame::Projection AffineFrame::project(const Point& x) const {
  const std::size_t p = ambient_dim();
  const std::size_t e = dim();
  Point rel = x - vertices_[0];
  std::vector<Rational> mu = pseudo_ * std::span<const Rational>(rel);
  Projection out;
  out.weights.resize(e + 1);
  Rational rest = 1;
  for (std::size_t j = 0; j < e; ++j) {
    out.weights[j + 1] = mu[j];
    rest -= mu[j];
  }
  out.weights[0] = rest;
  out.foot = vertices_[0];
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < e; ++j) out.foot[i] += edges_(i, j) * mu[j];
  out.normal_sq = squared_distance(x, out.foot);
  return out;
}

std::optional<std::vector<Rational>> AffineFrame::coordinates(const Point& x) const {
  Projection pr = project(x);
  if (sgn(pr.normal_sq) != 0) return std::nullopt;
  return pr.weights;
}

Point AffineFrame::point_at(std::span<const Rational> weights) const {
  Point out(ambient_dim());
  for (std::size_t k = 0; k < vertices_.size(); ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[k] * vertices_[k][i];
  return out;
}

void AffineFrame::project(std::span<const double> x, ProjectionF& out) const {
  const std::size_t p = ambient_dim();
  const std::size_t e = dim();
  double rel[kMaxAmbientDim];
  for (std::size_t i = 0; i < p; ++i) rel[i] = x[i] - origin_f_[i];
  out.weights.assign(e + 1, 0.0);
  double mu[kMaxAmbientDim];
  double rest = 1.0;
  for (std::size_t r = 0; r < e; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < p; ++c) acc += pseudo_f_[r * p + c] * rel[c];
    mu[r] = acc;
    out.weights[r + 1] = acc;
    rest -= acc;
  }
  out.weights[0] = rest;
  double nsq = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double foot = 0.0;
    for (std::size_t j = 0; j < e; ++j) foot += edges_f_[i * e + j] * mu[j];
    double d = rel[i] - foot;
    nsq += d * d;
  }
  out.normal_sq = nsq;
}

}  // namespace polysmooth
