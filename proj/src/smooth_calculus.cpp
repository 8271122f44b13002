#include "polysmooth/smooth_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polysmooth/errors.hpp"

namespace polysmooth {

namespace {

Rational binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(r);
}

double horner(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

}  // namespace

SmoothstepProfile::SmoothstepProfile(int nu) : nu_(nu) {
  if (nu < 1) throw Error(ErrorCode::RangeError, "smoothstep order must be at least 1");
  coeffs_.assign(2 * nu + 2, Rational(0));
  for (int n = 0; n <= nu; ++n) {
    Rational c = binomial(nu + n, n) * binomial(2 * nu + 1, nu - n);
    coeffs_[nu + 1 + n] = (n % 2 == 0) ? c : Rational(-c);
  }
  for (const auto& c : coeffs_) coeffs_f_.push_back(c.get_d());
}

Rational SmoothstepProfile::value(const Rational& u) const {
  if (sgn(u) <= 0) return 0;
  if (u >= 1) return 1;
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double SmoothstepProfile::operator()(double u) const {
  if (!(u > 0.0)) return 0.0;
  if (u >= 1.0) return 1.0;
  return std::clamp(horner(coeffs_f_, u), 0.0, 1.0);
}

double SmoothstepProfile::derivative(double u, int k) const {
  if (k == 0) return (*this)(u);
  if (!(u > 0.0) || u >= 1.0) return 0.0;
  std::vector<double> c = coeffs_f_;
  for (int d = 0; d < k; ++d) {
    if (c.size() <= 1) return 0.0;
    std::vector<double> next(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) next[i - 1] = c[i] * static_cast<double>(i);
    c = std::move(next);
  }
  return horner(c, u);
}

SmoothstepProfile smoothstep(int nu) { return SmoothstepProfile(nu); }

BumpFunction::BumpFunction(const CoverElement& element, std::shared_ptr<const SmoothstepProfile> profile)
    : element_(&element), profile_(std::move(profile)) {
  const double r = element.radius().get_d();
  inv_r2_ = 1.0 / (r * r);
  if (element.kind() == CoverElement::Kind::Tube)
    inv_c_ = static_cast<double>(element.simplex().size()) / element.epsilon().get_d();
}

double BumpFunction::eval(std::span<const double> x, AffineFrame::ProjectionF& scratch) const {
  const auto& lo = element_->bounds_lo();
  const auto& hi = element_->bounds_hi();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return 0.0;
  element_->frame().project(x, scratch);
  const SmoothstepProfile& p = *profile_;
  double value = 1.0 - p(3.0 * (scratch.normal_sq * inv_r2_ - 1.0 / 9.0));
  if (value == 0.0 || element_->kind() == CoverElement::Kind::Ball) return value;
  for (double w : scratch.weights) {
    value *= p(3.0 * (w * inv_c_ - 4.0 / 3.0));
    if (value == 0.0) return 0.0;
  }
  return value;
}

double BumpFunction::operator()(std::span<const double> x) const {
  AffineFrame::ProjectionF scratch;
  return eval(x, scratch);
}

double BumpFunction::value(const Point& x) const {
  if (!element_->in_core(x)) return 0.0;
  auto xf = to_doubles(x);
  double v = (*this)(xf);
  // inside the core the exact value is positive
  return v > 0.0 ? v : std::numeric_limits<double>::min();
}

PartitionOfUnity::PartitionOfUnity(std::shared_ptr<const SkeletonCover> cover, int nu)
    : cover_(std::move(cover)), profile_(std::make_shared<SmoothstepProfile>(nu)) {
  bumps_.reserve(cover_->elements.size());
  for (const auto& e : cover_->elements) bumps_.emplace_back(e, profile_);
  if (bumps_.empty()) return;

  const std::size_t p = cover_->complex->ambient_dim();
  grid_dims_ = std::min<std::size_t>(p, 3);
  if (grid_dims_ == 0) {
    buckets_.assign(1, {});
    for (std::size_t i = 0; i < bumps_.size(); ++i) buckets_[0].push_back(i);
    return;
  }
  grid_lo_.assign(grid_dims_, INFINITY);
  std::vector<double> grid_hi(grid_dims_, -INFINITY);
  for (const auto& e : cover_->elements)
    for (std::size_t d = 0; d < grid_dims_; ++d) {
      grid_lo_[d] = std::min(grid_lo_[d], e.bounds_lo()[d]);
      grid_hi[d] = std::max(grid_hi[d], e.bounds_hi()[d]);
    }
  const double target = std::pow(static_cast<double>(bumps_.size()), 1.0 / static_cast<double>(grid_dims_));
  const std::size_t per_dim = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(2.0 * target)), 1, 256);
  grid_n_.assign(grid_dims_, per_dim);
  grid_step_.resize(grid_dims_);
  std::size_t total = 1;
  for (std::size_t d = 0; d < grid_dims_; ++d) {
    grid_step_[d] = std::max((grid_hi[d] - grid_lo_[d]) / static_cast<double>(per_dim), 1e-300);
    total *= per_dim;
  }
  buckets_.assign(total, {});
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    const auto& e = cover_->elements[i];
    std::vector<std::size_t> a(grid_dims_), b(grid_dims_);
    for (std::size_t d = 0; d < grid_dims_; ++d) {
      auto cell = [&](double v) {
        double t = std::floor((v - grid_lo_[d]) / grid_step_[d]);
        return static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(grid_n_[d] - 1)));
      };
      a[d] = cell(e.bounds_lo()[d]);
      b[d] = cell(e.bounds_hi()[d]);
    }
    std::vector<std::size_t> idx = a;
    while (true) {
      std::size_t flat = 0;
      for (std::size_t d = 0; d < grid_dims_; ++d) flat = flat * grid_n_[d] + idx[d];
      buckets_[flat].push_back(i);
      std::size_t d = 0;
      while (d < grid_dims_ && idx[d] == b[d]) {
        idx[d] = a[d];
        ++d;
      }
      if (d == grid_dims_) break;
      ++idx[d];
    }
  }
}

std::vector<std::size_t> PartitionOfUnity::candidates(std::span<const double> x) const {
  std::vector<std::size_t> out;
  if (buckets_.empty()) return out;
  std::size_t flat = 0;
  for (std::size_t d = 0; d < grid_dims_; ++d) {
    double t = std::floor((x[d] - grid_lo_[d]) / grid_step_[d]);
    if (!(t >= 0.0) || t >= static_cast<double>(grid_n_[d])) {
      // on the upper boundary the last cell applies
      if (t == static_cast<double>(grid_n_[d]) && x[d] <= grid_lo_[d] + grid_step_[d] * static_cast<double>(grid_n_[d]) * (1 + 1e-12))
        t = static_cast<double>(grid_n_[d] - 1);
      else
        return out;
    }
    flat = flat * grid_n_[d] + static_cast<std::size_t>(t);
  }
  for (std::size_t i : buckets_[flat]) {
    const auto& e = cover_->elements[i];
    bool inside = true;
    for (std::size_t d = 0; d < x.size() && inside; ++d)
      inside = x[d] >= e.bounds_lo()[d] && x[d] <= e.bounds_hi()[d];
    if (inside) out.push_back(i);
  }
  return out;
}

PartitionOfUnity::Weights PartitionOfUnity::evaluate(std::span<const double> x) const {
  Weights out;
  double total = 0.0;
  AffineFrame::ProjectionF scratch;
  for (std::size_t i : candidates(x)) {
    double v = bumps_[i].eval(x, scratch);
    if (v > 0.0) {
      out.emplace_back(i, v);
      total += v;
    }
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroDenominator, "no bump is positive at the evaluation point");
  for (auto& w : out) w.second /= total;
  return out;
}

PartitionOfUnity::Weights PartitionOfUnity::evaluate(const Point& x) const {
  auto xf = to_doubles(x);
  Weights out;
  double total = 0.0;
  for (std::size_t i : candidates(xf)) {
    double v = bumps_[i].value(x);
    if (v > 0.0) {
      out.emplace_back(i, v);
      total += v;
    }
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroDenominator, "no bump is positive at " + to_string(x));
  for (auto& w : out) w.second /= total;
  return out;
}

namespace {

double diff_quotient(const std::function<double(double)>& g, int k, double h, int side, double& gmax) {
  // sum_j (-1)^(k-j) C(k,j) g(side (j+1) h) / (side h)^k
  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    double v = g(side * (j + 1) * h);
    if (!std::isfinite(v)) throw Error(ErrorCode::EvaluationFailure, "non-finite value during smoothness check");
    gmax = std::max(gmax, std::abs(v));
    acc += (((k - j) % 2 == 0) ? 1.0 : -1.0) * binom * v;
    binom = binom * (k - j) / (j + 1);
  }
  return acc / std::pow(side * h, k);
}

}  // namespace

SmoothnessReport smoothness_order(const std::function<double(double)>& g, int nu_max,
                                  const SmoothnessOptions& options) {
  SmoothnessReport report;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int k = 0; k <= nu_max; ++k) {
    double worst = 0.0, worst_tol = 0.0, worst_ratio = -1.0;
    bool ok = true;
    for (double h : options.ladder) {
      double gmax = 0.0;
      double dp = diff_quotient(g, k, h, +1, gmax);
      double dm = diff_quotient(g, k, h, -1, gmax);
      double sp = diff_quotient(g, k + 1, h, +1, gmax);
      double sm = diff_quotient(g, k + 1, h, -1, gmax);
      double scale = std::max(std::abs(sp), std::abs(sm));
      double roundoff = 8.0 * std::pow(2.0, k + 1) * eps * std::max(gmax, 1e-300) / std::pow(h, k) +
                        16.0 * std::pow(2.0, k + 2) * eps * std::max(gmax, 1e-300) / std::pow(h, k + 1) * h;
      double tol = options.factor * (k + 2) * h * scale + roundoff;
      double mis = std::abs(dp - dm);
      double ratio = mis / std::max(tol, 1e-300);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = mis;
        worst_tol = tol;
      }
      if (mis > tol) ok = false;
    }
    report.mismatch.push_back(worst);
    report.tolerance.push_back(worst_tol);
    if (!ok) {
      report.first_failing = k;
      break;
    }
    report.measured_order = k;
  }
  return report;
}

SmoothnessReport smoothness_order(const std::function<std::vector<double>(std::span<const double>)>& f,
                                  std::span<const double> seam_point, std::span<const double> direction,
                                  int nu_max, const SmoothnessOptions& options) {
  std::vector<double> x0(seam_point.begin(), seam_point.end());
  std::vector<double> dir(direction.begin(), direction.end());
  const std::size_t q = f(x0).size();
  SmoothnessReport worst;
  worst.measured_order = nu_max;
  bool first = true;
  for (std::size_t c = 0; c < q; ++c) {
    auto g = [&](double t) {
      std::vector<double> x(x0.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0[i] + t * dir[i];
      auto y = f(x);
      if (y.size() != q) throw Error(ErrorCode::EvaluationFailure, "evaluator changed output dimension");
      return y[c];
    };
    auto r = smoothness_order(g, nu_max, options);
    if (first || r.measured_order < worst.measured_order) {
      worst = r;
      first = false;
    }
  }
  return worst;
}

}  // namespace polysmooth
