#include "polysmooth/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "polysmooth/errors.hpp"

namespace polysmooth {

CoordinateDivisor CoordinateDivisor::make(std::size_t dim, std::vector<std::size_t> components,
                                          std::optional<std::pair<Point, Point>> box) {
  if (dim == 0) throw Error(ErrorCode::RangeError, "divisor ambient dimension must be positive");
  std::sort(components.begin(), components.end());
  components.erase(std::unique(components.begin(), components.end()), components.end());
  if (components.empty()) throw Error(ErrorCode::RangeError, "divisor needs at least one component");
  if (components.back() >= dim) throw Error(ErrorCode::RangeError, "component index exceeds the dimension");
  if (box) {
    if (box->first.size() != dim || box->second.size() != dim)
      throw Error(ErrorCode::DimensionMismatch, "box dimension differs from the divisor dimension");
    for (std::size_t i = 0; i < dim; ++i)
      if (box->first[i] > box->second[i]) throw Error(ErrorCode::RangeError, "box has lo > hi");
  }
  return CoordinateDivisor{dim, std::move(components), std::move(box)};
}

bool CoordinateDivisor::contains(const Point& x) const {
  return std::any_of(components.begin(), components.end(), [&](std::size_t j) { return sgn(x[j]) == 0; });
}

bool Stratum::contains(const Point& x) const {
  return std::all_of(indices.begin(), indices.end(), [&](std::size_t i) { return sgn(x[i]) == 0; });
}

std::vector<Stratum> sing_stratification(const CoordinateDivisor& x, int level) {
  std::vector<Stratum> out;
  if (level < 0) return out;
  const std::size_t size = static_cast<std::size_t>(level) + 1;
  const std::size_t n = x.components.size();
  if (size > n) return out;
  std::vector<std::size_t> pick(size);
  for (std::size_t i = 0; i < size; ++i) pick[i] = i;
  while (true) {
    Stratum s{level, {}};
    for (std::size_t i : pick) s.indices.push_back(x.components[i]);
    out.push_back(std::move(s));
    std::size_t i = size;
    while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < size; ++k) pick[k] = pick[k - 1] + 1;
  }
  return out;
}

Point CompatibleRetraction::operator()(const Point& x) const {
  Point y = x;
  for (std::size_t i : z_.indices) y[i] = 0;
  return y;
}

std::vector<double> CompatibleRetraction::operator()(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i : z_.indices) y[i] = 0.0;
  return y;
}

CompatibleRetraction compatible_retraction(const Stratum& z, const CoordinateDivisor& x) {
  if (z.indices.empty()) throw Error(ErrorCode::RangeError, "empty stratum index set");
  for (std::size_t i : z.indices)
    if (!std::binary_search(x.components.begin(), x.components.end(), i))
      throw Error(ErrorCode::RangeError, "stratum index is not a component of the divisor");
  return CompatibleRetraction(z);
}

CollarSquash::CollarSquash(std::size_t coordinate, Rational eta, int nu)
    : j_(coordinate), eta_(std::move(eta)), profile_(std::make_shared<SmoothstepProfile>(nu)) {
  if (sgn(eta_) <= 0) throw Error(ErrorCode::RangeError, "collar width must be positive");
  eta_f_ = eta_.get_d();
}

Rational CollarSquash::factor(const Rational& t) const {
  Rational u = (abs(t) / eta_ - Rational(1, 3)) * 6;
  return profile_->value(u);
}

double CollarSquash::factor(double t) const { return (*profile_)((std::abs(t) / eta_f_ - 1.0 / 3.0) * 6.0); }

Point CollarSquash::operator()(const Point& x) const {
  Point y = x;
  y[j_] = factor(x[j_]) * x[j_];
  return y;
}

std::vector<double> CollarSquash::operator()(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  y[j_] = factor(x[j_]) * x[j_];
  return y;
}

bool CollarSquash::in_plateau(const Point& x) const { return abs(x[j_]) * 3 < eta_; }

CollarSquash collar_squash(std::size_t coordinate, const Rational& eta, int nu) {
  return CollarSquash(coordinate, eta, nu);
}

WeakRetraction::WeakRetraction(CoordinateDivisor divisor, Rational eta, int nu)
    : divisor_(std::move(divisor)), eta_(std::move(eta)), nu_(nu) {
  for (std::size_t j : divisor_.components) squashes_.emplace_back(j, eta_, nu);
}

Point WeakRetraction::operator()(const Point& x) const {
  if (x.size() != divisor_.dim) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from the divisor");
  Point y = x;
  for (auto it = squashes_.rbegin(); it != squashes_.rend(); ++it) y = (*it)(y);
  return y;
}

std::vector<double> WeakRetraction::operator()(std::span<const double> x) const {
  if (x.size() != divisor_.dim) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from the divisor");
  std::vector<double> y(x.begin(), x.end());
  for (auto it = squashes_.rbegin(); it != squashes_.rend(); ++it) y = (*it)(y);
  return y;
}

std::optional<std::size_t> WeakRetraction::domain_witness(const Point& x) const {
  for (const auto& s : squashes_)
    if (s.in_plateau(x)) return s.coordinate();
  return std::nullopt;
}

bool WeakRetraction::in_domain(const Point& x) const { return domain_witness(x).has_value(); }

WeakRetraction weak_retraction(const CoordinateDivisor& x, const Rational& eta, int nu) {
  if (sgn(eta) <= 0) throw Error(ErrorCode::RangeError, "eta must be positive");
  if (nu < 1) throw Error(ErrorCode::RangeError, "nu must be at least 1");
  return WeakRetraction(x, eta, nu);
}

ProductsReport retraction_products(const WeakRetraction& rho, std::span<const Point> samples) {
  ProductsReport r;
  for (const auto& x : samples) {
    ++r.samples;
    if (!rho.in_domain(x)) {
      ++r.rejected;
      if (r.diagnostics.size() < 10)
        r.diagnostics.push_back("point " + to_string(x) + " is outside W: every |x_j| >= eta/3");
      continue;
    }
    Point y = rho(x);
    Rational prod = 1;
    for (std::size_t j : rho.divisor().components) prod *= y[j];
    if (sgn(prod) != 0) r.all_exact_zero = false;
    auto yf = rho(std::span<const double>(to_doubles(x)));
    double pf = 1.0;
    for (std::size_t j : rho.divisor().components) pf *= yf[j];
    r.max_abs_product_float = std::max(r.max_abs_product_float, std::abs(pf));
  }
  return r;
}

namespace {

std::pair<Point, Point> box_of(const WeakRetraction& rho) {
  if (rho.divisor().box) return *rho.divisor().box;
  const std::size_t d = rho.divisor().dim;
  return {Point(d, Rational(-1)), Point(d, Rational(1))};
}

void for_each_grid_point(const std::pair<Point, Point>& box, int per_axis, std::vector<bool> fixed_zero,
                         const std::function<void(const Point&)>& fn) {
  const std::size_t d = box.first.size();
  std::vector<int> idx(d, 0);
  const int n = std::max(per_axis, 2);
  while (true) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i)
      x[i] = fixed_zero[i] ? Rational(0) : box.first[i] + (box.second[i] - box.first[i]) * Rational(idx[i], n - 1);
    fn(x);
    std::size_t i = 0;
    while (i < d && (fixed_zero[i] || idx[i] == n - 1)) {
      idx[i] = 0;
      ++i;
    }
    if (i == d) break;
    ++idx[i];
  }
}

}  // namespace

DisplacementReport displacement_on_divisor(const WeakRetraction& rho, int per_axis) {
  DisplacementReport r;
  const std::size_t d = rho.divisor().dim;
  r.bound = static_cast<double>(rho.divisor().components.size()) * rho.eta().get_d() / 2;
  r.histogram.assign(10, 0);
  auto box = box_of(rho);
  for (std::size_t j : rho.divisor().components) {
    if (sgn(box.first[j]) > 0 || sgn(box.second[j]) < 0) continue;
    std::vector<bool> fixed(d, false);
    fixed[j] = true;
    for_each_grid_point(box, per_axis, fixed, [&](const Point& x) {
      Point y = rho(x);
      double disp = std::sqrt(squared_distance(x, y).get_d());
      ++r.samples;
      r.max_displacement = std::max(r.max_displacement, disp);
      std::size_t bin = r.bound > 0 ? std::min<std::size_t>(9, static_cast<std::size_t>(disp / r.bound * 10)) : 0;
      ++r.histogram[bin];
    });
  }
  return r;
}

std::vector<Point> domain_samples(const WeakRetraction& rho, int per_axis) {
  std::vector<Point> out;
  for_each_grid_point(box_of(rho), per_axis, std::vector<bool>(rho.divisor().dim, false), [&](const Point& x) {
    if (rho.in_domain(x)) out.push_back(x);
  });
  return out;
}

std::vector<SquashSeam> squash_seams(const WeakRetraction& rho, int nu_max) {
  std::vector<SquashSeam> out;
  const double eta = rho.eta().get_d();
  for (std::size_t j : rho.divisor().components)
    for (const Rational& frac : {Rational(1, 3), Rational(1, 2)}) {
      SquashSeam s;
      s.coordinate = j;
      s.position = rho.eta() * frac;
      const double t0 = s.position.get_d();
      auto g = [&](double t) {
        std::vector<double> x(rho.divisor().dim, 0.5);
        x[j] = t0 + t * eta;
        return rho(std::span<const double>(x))[j];
      };
      auto rep = smoothness_order(g, nu_max);
      s.measured_order = rep.measured_order;
      s.first_failing = rep.first_failing;
      out.push_back(std::move(s));
    }
  return out;
}

}  // namespace polysmooth
