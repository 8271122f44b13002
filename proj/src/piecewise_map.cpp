#include "polysmooth/piecewise_map.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "polysmooth/errors.hpp"

namespace polysmooth {

Polynomial::Polynomial(std::size_t variables, std::vector<Term> terms)
    : variables_(variables), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.exponents.size() != variables_)
      throw Error(ErrorCode::DimensionMismatch, "monomial exponent count differs from variable count");
    for (int e : t.exponents)
      if (e < 0) throw Error(ErrorCode::RangeError, "negative exponent");
  }
  normalize();
}

Polynomial Polynomial::constant(std::size_t variables, const Rational& c) {
  return Polynomial(variables, {{std::vector<int>(variables, 0), c}});
}

Polynomial Polynomial::affine(std::span<const Rational> a, const Rational& b) {
  std::vector<Term> terms{{std::vector<int>(a.size(), 0), b}};
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<int> e(a.size(), 0);
    e[i] = 1;
    terms.push_back({e, a[i]});
  }
  return Polynomial(a.size(), std::move(terms));
}

void Polynomial::normalize() {
  std::map<std::vector<int>, Rational> acc;
  for (auto& t : terms_) acc[t.exponents] += t.coefficient;
  terms_.clear();
  for (auto& [e, c] : acc)
    if (sgn(c) != 0) terms_.push_back({e, c});
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    d = std::max(d, s);
  }
  return d;
}

Rational Polynomial::operator()(const Point& x) const {
  if (x.size() != variables_) throw Error(ErrorCode::DimensionMismatch, "polynomial argument has wrong dimension");
  Rational acc = 0;
  for (const auto& t : terms_) {
    Rational m = t.coefficient;
    for (std::size_t i = 0; i < variables_; ++i)
      for (int k = 0; k < t.exponents[i]; ++k) m *= x[i];
    acc += m;
  }
  return acc;
}

double Polynomial::operator()(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : terms_) {
    double m = t.coefficient.get_d();
    for (std::size_t i = 0; i < variables_; ++i)
      if (t.exponents[i] > 0) m *= std::pow(x[i], t.exponents[i]);
    acc += m;
  }
  return acc;
}

Polynomial Polynomial::derivative(std::size_t variable) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (t.exponents[variable] == 0) continue;
    Term d = t;
    d.coefficient *= t.exponents[variable];
    d.exponents[variable] -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(variables_, std::move(out));
}

namespace {

void compositions(int total, std::size_t parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= total; ++a) {
    cur.push_back(a);
    compositions(total - a, parts, cur, out);
    cur.pop_back();
  }
}

// Rational upper bound on the operator norm of the affine piece through the
// given vertex images, restricted to the simplex's affine hull.
Rational affine_piece_norm(const std::vector<Point>& verts, const std::vector<Point>& images) {
  const std::size_t d = verts.size() - 1;
  if (d == 0) return 0;
  const std::size_t p = verts[0].size(), q = images[0].size();
  RationalMatrix g(d, d), m(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      Rational ge = 0, me = 0;
      for (std::size_t i = 0; i < p; ++i) ge += (verts[a + 1][i] - verts[0][i]) * (verts[b + 1][i] - verts[0][i]);
      for (std::size_t i = 0; i < q; ++i) me += (images[a + 1][i] - images[0][i]) * (images[b + 1][i] - images[0][i]);
      g(a, b) = ge;
      m(a, b) = me;
    }
  Eigen::MatrixXd gf(d, d), mf(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      gf(a, b) = g(a, b).get_d();
      mf(a, b) = m(a, b).get_d();
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(mf, gf);
  double lam = solver.eigenvalues().maxCoeff();
  if (!std::isfinite(lam) || lam < 0) lam = 0;
  Rational l2 = from_double(lam * (1 + 1e-9) + 1e-300);
  // tighten to a short dyadic above, then certify L^2 G - M is PSD
  for (int attempt = 0; attempt < 200; ++attempt) {
    RationalMatrix c(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) c(a, b) = l2 * g(a, b) - m(a, b);
    if (is_positive_semidefinite(c)) return sqrt_upper(l2);
    l2 = sgn(l2) == 0 ? Rational(1, 1 << 20) : Rational(l2 * 2);
  }
  throw Error(ErrorCode::EvaluationFailure, "could not certify a Lipschitz bound");
}

// Bound on |d/dx_i P| over the box with |x_k| <= r_k.
Rational derivative_bound(const Polynomial& p, std::size_t i, const std::vector<Rational>& r) {
  Rational acc = 0;
  for (const auto& t : p.terms()) {
    if (t.exponents[i] == 0) continue;
    Rational m = abs(t.coefficient) * t.exponents[i];
    for (std::size_t k = 0; k < r.size(); ++k) {
      int e = t.exponents[k] - (k == i ? 1 : 0);
      for (int j = 0; j < e; ++j) m *= r[k];
    }
    acc += m;
  }
  return acc;
}

}  // namespace

bool pieces_agree_on_faces(const SimplicialComplex& k, const std::vector<std::vector<Polynomial>>& pieces) {
  const auto& maxi = k.maximal_simplices();
  for (std::size_t a = 0; a < maxi.size(); ++a)
    for (std::size_t b = a + 1; b < maxi.size(); ++b) {
      const auto& sa = k.simplex(maxi[a]).ids();
      const auto& sb = k.simplex(maxi[b]).ids();
      std::vector<VertexId> common;
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
      if (common.empty()) continue;
      int deg = 1;
      for (const auto& pc : pieces[a]) deg = std::max(deg, pc.degree());
      for (const auto& pc : pieces[b]) deg = std::max(deg, pc.degree());
      std::vector<std::vector<int>> lattice;
      std::vector<int> cur;
      compositions(deg, common.size(), cur, lattice);
      for (const auto& comp : lattice) {
        Point x(k.ambient_dim());
        for (std::size_t j = 0; j < common.size(); ++j)
          for (std::size_t i = 0; i < x.size(); ++i) x[i] += Rational(comp[j], deg) * k.vertex(common[j])[i];
        for (std::size_t c = 0; c < pieces[a].size(); ++c)
          if (pieces[a][c](x) != pieces[b][c](x)) return false;
      }
    }
  return true;
}

PiecewiseMap PiecewiseMap::from_pl(PLMap g) {
  PiecewiseMap m;
  m.kind_ = Kind::PL;
  m.source_ = g.source();
  m.target_dim_ = g.target_dim();
  m.pl_ = std::move(g);
  return m;
}

PiecewiseMap PiecewiseMap::polynomial(ComplexPtr k, std::vector<std::vector<Polynomial>> pieces, int declared_class) {
  if (pieces.size() != k->maximal_simplices().size())
    throw Error(ErrorCode::DimensionMismatch, "one piece per maximal simplex is required");
  const std::size_t q = pieces.empty() ? 0 : pieces.front().size();
  for (const auto& pc : pieces) {
    if (pc.size() != q || q == 0) throw Error(ErrorCode::DimensionMismatch, "pieces have differing target dimension");
    for (const auto& poly : pc)
      if (poly.variables() != k->ambient_dim())
        throw Error(ErrorCode::DimensionMismatch, "piece variables differ from the ambient dimension");
  }
  if (!pieces_agree_on_faces(*k, pieces))
    throw Error(ErrorCode::BadGluing, "polynomial pieces disagree on a shared face");
  PiecewiseMap m;
  m.kind_ = Kind::Polynomial;
  m.source_ = std::move(k);
  m.target_dim_ = q;
  m.declared_class_ = declared_class;
  m.pieces_ = std::move(pieces);
  return m;
}

PiecewiseMap PiecewiseMap::opaque(ComplexPtr k, std::size_t target_dim, FloatEval evaluator, Modulus modulus,
                                  std::optional<Rational> lipschitz) {
  PiecewiseMap m;
  m.kind_ = Kind::Opaque;
  m.source_ = std::move(k);
  m.target_dim_ = target_dim;
  m.opaque_ = std::move(evaluator);
  m.modulus_ = std::move(modulus);
  m.lipschitz_ = std::move(lipschitz);
  return m;
}

Point PiecewiseMap::operator()(const Point& x) const {
  switch (kind_) {
    case Kind::PL: return (*pl_)(x);
    case Kind::Polynomial: {
      BarycentricCoords bc = locate(*source_, x);
      const auto& maxi = source_->maximal_simplices();
      for (std::size_t m = 0; m < maxi.size(); ++m)
        if (bc.simplex.is_face_of(source_->simplex(maxi[m]))) {
          Point out;
          for (const auto& poly : pieces_[m]) out.push_back(poly(x));
          return out;
        }
      throw Error(ErrorCode::NotInComplex, "point " + to_string(x) + " is not in |K|");
    }
    case Kind::Opaque: break;
  }
  throw Error(ErrorCode::EvaluationFailure, "opaque maps have no exact evaluation");
}

std::vector<double> PiecewiseMap::on_piece(std::size_t maximal_index, std::span<const double> x) const {
  std::vector<double> out(target_dim_, 0.0);
  switch (kind_) {
    case Kind::PL: {
      AffineFrame::ProjectionF pr;
      source_->maximal_frame(maximal_index).project(x, pr);
      const Simplex& s = source_->simplex(source_->maximal_simplices()[maximal_index]);
      const Point& first = pl_->images()[s.ids().front()];
      if (std::all_of(s.ids().begin(), s.ids().end(), [&](VertexId v) { return pl_->images()[v] == first; }))
        return to_doubles(first);
      for (std::size_t j = 0; j < s.size(); ++j) {
        const Point& im = pl_->images()[s.ids()[j]];
        for (std::size_t i = 0; i < target_dim_; ++i) out[i] += pr.weights[j] * im[i].get_d();
      }
      return out;
    }
    case Kind::Polynomial:
      for (std::size_t i = 0; i < target_dim_; ++i) out[i] = pieces_[maximal_index][i](x);
      return out;
    case Kind::Opaque: return opaque_(x);
  }
  return out;
}

std::vector<double> PiecewiseMap::operator()(std::span<const double> x) const {
  if (kind_ == Kind::Opaque) return opaque_(x);
  auto loc = locate_f(*source_, x, 1e-9);
  if (!loc) throw Error(ErrorCode::NotInComplex, "point is not in |K|");
  const auto& maxi = source_->maximal_simplices();
  std::size_t m = static_cast<std::size_t>(std::find(maxi.begin(), maxi.end(), loc->simplex_index) - maxi.begin());
  return on_piece(m, x);
}

std::optional<Rational> PiecewiseMap::lipschitz_bound() const {
  if (lipschitz_) return lipschitz_;
  const auto& k = *source_;
  Rational best = 0;
  switch (kind_) {
    case Kind::PL:
      for (std::size_t si : k.maximal_simplices()) {
        const Simplex& s = k.simplex(si);
        std::vector<Point> images;
        for (VertexId v : s.ids()) images.push_back(pl_->images()[v]);
        if (std::all_of(images.begin(), images.end(), [&](const Point& p) { return p == images.front(); })) continue;
        best = max(best, affine_piece_norm(k.points_of(s), images));
      }
      return best;
    case Kind::Polynomial:
      for (std::size_t m = 0; m < k.maximal_simplices().size(); ++m) {
        auto pts = k.points_of(k.simplex(k.maximal_simplices()[m]));
        std::vector<Rational> r(k.ambient_dim(), Rational(0));
        for (const auto& v : pts)
          for (std::size_t i = 0; i < r.size(); ++i) r[i] = max(r[i], abs(v[i]));
        Rational frob = 0;
        for (const auto& poly : pieces_[m])
          for (std::size_t i = 0; i < r.size(); ++i) {
            Rational b = derivative_bound(poly, i, r);
            frob += b * b;
          }
        best = max(best, sqrt_upper(frob));
      }
      return best;
    case Kind::Opaque: break;
  }
  return std::nullopt;
}

bool PiecewiseMap::has_modulus() const { return static_cast<bool>(modulus_) || lipschitz_bound().has_value(); }

double PiecewiseMap::continuity_radius(double eta) const {
  if (!(eta > 0)) throw Error(ErrorCode::RangeError, "eta must be positive");
  if (modulus_) {
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (modulus_(hi) < eta && guard++ < 60) {
      lo = hi;
      hi *= 2;
    }
    if (guard > 60) return lo;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      if (modulus_(mid) < eta)
        lo = mid;
      else
        hi = mid;
    }
    if (!(lo > 0)) throw Error(ErrorCode::ModulusUnavailable, "modulus never drops below eta");
    return lo;
  }
  auto lip = lipschitz_bound();
  if (!lip) throw Error(ErrorCode::ModulusUnavailable, "map has neither a modulus nor a Lipschitz constant");
  if (sgn(*lip) == 0) return INFINITY;
  return eta / lip->get_d();
}

}  // namespace polysmooth
