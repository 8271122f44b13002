#include "polysmooth/cover.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "polysmooth/errors.hpp"
#include "polysmooth/simplex_distance.hpp"

namespace polysmooth {

namespace {

void check_epsilon(const Rational& eps) {
  if (sgn(eps) <= 0 || eps >= 1)
    throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0,1), got " + to_string(eps));
}

// Bounds of the closed U, widened outward.
void element_bounds(const std::vector<Point>& shrunk, const Rational& radius, std::vector<double>& lo,
                    std::vector<double>& hi) {
  const std::size_t p = shrunk.front().size();
  const double r = radius.get_d() * (1.0 + 1e-9) + 1e-300;
  lo.assign(p, INFINITY);
  hi.assign(p, -INFINITY);
  for (const auto& v : shrunk)
    for (std::size_t i = 0; i < p; ++i) {
      double x = v[i].get_d();
      lo[i] = std::min(lo[i], x);
      hi[i] = std::max(hi[i], x);
    }
  for (std::size_t i = 0; i < p; ++i) {
    double pad = r + 1e-12 * (std::abs(lo[i]) + std::abs(hi[i]));
    lo[i] -= pad;
    hi[i] += pad;
  }
}

enum class Tri { No, Yes, Unsure };

}  // namespace

bool ShrunkSimplex::contains_weights(std::span<const Rational> weights) const {
  const Rational c = weight_threshold();
  return std::all_of(weights.begin(), weights.end(), [&](const Rational& w) { return w > c; });
}

ShrunkSimplex shrink(std::vector<Point> vertices, const Simplex& s, const Rational& eps) {
  check_epsilon(eps);
  if (vertices.size() != s.size()) throw Error(ErrorCode::DimensionMismatch, "vertex count does not match simplex");
  Point b = barycenter(vertices);
  ShrunkSimplex out;
  out.base = s;
  out.epsilon = eps;
  const Rational ratio = 1 - eps;
  for (auto& v : vertices) out.closed_vertices.push_back(b + ratio * (v - b));
  return out;
}

ShrunkSimplex shrink(const SimplicialComplex& k, const Simplex& s, const Rational& eps) {
  return shrink(k.points_of(s), s, eps);
}

bool WideningTube::contains(const Point& x) const {
  auto pr = frame.project(x);
  return pr.normal_sq < delta * delta && base.contains_weights(pr.weights);
}

bool WideningTube::closure_contains(const Point& x) const {
  auto pr = frame.project(x);
  if (pr.normal_sq > delta * delta) return false;
  const Rational c = base.weight_threshold();
  return std::all_of(pr.weights.begin(), pr.weights.end(), [&](const Rational& w) { return w >= c; });
}

WideningTube widen(const SimplicialComplex& k, ShrunkSimplex base, const Rational& delta) {
  if (sgn(delta) <= 0) throw Error(ErrorCode::RangeError, "tube radius must be positive");
  WideningTube t;
  t.frame = AffineFrame(k.points_of(base.base));
  t.base = std::move(base);
  t.delta = delta;
  return t;
}

Point retract(const WideningTube& tube, const Point& x) {
  auto pr = tube.frame.project(x);
  if (!(pr.normal_sq < tube.delta * tube.delta && tube.base.contains_weights(pr.weights)))
    throw Error(ErrorCode::OutsideTube, "point " + to_string(x) + " is not in the tube");
  return pr.foot;
}

CoverElement CoverElement::ball(std::size_t simplex_index, Simplex s, Point center, Rational radius) {
  if (sgn(radius) <= 0) throw Error(ErrorCode::RangeError, "ball radius must be positive");
  CoverElement e;
  e.kind_ = Kind::Ball;
  e.simplex_index_ = simplex_index;
  e.simplex_ = std::move(s);
  e.radius_ = std::move(radius);
  e.epsilon_ = 0;
  e.frame_ = AffineFrame({center});
  e.shrunk_ = {std::move(center)};
  element_bounds(e.shrunk_, e.radius_, e.lo_, e.hi_);
  return e;
}

CoverElement CoverElement::tube(std::size_t simplex_index, Simplex s, std::vector<Point> vertices, Rational epsilon,
                                Rational delta) {
  if (sgn(delta) <= 0) throw Error(ErrorCode::RangeError, "tube radius must be positive");
  CoverElement e;
  e.kind_ = Kind::Tube;
  e.simplex_index_ = simplex_index;
  e.simplex_ = s;
  e.radius_ = std::move(delta);
  e.epsilon_ = epsilon;
  e.shrunk_ = shrink(vertices, s, epsilon).closed_vertices;
  e.frame_ = AffineFrame(std::move(vertices));
  element_bounds(e.shrunk_, e.radius_, e.lo_, e.hi_);
  return e;
}

bool CoverElement::in_open(const Point& x) const {
  auto pr = frame_.project(x);
  if (!(pr.normal_sq < radius_ * radius_)) return false;
  if (kind_ == Kind::Ball) return true;
  const Rational c = epsilon_ / Rational(static_cast<long>(simplex_.size()));
  return std::all_of(pr.weights.begin(), pr.weights.end(), [&](const Rational& w) { return w > c; });
}

bool CoverElement::in_closure(const Point& x) const {
  auto pr = frame_.project(x);
  if (pr.normal_sq > radius_ * radius_) return false;
  if (kind_ == Kind::Ball) return true;
  const Rational c = epsilon_ / Rational(static_cast<long>(simplex_.size()));
  return std::all_of(pr.weights.begin(), pr.weights.end(), [&](const Rational& w) { return w >= c; });
}

bool CoverElement::in_core(const Point& x) const {
  auto pr = frame_.project(x);
  if (!(pr.normal_sq * 9 < radius_ * radius_ * 4)) return false;
  if (kind_ == Kind::Ball) return true;
  const Rational c = epsilon_ * 4 / Rational(3 * static_cast<long>(simplex_.size()));
  return std::all_of(pr.weights.begin(), pr.weights.end(), [&](const Rational& w) { return w > c; });
}

Point CoverElement::retract(const Point& x) const {
  if (!in_open(x)) throw Error(ErrorCode::OutsideTube, "point " + to_string(x) + " is outside the cover element");
  if (kind_ == Kind::Ball) return frame_.vertices().front();
  return frame_.project(x).foot;
}

WideningTube CoverElement::as_tube() const {
  if (kind_ != Kind::Tube) throw Error(ErrorCode::RangeError, "vertex elements are balls, not tubes");
  WideningTube t;
  t.base = shrink(frame_.vertices(), simplex_, epsilon_);
  t.delta = radius_;
  t.frame = frame_;
  return t;
}

namespace {

// Float prefilter for core membership; Unsure near the boundary.
Tri core_f(const CoverElement& e, std::span<const double> x, AffineFrame::ProjectionF& scratch) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < e.bounds_lo()[i] || x[i] > e.bounds_hi()[i]) return Tri::No;
  e.frame().project(x, scratch);
  const double r = e.radius().get_d();
  const double lim = 4.0 * r * r / 9.0;
  const double tol = 1e-9;
  Tri result = Tri::Yes;
  if (scratch.normal_sq > lim * (1 + tol) + 1e-300) return Tri::No;
  if (scratch.normal_sq >= lim * (1 - tol)) result = Tri::Unsure;
  if (e.kind() == CoverElement::Kind::Tube) {
    const double c = e.epsilon().get_d() * 4.0 / (3.0 * static_cast<double>(e.simplex().size()));
    for (double w : scratch.weights) {
      if (w < c - tol) return Tri::No;
      if (w <= c + tol) result = Tri::Unsure;
    }
  }
  return result;
}

bool in_core_fast(const CoverElement& e, const Point& x, std::span<const double> xf,
                  AffineFrame::ProjectionF& scratch) {
  switch (core_f(e, xf, scratch)) {
    case Tri::No: return false;
    case Tri::Yes: return true;
    case Tri::Unsure: return e.in_core(x);
  }
  return false;
}

struct Piece {
  std::vector<Point> pts;
  int depth = 0;
};

enum class CoverageStatus { Covered, Uncovered, Exhausted };

struct CoverageOutcome {
  CoverageStatus status = CoverageStatus::Covered;
  Point witness;               // uncovered point, or a piece vertex when exhausted
  std::vector<Point> piece;    // offending subsimplex
  std::size_t pieces = 0;
};

// Certifies that the closed simplex spanned by pts lies in the union of the
// candidates' cores, bisecting longest edges until every piece sits inside a
// single core (cores are convex).
CoverageOutcome certify_coverage(const std::vector<Point>& pts, const std::vector<const CoverElement*>& candidates,
                                 int max_depth, std::size_t max_pieces) {
  CoverageOutcome out;
  std::vector<Piece> stack{{pts, 0}};
  AffineFrame::ProjectionF scratch;
  std::vector<std::vector<double>> pf;
  std::vector<std::vector<char>> member;
  while (!stack.empty()) {
    Piece piece = std::move(stack.back());
    stack.pop_back();
    ++out.pieces;
    const std::size_t n = piece.pts.size();
    pf.resize(n);
    for (std::size_t i = 0; i < n; ++i) pf[i] = to_doubles(piece.pts[i]);
    member.assign(candidates.size(), std::vector<char>(n, 0));
    bool done = false;
    std::vector<char> vertex_covered(n, 0);
    for (std::size_t c = 0; c < candidates.size() && !done; ++c) {
      bool all = true;
      for (std::size_t i = 0; i < n; ++i) {
        bool in = in_core_fast(*candidates[c], piece.pts[i], pf[i], scratch);
        if (in) vertex_covered[i] = 1;
        all = all && in;
      }
      done = all;
    }
    if (done) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (!vertex_covered[i]) {
        out.status = CoverageStatus::Uncovered;
        out.witness = piece.pts[i];
        out.piece = piece.pts;
        return out;
      }
    if (piece.depth >= max_depth || out.pieces >= max_pieces) {
      out.status = CoverageStatus::Exhausted;
      out.witness = piece.pts.front();
      out.piece = piece.pts;
      return out;
    }
    std::size_t bi = 0, bj = 1;
    Rational best = -1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Rational d = squared_distance(piece.pts[i], piece.pts[j]);
        if (d > best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    Point mid = Rational(1, 2) * (piece.pts[bi] + piece.pts[bj]);
    Piece a{piece.pts, piece.depth + 1}, b{std::move(piece.pts), piece.depth + 1};
    a.pts[bj] = mid;
    b.pts[bi] = std::move(mid);
    stack.push_back(std::move(a));
    stack.push_back(std::move(b));
  }
  return out;
}

int depth_cap(const std::vector<Point>& pts, const Rational& min_feature, int extra) {
  Rational diam_sq = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) diam_sq = max(diam_sq, squared_distance(pts[i], pts[j]));
  const int dim = std::max<int>(1, static_cast<int>(pts.size()) - 1);
  double ratio = std::sqrt(diam_sq.get_d()) / std::max(min_feature.get_d(), 1e-300);
  int halvings = ratio > 1 ? static_cast<int>(std::ceil(std::log2(ratio))) : 0;
  return dim * (halvings + extra);
}

// Closed simplices not containing s: for every maximal T, T itself when it
// misses s entirely, else the faces of T that omit some vertex of s. Only the
// maximal such faces are returned.
std::vector<Simplex> faces_missing(const SimplicialComplex& k, const Simplex& s) {
  std::vector<Simplex> out;
  for (std::size_t ti : k.maximal_simplices()) {
    const Simplex& t = k.simplex(ti);
    if (!s.is_face_of(t)) {
      out.push_back(t);
      continue;
    }
    for (VertexId v : s.ids()) {
      std::vector<VertexId> rest;
      for (VertexId w : t.ids())
        if (w != v) rest.push_back(w);
      if (!rest.empty()) out.emplace_back(std::move(rest));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool boxes_overlap(const std::pair<std::vector<double>, std::vector<double>>& a, const std::vector<double>& lo,
                   const std::vector<double>& hi) {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (a.second[i] < lo[i] || hi[i] < a.first[i]) return false;
  return true;
}

}  // namespace

Rational feature_size(const SkeletonCover& cover) {
  Rational m = -1;
  for (const auto& e : cover.elements) {
    Rational r = e.radius();
    if (e.kind() == CoverElement::Kind::Tube) {
      // width of the core inside the simplex scales with eps times the
      // shortest edge
      const auto& v = e.frame().vertices();
      Rational edge = -1;
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
          Rational d = squared_distance(v[i], v[j]);
          if (edge < 0 || d < edge) edge = d;
        }
      Rational w = e.epsilon() / Rational(static_cast<long>(v.size())) * sqrt_lower(edge);
      r = min(r, w);
    }
    if (m < 0 || r < m) m = r;
  }
  return m > 0 ? m : Rational(1);
}

namespace {

std::string describe(const std::vector<Point>& pts) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? ", " : "") << to_string(pts[i]);
  os << "]";
  return os.str();
}

constexpr std::size_t kMaxPieces = 400000;

Rational squared_diameter(const std::vector<Point>& pts) {
  Rational d2 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d2 = max(d2, squared_distance(pts[i], pts[j]));
  return d2;
}

// Upper bound on how far a displacement u moves the affine coordinates of a
// projection onto aff(pts): every coordinate changes by at most kappa |u|.
Rational weight_sensitivity(const std::vector<Point>& pts) {
  const std::size_t k = pts.size() - 1;
  if (k == 0) return Rational(0);
  const std::size_t p = pts.front().size();
  RationalMatrix e(p, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < p; ++i) e(i, j) = pts[j + 1][i] - pts[0][i];
  auto inv = inverse(e.transpose() * e);
  if (!inv) throw Error(ErrorCode::AffineDependence, "degenerate simplex in cover");
  Rational tr = 0;
  for (std::size_t j = 0; j < k; ++j) tr += (*inv)(j, j);
  return sqrt_upper(Rational(static_cast<long>(k)) * tr);
}

// Barycentric certificate for one maximal simplex. With coordinates sorted
// a_0 >= a_1 >= ..., the face on the top k+1 coordinates has its core
// containing x once the remaining mass is below reach[k] and a_k exceeds
// floor[k]. Failing at every level k < d forces a_k >= reach[k-1]/(d-k+1),
// so floor[k] < reach[k-1]/(d-k+1) for all k settles coverage.
bool barycentric_certificate(const SimplicialComplex& k, std::size_t si,
                             const std::vector<const CoverElement*>& by_simplex) {
  const Simplex& s = k.simplex(si);
  const std::size_t d = s.size() - 1;
  if (d == 0) return by_simplex[si] && by_simplex[si]->kind() == CoverElement::Kind::Ball;
  const Rational diam = sqrt_upper(squared_diameter(k.points_of(s)));
  std::vector<Rational> reach(d + 1), floor(d + 1);
  std::vector<bool> seen(d + 1, false);
  for (const auto& f : s.faces()) {
    auto idx = k.index_of(f);
    if (!idx || !by_simplex[*idx]) return false;
    const CoverElement& el = *by_simplex[*idx];
    const std::size_t e = f.size() - 1;
    Rational a, t;
    if (el.kind() == CoverElement::Kind::Ball) {
      if (e != 0) return false;
      a = Rational(2, 3) * el.radius() / diam;
    } else {
      if (e == 0 || !(el.epsilon() * 4 < 3)) return false;
      a = Rational(2, 3) * el.radius() / diam;
      t = Rational(4, 3) * el.epsilon() / Rational(static_cast<long>(e + 1));
      if (e < d) t += Rational(2, 3) * weight_sensitivity(k.points_of(f)) * el.radius();
    }
    if (!seen[e]) {
      reach[e] = a;
      floor[e] = t;
      seen[e] = true;
    } else {
      reach[e] = min(reach[e], a);
      floor[e] = max(floor[e], t);
    }
  }
  for (std::size_t e = 1; e <= d; ++e)
    if (!(floor[e] * Rational(static_cast<long>(d - e + 1)) < reach[e - 1])) return false;
  return true;
}

}  // namespace

std::vector<std::size_t> elements_disjoint_from(const SkeletonCover& cover, std::size_t t_index) {
  const Simplex& t = cover.complex->simplex(t_index);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cover.elements.size(); ++i)
    if (!cover.elements[i].simplex().is_face_of(t)) out.push_back(i);
  return out;
}

SkeletonCover build_cover(const ComplexPtr& kp, const Rational& delta, const CoverOptions& options) {
  if (!kp || kp->simplices().empty()) throw Error(ErrorCode::EmptyComplex, "cannot cover an empty complex");
  if (sgn(delta) <= 0) throw Error(ErrorCode::RangeError, "delta must be positive");
  const SimplicialComplex& k = *kp;
  SkeletonCover cover;
  cover.complex = kp;
  cover.delta = delta;
  cover.elements.reserve(k.simplices().size());

  // Vertex balls: B(v, 2r) must miss every closed simplex avoiding v.
  Rational m = delta * delta;
  for (VertexId v = 0; v < k.num_vertices(); ++v) {
    Simplex sv({v});
    for (const auto& t : faces_missing(k, sv)) {
      auto pts = k.points_of(t);
      m = min(m, squared_distance_to_hull(k.vertex(v), pts));
    }
  }
  Rational r0 = sqrt_lower(m) / 2;
  if (sgn(r0) <= 0) throw Error(ErrorCode::DeltaTooLarge, "no admissible vertex radius");
  cover.levels.push_back({0, Rational(0), r0});
  for (VertexId v = 0; v < k.num_vertices(); ++v)
    cover.elements.push_back(CoverElement::ball(v, Simplex({v}), k.vertex(v), r0));

  for (int e = 1; e <= k.dim(); ++e) {
    std::vector<std::size_t> level;
    for (std::size_t i = 0; i < k.simplices().size(); ++i)
      if (k.simplex(i).dim() == e) level.push_back(i);
    if (level.empty()) continue;

    // Margin the barycentric certificate needs at this level, taken over
    // every maximal simplex that contains e-simplices.
    const Rational prev_radius = cover.levels.back().delta;
    std::optional<Rational> margin;
    for (std::size_t mi : k.maximal_simplices()) {
      const Simplex& m = k.simplex(mi);
      if (m.dim() < e) continue;
      Rational diam = sqrt_upper(squared_diameter(k.points_of(m)));
      Rational bound = Rational(2, 3) * prev_radius / diam / Rational(m.dim() - e + 1);
      margin = margin ? min(*margin, bound) : bound;
    }
    const Rational half = *margin / 2;
    Rational eps(1, 2);
    for (int h = 0; !(Rational(4, 3) * eps / Rational(e + 1) < half); ++h) {
      if (h >= options.max_halvings)
        throw Error(ErrorCode::DeltaTooLarge,
                    "no admissible shrinking found at level " + std::to_string(e) + " (internal error)");
      eps /= 2;
    }
    Rational kappa = 0;
    for (std::size_t si : level) kappa = max(kappa, weight_sensitivity(k.points_of(k.simplex(si))));

    // Tube radius: the radius-neighbourhood of the closed shrunk simplex must
    // miss every closed simplex not containing it.
    Rational de = delta / 2;
    int guard = 0;
    while (!(Rational(2, 3) * kappa * de < half)) {
      de /= 2;
      if (++guard > 4 * options.max_halvings)
        throw Error(ErrorCode::DeltaTooLarge, "tube radius search exhausted (internal error)");
    }
    for (std::size_t si : level) {
      const Simplex& s = k.simplex(si);
      auto shrunk = shrink(k, s, eps).closed_vertices;
      for (const auto& t : faces_missing(k, s)) {
        auto tp = k.points_of(t);
        Rational d2 = squared_distance_between_hulls(shrunk, tp);
        if (sgn(d2) <= 0)
          throw Error(ErrorCode::DeltaTooLarge, "shrunk simplex meets a disjoint simplex (internal error)");
        while (de * de >= d2) {
          de /= 2;
          if (++guard > 4 * options.max_halvings)
            throw Error(ErrorCode::DeltaTooLarge, "tube radius search exhausted (internal error)");
        }
      }
    }
    cover.levels.push_back({e, eps, de});
    for (std::size_t si : level) {
      const Simplex& s = k.simplex(si);
      cover.elements.push_back(CoverElement::tube(si, s, k.points_of(s), eps, de));
    }
  }
  return cover;
}

CoverReport verify_cover(const SkeletonCover& cover, const CoverOptions& options) {
  CoverReport report;
  const SimplicialComplex& k = *cover.complex;
  if (cover.elements.size() != k.simplices().size())
    report.violations.push_back({"i", std::nullopt, std::nullopt, "element count differs from simplex count"});

  // (i) every maximal simplex lies in the union of cores.
  const Rational feature = feature_size(cover);
  std::vector<const CoverElement*> by_simplex(k.simplices().size(), nullptr);
  for (const auto& e : cover.elements)
    if (e.simplex_index() < by_simplex.size() && k.simplex(e.simplex_index()) == e.simplex())
      by_simplex[e.simplex_index()] = &e;
  for (std::size_t ti : k.maximal_simplices()) {
    if (options.barycentric_first && barycentric_certificate(k, ti, by_simplex)) continue;
    auto pts = k.points_of(k.simplex(ti));
    std::vector<const CoverElement*> cands;
    for (const auto& e : cover.elements)
      if (boxes_overlap(k.bounds(ti), e.bounds_lo(), e.bounds_hi())) cands.push_back(&e);
    auto res = certify_coverage(pts, cands, depth_cap(pts, feature, options.certification_depth), kMaxPieces);
    report.pieces_checked += res.pieces;
    if (res.status == CoverageStatus::Uncovered)
      report.violations.push_back({"i", std::nullopt, ti,
                                   "point " + to_string(res.witness) + " of subsimplex " + describe(res.piece) +
                                       " lies in no element core"});
    else if (res.status == CoverageStatus::Exhausted)
      report.violations.push_back({"i", std::nullopt, ti,
                                   "refinement limit reached on subsimplex " + describe(res.piece) +
                                       " without certifying coverage"});
  }

  for (std::size_t i = 0; i < cover.elements.size(); ++i) {
    const CoverElement& el = cover.elements[i];
    // (ii) the closed element stays within distance radius of the closed
    // shrunk simplex, so a strictly larger distance to t certifies Cl(U) ∩ t = ∅.
    const Rational r2 = el.radius() * el.radius();
    for (const auto& t : faces_missing(k, el.simplex())) {
      Rational d2 = squared_distance_between_hulls(el.shrunk_vertices(), k.points_of(t));
      if (!(d2 > r2)) {
        std::ostringstream os;
        os << "closure may meet simplex {";
        for (std::size_t j = 0; j < t.ids().size(); ++j) os << (j ? "," : "") << t.ids()[j];
        os << "}: squared distance " << to_string(d2) << " <= squared radius " << to_string(r2);
        report.violations.push_back({"ii", i, el.simplex_index(), os.str()});
      }
    }
    // (iii) displacement of the retraction is below the element radius.
    if (!(el.radius() < cover.delta))
      report.violations.push_back({"iii", i, el.simplex_index(),
                                   "radius " + to_string(el.radius()) + " is not below delta " +
                                       to_string(cover.delta)});
    if (el.kind() == CoverElement::Kind::Tube && !(el.epsilon() * 4 < 3))
      report.violations.push_back({"i", i, el.simplex_index(), "epsilon leaves an empty core"});
    report.max_retraction_radius = max(report.max_retraction_radius, el.radius());
  }
  return report;
}

}  // namespace polysmooth
