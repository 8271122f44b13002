#include "polysmooth/simplicial_map.hpp"

#include <algorithm>
#include <cmath>

#include "polysmooth/errors.hpp"
#include "polysmooth/exact_lp.hpp"
#include "polysmooth/simplex_distance.hpp"

namespace polysmooth {

SimplicialCheck is_simplicial(std::span<const VertexId> vertex_map, const SimplicialComplex& source,
                              const SimplicialComplex& target) {
  if (vertex_map.size() != source.num_vertices())
    throw Error(ErrorCode::DimensionMismatch, "vertex map is not total on the source vertices");
  for (std::size_t mi : source.maximal_simplices()) {
    const Simplex& s = source.simplex(mi);
    std::vector<VertexId> image;
    for (VertexId v : s.ids()) {
      if (vertex_map[v] >= target.num_vertices())
        throw Error(ErrorCode::UnknownVertex, "target vertex id " + std::to_string(vertex_map[v]));
      image.push_back(vertex_map[v]);
    }
    if (!target.index_of(Simplex(image))) return {false, s};
  }
  return {true, std::nullopt};
}

PLMap::PLMap(ComplexPtr source, std::vector<Point> images) : source_(std::move(source)), images_(std::move(images)) {
  if (images_.size() != source_->num_vertices())
    throw Error(ErrorCode::DimensionMismatch, "one image per source vertex is required");
  for (const auto& im : images_)
    if (im.size() != images_.front().size()) throw Error(ErrorCode::DimensionMismatch, "images of mixed dimension");
}

PLMap PLMap::from_simplicial(const SimplicialMap& g) {
  std::vector<Point> images;
  images.reserve(g.vertex_map.size());
  for (VertexId w : g.vertex_map) images.push_back(g.target->vertex(w));
  return PLMap(g.source, std::move(images));
}

Point PLMap::on_simplex(const Simplex& s, std::span<const Rational> weights) const {
  Point out(target_dim());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Point& im = images_[s.ids()[k]];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[k] * im[i];
  }
  return out;
}

Point PLMap::operator()(const Point& x) const {
  BarycentricCoords bc = locate(*source_, x);
  return on_simplex(bc.simplex, bc.weights);
}

Point evaluate_pl(const PLMap& g, const Point& x) { return g(x); }

std::size_t EvaluableMap::target_dim() const {
  if (auto pl = as_pl()) return pl->target_dim();
  return as_opaque()->target_dim;
}

Point EvaluableMap::operator()(const Point& x) const {
  if (auto pl = as_pl()) return (*pl)(x);
  auto r = as_opaque()->evaluate(x);
  if (!r) throw Error(ErrorCode::EvaluationFailure, "opaque map has no value at " + to_string(x));
  return *r;
}

namespace {

struct Box {
  std::vector<double> lo, hi;
};

Box box_of(std::span<const Point> pts, double pad) {
  Box b{std::vector<double>(pts[0].size(), INFINITY), std::vector<double>(pts[0].size(), -INFINITY)};
  for (const auto& p : pts)
    for (std::size_t i = 0; i < p.size(); ++i) {
      double x = p[i].get_d();
      b.lo[i] = std::min(b.lo[i], x);
      b.hi[i] = std::max(b.hi[i], x);
    }
  for (std::size_t i = 0; i < b.lo.size(); ++i) {
    b.lo[i] -= pad;
    b.hi[i] += pad;
  }
  return b;
}

bool overlap(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.lo.size(); ++i)
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
  return true;
}

struct ForbiddenFace {
  std::vector<Point> points;
  Box box;
};

// Closed simplices of L not containing w; their union is |L| \ Star(w, L).
std::vector<ForbiddenFace> forbidden_faces(const SimplicialComplex& l, VertexId w) {
  std::vector<ForbiddenFace> out;
  for (std::size_t mi : l.maximal_simplices()) {
    const Simplex& t = l.simplex(mi);
    std::vector<VertexId> ids;
    for (VertexId u : t.ids())
      if (u != w) ids.push_back(u);
    if (ids.empty()) continue;
    ForbiddenFace f;
    f.points = l.points_of(Simplex(ids));
    f.box = box_of(f.points, 1e-9);
    out.push_back(std::move(f));
  }
  return out;
}

// Is there a point with strictly positive weights on `images` that lies in
// the closed hull of `face`? Maximizes the smallest weight.
bool open_hull_meets(std::span<const Point> images, std::span<const Point> face) {
  const std::size_t q = images[0].size();
  const std::size_t na = images.size();
  const std::size_t ng = face.size();
  // Columns: alpha (na), gamma (ng), t, slack (na), u.
  const std::size_t cols = na + ng + 1 + na + 1;
  const std::size_t rows = q + 2 + na + 1;
  RationalMatrix a(rows, cols);
  std::vector<Rational> b(rows);
  const std::size_t t_col = na + ng;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t r = 0; r < q; ++r) a(r, i) = images[i][r];
  for (std::size_t k = 0; k < ng; ++k)
    for (std::size_t r = 0; r < q; ++r) a(r, na + k) = -face[k][r];
  for (std::size_t i = 0; i < na; ++i) a(q, i) = 1;
  b[q] = 1;
  for (std::size_t k = 0; k < ng; ++k) a(q + 1, na + k) = 1;
  b[q + 1] = 1;
  for (std::size_t i = 0; i < na; ++i) {
    a(q + 2 + i, i) = 1;
    a(q + 2 + i, t_col) = -1;
    a(q + 2 + i, t_col + 1 + i) = -1;
  }
  a(rows - 1, t_col) = 1;
  a(rows - 1, cols - 1) = 1;
  b[rows - 1] = 1;
  std::vector<Rational> c(cols);
  c[t_col] = 1;
  LpResult r = solve_lp(a, b, c);
  return r.status == LpResult::Status::Optimal && sgn(r.value) > 0;
}

// General form: the open simplex sigma may cross several simplices of the
// map's source. Looks for y in sigma^0 ∩ tau with f_tau(y) in face.
bool open_piece_meets(std::span<const Point> sigma, std::span<const Point> tau, std::span<const Point> tau_images,
                      std::span<const Point> face) {
  const std::size_t p = sigma[0].size();
  const std::size_t q = tau_images[0].size();
  const std::size_t na = sigma.size();
  const std::size_t nb = tau.size();
  const std::size_t ng = face.size();
  // Columns: alpha (na), beta (nb), gamma (ng), t, slack (na), u.
  const std::size_t t_col = na + nb + ng;
  const std::size_t cols = t_col + 1 + na + 1;
  const std::size_t rows = p + q + 3 + na + 1;
  RationalMatrix a(rows, cols);
  std::vector<Rational> b(rows);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t r = 0; r < p; ++r) a(r, i) = sigma[i][r];
  for (std::size_t j = 0; j < nb; ++j) {
    for (std::size_t r = 0; r < p; ++r) a(r, na + j) = -tau[j][r];
    for (std::size_t r = 0; r < q; ++r) a(p + r, na + j) = tau_images[j][r];
  }
  for (std::size_t k = 0; k < ng; ++k)
    for (std::size_t r = 0; r < q; ++r) a(p + r, na + nb + k) = -face[k][r];
  for (std::size_t i = 0; i < na; ++i) a(p + q, i) = 1;
  for (std::size_t j = 0; j < nb; ++j) a(p + q + 1, na + j) = 1;
  for (std::size_t k = 0; k < ng; ++k) a(p + q + 2, na + nb + k) = 1;
  b[p + q] = b[p + q + 1] = b[p + q + 2] = 1;
  for (std::size_t i = 0; i < na; ++i) {
    a(p + q + 3 + i, i) = 1;
    a(p + q + 3 + i, t_col) = -1;
    a(p + q + 3 + i, t_col + 1 + i) = -1;
  }
  a(rows - 1, t_col) = 1;
  a(rows - 1, cols - 1) = 1;
  b[rows - 1] = 1;
  std::vector<Rational> c(cols);
  c[t_col] = 1;
  LpResult r = solve_lp(a, b, c);
  return r.status == LpResult::Status::Optimal && sgn(r.value) > 0;
}

// Index (into maximal_simplices) of a maximal simplex of `src` containing all points, if any.
std::optional<std::size_t> common_maximal(const SimplicialComplex& src, std::span<const Point> pts) {
  const Box b = box_of(pts, 0.0);
  const auto& maxi = src.maximal_simplices();
  for (std::size_t m = 0; m < maxi.size(); ++m) {
    const auto& bb = src.bounds(maxi[m]);
    bool inside = true;
    for (std::size_t i = 0; i < b.lo.size() && inside; ++i)
      inside = b.lo[i] >= bb.first[i] - 1e-9 && b.hi[i] <= bb.second[i] + 1e-9;
    if (!inside) continue;
    bool all = true;
    for (const auto& x : pts) {
      auto w = src.maximal_frame(m).coordinates(x);
      if (!w || std::any_of(w->begin(), w->end(), [](const Rational& q) { return sgn(q) < 0; })) {
        all = false;
        break;
      }
    }
    if (all) return m;
  }
  return std::nullopt;
}

StarDecision pl_star_check(const SimplicialComplex& k, const PLMap& f, const std::vector<Point>& vertex_images,
                           std::span<const std::size_t> star_simplices, const std::vector<ForbiddenFace>& forbidden) {
  const SimplicialComplex& src = *f.source();
  for (std::size_t si : star_simplices) {
    const Simplex& sigma = k.simplex(si);
    std::vector<Point> pts = k.points_of(sigma);
    if (auto m = common_maximal(src, pts)) {
      std::vector<Point> images;
      for (VertexId u : sigma.ids()) images.push_back(vertex_images[u]);
      const Box ib = box_of(images, 1e-9);
      for (const auto& face : forbidden) {
        if (!overlap(ib, face.box)) continue;
        if (open_hull_meets(images, face.points)) return StarDecision::Violated;
      }
      continue;
    }
    const Box sb = box_of(pts, 1e-9);
    const auto& maxi = src.maximal_simplices();
    for (std::size_t m = 0; m < maxi.size(); ++m) {
      const auto& bb = src.bounds(maxi[m]);
      Box tb{bb.first, bb.second};
      if (!overlap(sb, tb)) continue;
      const Simplex& tau = src.simplex(maxi[m]);
      std::vector<Point> tau_pts = src.points_of(tau);
      std::vector<Point> tau_images;
      for (VertexId u : tau.ids()) tau_images.push_back(f.images()[u]);
      const Box ib = box_of(tau_images, 1e-9);
      for (const auto& face : forbidden) {
        if (!overlap(ib, face.box)) continue;
        if (open_piece_meets(pts, tau_pts, tau_images, face.points)) return StarDecision::Violated;
      }
    }
  }
  return StarDecision::Holds;
}

// Barycentric lattice of order n on a simplex with d+1 vertices.
void lattice(std::size_t parts, int n, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (current.size() + 1 == parts) {
    int used = 0;
    for (int a : current) used += a;
    current.push_back(n - used);
    out.push_back(current);
    current.pop_back();
    return;
  }
  int used = 0;
  for (int a : current) used += a;
  for (int a = 0; a <= n - used; ++a) {
    current.push_back(a);
    lattice(parts, n, current, out);
    current.pop_back();
  }
}

StarDecision opaque_star_check(const SimplicialComplex& k, const OpaqueMap& f, std::span<const std::size_t> star_simplices,
                               const std::vector<ForbiddenFace>& forbidden, const StarOptions& options) {
  for (std::size_t si : star_simplices) {
    const Simplex& sigma = k.simplex(si);
    std::vector<Point> pts = k.points_of(sigma);
    Rational diam_sq = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) diam_sq = std::max(diam_sq, squared_distance(pts[a], pts[b]));
    const Rational diam = sqrt_upper(diam_sq);
    const int d = std::max(1, sigma.dim());
    bool certified = sigma.dim() == 0;
    for (int n = 1; n <= options.max_sampling_order && !certified; n *= 2) {
      // Every point of sigma lies within d*diam/n of a lattice point.
      const Rational margin = f.lipschitz * Rational(d) * diam / Rational(n);
      const Rational margin_sq = margin * margin;
      std::vector<std::vector<int>> pts_idx;
      std::vector<int> cur;
      lattice(pts.size(), n, cur, pts_idx);
      bool ok = true;
      for (const auto& idx : pts_idx) {
        std::vector<Rational> w(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) w[i] = Rational(idx[i], n);
        Point y(pts[0].size());
        for (std::size_t i = 0; i < idx.size(); ++i)
          for (std::size_t c = 0; c < y.size(); ++c) y[c] += w[i] * pts[i][c];
        auto z = f.evaluate(y);
        if (!z) return StarDecision::Undecided;
        const bool interior = std::all_of(idx.begin(), idx.end(), [](int a) { return a > 0; });
        std::vector<Point> zs{*z};
        const Box zb = box_of(zs, margin.get_d() + 1e-9);
        for (const auto& face : forbidden) {
          if (!overlap(zb, face.box)) continue;
          Rational dsq = squared_distance_to_hull(*z, face.points);
          if (sgn(dsq) == 0 && interior) return StarDecision::Violated;
          if (dsq <= margin_sq) ok = false;
        }
      }
      if (sigma.dim() == 0 && ok) certified = true;
      if (ok) certified = true;
    }
    if (sigma.dim() == 0) {
      auto z = f.evaluate(pts[0]);
      if (!z) return StarDecision::Undecided;
      for (const auto& face : forbidden)
        if (sgn(squared_distance_to_hull(*z, face.points)) == 0) return StarDecision::Violated;
      continue;
    }
    if (!certified) return StarDecision::Undecided;
  }
  return StarDecision::Holds;
}

std::vector<std::vector<std::size_t>> vertex_stars(const SimplicialComplex& k) {
  std::vector<std::vector<std::size_t>> out(k.num_vertices());
  for (std::size_t i = 0; i < k.simplices().size(); ++i)
    for (VertexId v : k.simplex(i).ids()) out[v].push_back(i);
  return out;
}

StarDecision check_vertex(const SimplicialComplex& k, const SimplicialComplex& l, const EvaluableMap& f,
                          const std::vector<Point>* vertex_images, std::span<const std::size_t> st, VertexId w,
                          const StarOptions& options) {
  auto forbidden = forbidden_faces(l, w);
  if (auto pl = f.as_pl()) {
    if (vertex_images) return pl_star_check(k, *pl, *vertex_images, st, forbidden);
    std::vector<Point> images(k.num_vertices());
    for (std::size_t si : st)
      for (VertexId u : k.simplex(si).ids())
        if (images[u].empty()) images[u] = (*pl)(k.vertex(u));
    return pl_star_check(k, *pl, images, st, forbidden);
  }
  return opaque_star_check(k, *f.as_opaque(), st, forbidden, options);
}

}  // namespace

StarDecision star_condition_at(const SimplicialComplex& k, const SimplicialComplex& l, const EvaluableMap& f,
                               VertexId v, VertexId w, const StarOptions& options) {
  if (w >= l.num_vertices()) throw Error(ErrorCode::UnknownVertex, "target vertex id " + std::to_string(w));
  auto st = star(k, v);
  return check_vertex(k, l, f, nullptr, st, w, options);
}

StarResult check_star_condition(const SimplicialComplex& k, const SimplicialComplex& l, const EvaluableMap& f,
                                std::span<const VertexId> vertex_map, const StarOptions& options) {
  if (vertex_map.size() != k.num_vertices())
    throw Error(ErrorCode::DimensionMismatch, "vertex map is not total on the source vertices");
  const auto stars = vertex_stars(k);
  std::vector<Point> images;
  if (auto pl = f.as_pl()) {
    images.reserve(k.num_vertices());
    for (VertexId u = 0; u < k.num_vertices(); ++u) images.push_back((*pl)(k.vertex(u)));
  }
  StarResult result;
  for (VertexId v = 0; v < k.num_vertices(); ++v) {
    StarDecision d = check_vertex(k, l, f, images.empty() ? nullptr : &images, stars[v], vertex_map[v], options);
    if (d == StarDecision::Violated) return {d, v, "image of Star(" + std::to_string(v) + ") leaves Star(" +
                                                        std::to_string(vertex_map[v]) + ")"};
    if (d == StarDecision::Undecided && result.decision == StarDecision::Holds)
      result = {d, v, "sampling could not certify vertex " + std::to_string(v)};
  }
  return result;
}

bool star_condition(const SimplicialComplex& k, const SimplicialComplex& l, const EvaluableMap& f,
                    std::span<const VertexId> vertex_map, const StarOptions& options) {
  StarResult r = check_star_condition(k, l, f, vertex_map, options);
  if (r.decision == StarDecision::Undecided) throw Error(ErrorCode::Undecided, r.detail);
  return r.decision == StarDecision::Holds;
}

int target_level_for(const SimplicialComplex& l, const Rational& eps, int max_level) {
  if (sgn(eps) <= 0) throw Error(ErrorCode::RangeError, "epsilon must be positive");
  const Rational eps_sq = eps * eps;
  SimplicialComplex current = l;
  for (int level = 0; level <= max_level; ++level) {
    if (mesh_size_squared(current) < eps_sq) return level;
    current = barycentric_subdivide(current, 1);
  }
  throw Error(ErrorCode::SubdivisionLimit, "target mesh does not drop below epsilon within " +
                                               std::to_string(max_level) + " subdivisions");
}

SimplicialApproximation simplicial_approximation(const ComplexPtr& k, const ComplexPtr& l, const EvaluableMap& f,
                                                 const Rational& eps, const ApproximationOptions& options) {
  if (sgn(eps) <= 0) throw Error(ErrorCode::RangeError, "epsilon must be positive");
  if (f.target_dim() != l->ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "map and target dimensions differ");
  const Rational eps_sq = eps * eps;
  int level_l = 0;
  auto target = std::make_shared<const SimplicialComplex>(*l);
  while (!(mesh_size_squared(*target) < eps_sq)) {
    if (++level_l > options.max_target_level)
      throw Error(ErrorCode::SubdivisionLimit, "target subdivision cap reached");
    target = std::make_shared<const SimplicialComplex>(barycentric_subdivide(*target, 1));
  }

  auto source = k;
  std::string last_failure;
  bool only_undecided = true;
  for (int level_k = 0; level_k <= options.max_source_level; ++level_k) {
    if (level_k > 0) source = std::make_shared<const SimplicialComplex>(barycentric_subdivide(*source, 1));
    const auto stars = vertex_stars(*source);
    std::vector<Point> images;
    images.reserve(source->num_vertices());
    for (VertexId v = 0; v < source->num_vertices(); ++v) images.push_back(f(source->vertex(v)));
    std::vector<VertexId> assignment(source->num_vertices());
    bool complete = true;
    for (VertexId v = 0; v < source->num_vertices() && complete; ++v) {
      auto loc = try_locate(*target, images[v]);
      if (!loc) throw Error(ErrorCode::NotInComplex, "f(" + to_string(source->vertex(v)) + ") is outside |L|");
      std::vector<VertexId> candidates = loc->simplex.ids();
      std::stable_sort(candidates.begin(), candidates.end(), [&](VertexId a, VertexId b) {
        Rational da = squared_distance(images[v], target->vertex(a));
        Rational db = squared_distance(images[v], target->vertex(b));
        if (da != db) return da < db;
        return a < b;
      });
      bool found = false;
      bool undecided = false;
      for (VertexId w : candidates) {
        StarDecision d = check_vertex(*source, *target, f, f.as_pl() ? &images : nullptr, stars[v], w, options.star);
        if (d == StarDecision::Holds) {
          assignment[v] = w;
          found = true;
          break;
        }
        if (d == StarDecision::Undecided) undecided = true;
      }
      if (!found) {
        complete = false;
        if (!undecided) only_undecided = false;
        last_failure = "level k=" + std::to_string(level_k) + ": no admissible target vertex for source vertex " +
                       std::to_string(v) + " at " + to_string(source->vertex(v));
      }
    }
    if (!complete) continue;
    SimplicialApproximation out;
    out.source_level = level_k;
    out.target_level = level_l;
    out.map = SimplicialMap{source, target, std::move(assignment)};
    out.target_mesh_squared = mesh_size_squared(*target);
    SimplicialCheck check = is_simplicial(out.map.vertex_map, *source, *target);
    if (!check.ok) throw Error(ErrorCode::SubdivisionLimit, "star assignment is not simplicial (internal error)");
    return out;
  }
  if (only_undecided && !f.as_pl()) throw Error(ErrorCode::Undecided, last_failure);
  throw Error(ErrorCode::SubdivisionLimit, last_failure);
}

}  // namespace polysmooth
