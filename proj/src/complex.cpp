#include "polysmooth/complex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "polysmooth/errors.hpp"
#include "polysmooth/exact_lp.hpp"

namespace polysmooth {

Simplex::Simplex(std::vector<VertexId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool Simplex::contains(VertexId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

bool Simplex::is_face_of(const Simplex& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

std::vector<Simplex> Simplex::faces() const {
  std::vector<Simplex> out;
  const std::size_t n = ids_.size();
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    std::vector<VertexId> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) sub.push_back(ids_[i]);
    out.emplace_back(std::move(sub));
  }
  return out;
}

namespace {

bool boxes_overlap(const std::pair<std::vector<double>, std::vector<double>>& a,
                   const std::pair<std::vector<double>, std::vector<double>>& b) {
  for (std::size_t i = 0; i < a.first.size(); ++i)
    if (a.second[i] < b.first[i] || b.second[i] < a.first[i]) return false;
  return true;
}

// Intersection of two closed simplices equals the hull of their common
// vertices iff no point of the intersection puts weight on a vertex of the
// first simplex outside the common set.
bool meets_outside_common_face(const SimplicialComplex& k, const Simplex& s, const Simplex& t) {
  std::vector<VertexId> common;
  std::set_intersection(s.ids().begin(), s.ids().end(), t.ids().begin(), t.ids().end(), std::back_inserter(common));
  const std::size_t p = k.ambient_dim();
  const std::size_t ns = s.size();
  const std::size_t nt = t.size();
  RationalMatrix a(p + 2, ns + nt);
  std::vector<Rational> b(p + 2);
  for (std::size_t i = 0; i < ns; ++i) {
    const Point& v = k.vertex(s.ids()[i]);
    for (std::size_t r = 0; r < p; ++r) a(r, i) = v[r];
    a(p, i) = 1;
  }
  for (std::size_t j = 0; j < nt; ++j) {
    const Point& v = k.vertex(t.ids()[j]);
    for (std::size_t r = 0; r < p; ++r) a(r, ns + j) = -v[r];
    a(p + 1, ns + j) = 1;
  }
  b[p] = 1;
  b[p + 1] = 1;
  std::vector<Rational> c(ns + nt);
  for (std::size_t i = 0; i < ns; ++i)
    if (!std::binary_search(common.begin(), common.end(), s.ids()[i])) c[i] = 1;
  LpResult r = solve_lp(a, b, c);
  if (r.status != LpResult::Status::Optimal) return false;
  return sgn(r.value) > 0;
}

}  // namespace

void SimplicialComplex::finalize(const std::vector<Simplex>& tops) {
  std::set<Simplex> all;
  for (const auto& t : tops)
    for (auto& f : t.faces()) all.insert(std::move(f));
  for (VertexId v = 0; v < vertices_.size(); ++v) all.insert(Simplex({v}));
  simplices_.assign(all.begin(), all.end());
  index_.clear();
  dim_ = -1;
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    index_.emplace(simplices_[i], i);
    dim_ = std::max(dim_, simplices_[i].dim());
  }
  // Maximal: not a face of a simplex one dimension up.
  std::vector<bool> covered(simplices_.size(), false);
  for (const auto& s : simplices_) {
    if (s.dim() == 0) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      std::vector<VertexId> sub = s.ids();
      sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
      covered[index_.at(Simplex(sub))] = true;
    }
  }
  maximal_.clear();
  maximal_frames_.clear();
  for (std::size_t i = 0; i < simplices_.size(); ++i)
    if (!covered[i]) maximal_.push_back(i);
  for (std::size_t i : maximal_) maximal_frames_.emplace_back(points_of(simplices_[i]));
  bounds_.clear();
  bounds_.reserve(simplices_.size());
  for (const auto& s : simplices_) {
    std::vector<double> lo(ambient_dim_, INFINITY), hi(ambient_dim_, -INFINITY);
    for (VertexId v : s.ids())
      for (std::size_t i = 0; i < ambient_dim_; ++i) {
        double x = vertices_[v][i].get_d();
        lo[i] = std::min(lo[i], x);
        hi[i] = std::max(hi[i], x);
      }
    for (std::size_t i = 0; i < ambient_dim_; ++i) {
      double pad = 1e-12 * (1.0 + std::max(std::abs(lo[i]), std::abs(hi[i])));
      lo[i] -= pad;
      hi[i] += pad;
    }
    bounds_.emplace_back(std::move(lo), std::move(hi));
  }
}

SimplicialComplex SimplicialComplex::build(std::vector<Point> vertices,
                                           const std::vector<std::vector<VertexId>>& top_simplices) {
  if (vertices.empty()) throw Error(ErrorCode::EmptyComplex, "no vertices");
  SimplicialComplex k;
  k.ambient_dim_ = vertices.front().size();
  if (k.ambient_dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "ambient dimension must be positive");
  for (const auto& v : vertices)
    if (v.size() != k.ambient_dim_) throw Error(ErrorCode::DimensionMismatch, "vertex coordinates of mixed length");
  {
    std::vector<std::size_t> order(vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vertices[a] < vertices[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
      if (vertices[order[i]] == vertices[order[i - 1]])
        throw Error(ErrorCode::DuplicateVertex, "vertices " + std::to_string(order[i - 1]) + " and " +
                                                    std::to_string(order[i]) + " coincide");
  }
  std::vector<Simplex> tops;
  for (const auto& ids : top_simplices) {
    if (ids.empty()) throw Error(ErrorCode::AffineDependence, "empty simplex");
    for (VertexId v : ids)
      if (v >= vertices.size()) throw Error(ErrorCode::UnknownVertex, "vertex id " + std::to_string(v));
    Simplex s(ids);
    if (s.size() != ids.size()) throw Error(ErrorCode::AffineDependence, "repeated vertex id in a simplex");
    tops.push_back(std::move(s));
  }
  k.vertices_ = std::move(vertices);
  for (const auto& s : tops) {
    if (s.size() > k.ambient_dim_ + 1)
      throw Error(ErrorCode::AffineDependence, "simplex with more than p+1 vertices");
    std::vector<Point> pts = k.points_of(s);
    AffineFrame frame(pts);  // throws AffineDependence
  }
  k.finalize(tops);
  const auto& maxi = k.maximal_;
  for (std::size_t a = 0; a < maxi.size(); ++a)
    for (std::size_t b = a + 1; b < maxi.size(); ++b) {
      if (!boxes_overlap(k.bounds_[maxi[a]], k.bounds_[maxi[b]])) continue;
      const Simplex& s = k.simplices_[maxi[a]];
      const Simplex& t = k.simplices_[maxi[b]];
      if (meets_outside_common_face(k, s, t) || meets_outside_common_face(k, t, s)) {
        std::string msg = "simplices {";
        for (VertexId v : s.ids()) msg += std::to_string(v) + ",";
        msg.back() = '}';
        msg += " and {";
        for (VertexId v : t.ids()) msg += std::to_string(v) + ",";
        msg.back() = '}';
        throw Error(ErrorCode::BadGluing, msg + " meet outside a common face");
      }
    }
  return k;
}

SimplicialComplex SimplicialComplex::build_trusted(std::vector<Point> vertices, const std::vector<Simplex>& tops) {
  SimplicialComplex k;
  k.ambient_dim_ = vertices.front().size();
  k.vertices_ = std::move(vertices);
  k.finalize(tops);
  return k;
}

SimplicialComplex build_complex(std::vector<Point> vertices, const std::vector<std::vector<VertexId>>& top_simplices) {
  return SimplicialComplex::build(std::move(vertices), top_simplices);
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Point> SimplicialComplex::points_of(const Simplex& s) const {
  std::vector<Point> pts;
  pts.reserve(s.size());
  for (VertexId v : s.ids()) pts.push_back(vertices_.at(v));
  return pts;
}

std::vector<std::vector<double>> SimplicialComplex::points_of_f(const Simplex& s) const {
  std::vector<std::vector<double>> pts;
  pts.reserve(s.size());
  for (VertexId v : s.ids()) pts.push_back(to_doubles(vertices_.at(v)));
  return pts;
}

Point barycenter(std::span<const Point> points) {
  Point b(points.front().size());
  for (const auto& p : points)
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += p[i];
  Rational n(static_cast<long>(points.size()));
  for (auto& x : b) x /= n;
  return b;
}

SimplicialComplex barycentric_subdivide(const SimplicialComplex& k, int rounds) {
  if (rounds < 0) throw Error(ErrorCode::RangeError, "subdivision rounds must be >= 0");
  SimplicialComplex current = k;
  if (current.provenance_.empty()) {
    current.provenance_.resize(current.simplices_.size());
    std::iota(current.provenance_.begin(), current.provenance_.end(), 0);
  }
  for (int round = 0; round < rounds; ++round) {
    const SimplicialComplex& src = current;
    // New vertex i is the barycenter of simplex i; 0-simplices come first so
    // original vertex ids are preserved.
    std::vector<Point> verts;
    verts.reserve(src.simplices_.size());
    for (const auto& s : src.simplices_) {
      std::vector<Point> pts = src.points_of(s);
      verts.push_back(barycenter(pts));
    }
    std::vector<Simplex> tops;
    for (std::size_t mi : src.maximal_) {
      std::vector<VertexId> perm = src.simplices_[mi].ids();
      do {
        std::vector<VertexId> chain;
        std::vector<VertexId> prefix;
        for (VertexId v : perm) {
          prefix.push_back(v);
          chain.push_back(src.index_.at(Simplex(prefix)));
        }
        tops.emplace_back(std::move(chain));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    SimplicialComplex next = SimplicialComplex::build_trusted(std::move(verts), tops);
    next.level_ = src.level_ + 1;
    // A chain simplex is carried by its largest member.
    next.provenance_.resize(next.simplices_.size());
    for (std::size_t i = 0; i < next.simplices_.size(); ++i) {
      const auto& ids = next.simplices_[i].ids();
      std::size_t largest = ids.front();
      for (VertexId v : ids)
        if (src.simplices_[v].size() > src.simplices_[largest].size()) largest = v;
      next.provenance_[i] = src.provenance_[largest];
    }
    current = std::move(next);
  }
  return current;
}

Rational mesh_size_squared(const SimplicialComplex& k) {
  if (k.num_vertices() == 0) throw Error(ErrorCode::EmptyComplex, "mesh of an empty complex");
  Rational best = 0;
  for (std::size_t mi : k.maximal_simplices()) {
    const auto& ids = k.simplex(mi).ids();
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        Rational d = squared_distance(k.vertex(ids[a]), k.vertex(ids[b]));
        if (d > best) best = d;
      }
  }
  return best;
}

double mesh_size(const SimplicialComplex& k) { return std::sqrt(mesh_size_squared(k).get_d()); }

std::vector<std::size_t> star(const SimplicialComplex& k, VertexId v) {
  if (v >= k.num_vertices()) throw Error(ErrorCode::UnknownVertex, "vertex id " + std::to_string(v));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k.simplices().size(); ++i)
    if (k.simplex(i).contains(v)) out.push_back(i);
  return out;
}

std::optional<BarycentricCoords> try_locate(const SimplicialComplex& k, const Point& x) {
  if (x.size() != k.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  std::vector<double> xf = to_doubles(x);
  const auto& maxi = k.maximal_simplices();
  for (std::size_t m = 0; m < maxi.size(); ++m) {
    const auto& box = k.bounds(maxi[m]);
    bool inside = true;
    for (std::size_t i = 0; i < xf.size() && inside; ++i)
      inside = xf[i] >= box.first[i] - 1e-9 && xf[i] <= box.second[i] + 1e-9;
    if (!inside) continue;
    auto w = k.maximal_frame(m).coordinates(x);
    if (!w) continue;
    bool nonneg = std::all_of(w->begin(), w->end(), [](const Rational& q) { return sgn(q) >= 0; });
    if (!nonneg) continue;
    const auto& ids = k.simplex(maxi[m]).ids();
    std::vector<VertexId> support;
    BarycentricCoords out;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (sgn((*w)[i]) > 0) {
        support.push_back(ids[i]);
        out.weights.push_back((*w)[i]);
      }
    out.simplex = Simplex(std::move(support));
    return out;
  }
  return std::nullopt;
}

BarycentricCoords locate(const SimplicialComplex& k, const Point& x) {
  auto r = try_locate(k, x);
  if (!r) throw Error(ErrorCode::NotInComplex, "point " + to_string(x) + " is not in |K|");
  return *r;
}

std::optional<LocatedF> locate_f(const SimplicialComplex& k, std::span<const double> x, double tol) {
  const auto& maxi = k.maximal_simplices();
  std::optional<LocatedF> best;
  double best_min = -INFINITY;
  AffineFrame::ProjectionF pr;
  for (std::size_t m = 0; m < maxi.size(); ++m) {
    const auto& box = k.bounds(maxi[m]);
    bool inside = true;
    for (std::size_t i = 0; i < x.size() && inside; ++i)
      inside = x[i] >= box.first[i] - 1e-7 && x[i] <= box.second[i] + 1e-7;
    if (!inside) continue;
    k.maximal_frame(m).project(x, pr);
    if (pr.normal_sq > std::max(tol * tol, 1e-18)) continue;
    double mn = *std::min_element(pr.weights.begin(), pr.weights.end());
    if (mn >= -tol && mn > best_min) {
      best_min = mn;
      best = LocatedF{maxi[m], pr.weights};
    }
  }
  return best;
}

}  // namespace polysmooth
