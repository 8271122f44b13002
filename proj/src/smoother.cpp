#include "polysmooth/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "polysmooth/errors.hpp"
#include "polysmooth/parallel.hpp"
#include "polysmooth/sampling.hpp"

namespace polysmooth {

std::optional<std::size_t> carrier_of_points(const SimplicialComplex& l, std::span<const Point> points) {
  std::set<VertexId> ids;
  for (const auto& p : points) {
    auto bc = try_locate(l, p);
    if (!bc) return std::nullopt;
    ids.insert(bc->simplex.ids().begin(), bc->simplex.ids().end());
  }
  return l.index_of(Simplex(std::vector<VertexId>(ids.begin(), ids.end())));
}

namespace {

std::optional<std::size_t> carrier_of_points_f(const SimplicialComplex& l, const std::vector<std::vector<double>>& pts) {
  std::set<VertexId> ids;
  for (const auto& p : pts) {
    auto loc = locate_f(l, p, 1e-9);
    if (!loc) return std::nullopt;
    const Simplex& s = l.simplex(loc->simplex_index);
    for (std::size_t j = 0; j < s.size(); ++j)
      if (loc->weights[j] > 1e-9) ids.insert(s.ids()[j]);
  }
  return l.index_of(Simplex(std::vector<VertexId>(ids.begin(), ids.end())));
}

std::string simplex_text(const Simplex& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s.ids()[i]);
  return out + "}";
}

}  // namespace

CarrierAssignment compute_carriers(const PiecewiseMap& g, const ComplexPtr& target, int sample_order) {
  const SimplicialComplex& k = *g.source();
  if (g.target_dim() != target->ambient_dim())
    throw Error(ErrorCode::DimensionMismatch, "map and target complex have different dimensions");
  CarrierAssignment out{g.source(), target, std::vector<std::size_t>(k.simplices().size())};
  for (std::size_t t = 0; t < k.simplices().size(); ++t) {
    const Simplex& s = k.simplex(t);
    std::optional<std::size_t> xi;
    if (const PLMap* pl = g.as_pl()) {
      std::vector<Point> images;
      for (VertexId v : s.ids()) images.push_back(pl->images()[v]);
      xi = carrier_of_points(*target, images);
    } else {
      auto lattice = simplex_lattice(k.points_of(s), s.dim() == 0 ? 0 : sample_order);
      if (g.kind() == PiecewiseMap::Kind::Polynomial) {
        std::vector<Point> images;
        for (const auto& x : lattice) images.push_back(g(x));
        xi = carrier_of_points(*target, images);
      } else {
        std::vector<std::vector<double>> images;
        for (const auto& x : lattice) images.push_back(g(std::span<const double>(to_doubles(x))));
        xi = carrier_of_points_f(*target, images);
      }
    }
    if (!xi)
      throw Error(ErrorCode::CarrierViolation,
                  "image of simplex " + simplex_text(s) + " is not inside one closed simplex of the target");
    out.carrier[t] = *xi;
  }
  return out;
}

bool CarrierNeighborhood::contains(const SkeletonCover& cover, const Point& x) const {
  for (std::size_t e : excluded)
    if (cover.elements[e].in_closure(x)) return false;
  return true;
}

std::vector<CarrierNeighborhood> carrier_neighborhoods(const SkeletonCover& cover) {
  std::vector<CarrierNeighborhood> out;
  for (std::size_t t = 0; t < cover.complex->simplices().size(); ++t)
    out.push_back({t, elements_disjoint_from(cover, t)});
  return out;
}

SmoothedMap::SmoothedMap(std::shared_ptr<const PiecewiseMap> g, CarrierAssignment carriers,
                         std::shared_ptr<const SkeletonCover> cover, int nu, double eta)
    : g_(std::move(g)),
      carriers_(std::move(carriers)),
      cover_(std::move(cover)),
      pou_(std::make_shared<PartitionOfUnity>(cover_, nu)),
      eta_(eta) {
  const SimplicialComplex& k = *g_->source();
  if (cover_->complex.get() != &k && cover_->complex->simplices().size() != k.simplices().size())
    throw Error(ErrorCode::DimensionMismatch, "cover and map are on different complexes");
  const auto& maxi = k.maximal_simplices();
  for (const auto& e : cover_->elements) {
    std::size_t m = 0;
    while (m < maxi.size() && !e.simplex().is_face_of(k.simplex(maxi[m]))) ++m;
    element_piece_.push_back(m);
  }
  if (const PLMap* pl = g_->as_pl())
    for (const auto& im : pl->images()) vertex_images_.push_back(to_doubles(im));
}

std::vector<double> SmoothedMap::image_of(std::size_t element, std::span<const double> x,
                                          AffineFrame::ProjectionF& scratch) const {
  const CoverElement& e = cover_->elements[element];
  const std::size_t q = g_->target_dim();
  if (!vertex_images_.empty()) {
    const auto& ids = e.simplex().ids();
    const auto& first = vertex_images_[ids.front()];
    if (e.kind() == CoverElement::Kind::Ball ||
        std::all_of(ids.begin(), ids.end(), [&](VertexId v) { return vertex_images_[v] == first; }))
      return first;
    e.frame().project(x, scratch);
    std::vector<double> out(q, 0.0);
    for (std::size_t j = 0; j < e.simplex().size(); ++j) {
      const auto& im = vertex_images_[e.simplex().ids()[j]];
      for (std::size_t i = 0; i < q; ++i) out[i] += scratch.weights[j] * im[i];
    }
    return out;
  }
  const auto& verts = e.frame().vertices();
  std::vector<double> foot(verts.front().size(), 0.0);
  if (e.kind() == CoverElement::Kind::Ball) {
    foot = to_doubles(verts.front());
  } else {
    e.frame().project(x, scratch);
    for (std::size_t j = 0; j < verts.size(); ++j)
      for (std::size_t i = 0; i < foot.size(); ++i) foot[i] += scratch.weights[j] * verts[j][i].get_d();
  }
  return g_->on_piece(element_piece_[element], foot);
}

std::vector<double> SmoothedMap::combine(const PartitionOfUnity::Weights& weights,
                                         const std::vector<std::vector<double>>& images) const {
  // a convex combination of equal values is that value; keep it bit-exact
  if (std::all_of(images.begin(), images.end(), [&](const auto& im) { return im == images.front(); }))
    return images.front();
  std::vector<double> out(g_->target_dim(), 0.0);
  for (std::size_t n = 0; n < weights.size(); ++n)
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += weights[n].second * images[n][c];
  return out;
}

std::vector<double> SmoothedMap::extended(std::span<const double> x) const {
  auto weights = pou_->evaluate(x);
  AffineFrame::ProjectionF scratch;
  std::vector<std::vector<double>> images;
  for (const auto& [i, w] : weights) images.push_back(image_of(i, x, scratch));
  return combine(weights, images);
}

std::vector<double> SmoothedMap::operator()(std::span<const double> x) const {
  const SimplicialComplex& k = *g_->source();
  auto loc = locate_f(k, x, 1e-9);
  if (!loc) throw Error(ErrorCode::NotInComplex, "evaluation point is not in |K|");
  if (k.dim() == 0) return (*g_)(x);
  return extended(x);
}

SmoothedMap::Terms SmoothedMap::terms(const Point& x) const {
  Terms t;
  t.weights = pou_->evaluate(x);
  auto xf = to_doubles(x);
  t.value.assign(g_->target_dim(), 0.0);
  AffineFrame::ProjectionF scratch;
  for (const auto& [i, w] : t.weights) t.images.push_back(image_of(i, xf, scratch));
  t.value = combine(t.weights, t.images);
  return t;
}

Point SmoothedMap::evaluate(const Point& x) const {
  locate(*g_->source(), x);
  if (g_->source()->dim() == 0 && g_->kind() != PiecewiseMap::Kind::Opaque) return (*g_)(x);
  return from_doubles(terms(x).value);
}

Rational cover_radius_for(const PiecewiseMap& g, double eta) {
  double d = g.continuity_radius(eta / 2);
  const SimplicialComplex& k = *g.source();
  double diam = 0.0;
  for (std::size_t i = 0; i < k.ambient_dim(); ++i) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : k.vertices()) {
      lo = std::min(lo, v[i].get_d());
      hi = std::max(hi, v[i].get_d());
    }
    diam += (hi - lo) * (hi - lo);
  }
  diam = std::max(std::sqrt(diam), 1.0);
  d = std::min(d, diam);
  if (!(d > 0)) throw Error(ErrorCode::ModulusUnavailable, "continuity radius is not positive");
  // dyadic truncation with about 30 significant bits
  int e = static_cast<int>(std::floor(std::log2(d)));
  Rational scale = pow2(30 - e);
  mpz_class num(from_double(d) * scale);  // truncates toward zero
  Rational out = Rational(num) / scale;
  if (sgn(out) <= 0) throw Error(ErrorCode::ModulusUnavailable, "continuity radius underflow");
  return out;
}

SmoothedMap smooth_map(std::shared_ptr<const PiecewiseMap> g, CarrierAssignment carriers, double eta, int nu,
                       const CoverOptions& cover_options) {
  if (!(eta > 0)) throw Error(ErrorCode::RangeError, "eta must be positive");
  Rational delta = cover_radius_for(*g, eta);
  auto cover = std::make_shared<SkeletonCover>(build_cover(g->source(), delta, cover_options));
  return SmoothedMap(std::move(g), std::move(carriers), std::move(cover), nu, eta);
}

double IotaMap::bound() const { return std::ldexp(1.0, -level); }

IotaMap iota(const ComplexPtr& k, int nu, int n, const CoverOptions& cover_options) {
  if (n < 0) throw Error(ErrorCode::RangeError, "iota level must be nonnegative");
  auto g = std::make_shared<PiecewiseMap>(PiecewiseMap::from_pl(PLMap(k, k->vertices())));
  CarrierAssignment carriers{k, k, {}};
  for (std::size_t t = 0; t < k->simplices().size(); ++t) carriers.carrier.push_back(t);
  IotaMap out;
  out.level = n;
  out.order = nu;
  out.map = std::make_shared<SmoothedMap>(smooth_map(g, std::move(carriers), std::ldexp(1.0, -n), nu, cover_options));
  return out;
}

PullbackMap::PullbackMap(std::shared_ptr<const PiecewiseMap> f, IotaMap iota) : f_(std::move(f)), iota_(std::move(iota)) {
  if (f_->source()->simplices().size() != iota_.map->source().simplices().size())
    throw Error(ErrorCode::DimensionMismatch, "f and iota live on different complexes");
}

std::vector<double> PullbackMap::operator()(std::span<const double> x) const {
  const SimplicialComplex& k = iota_.map->source();
  auto loc = locate_f(k, x, 1e-9);
  if (!loc) throw Error(ErrorCode::NotInComplex, "evaluation point is not in |K|");
  const auto& maxi = k.maximal_simplices();
  std::size_t m = static_cast<std::size_t>(std::find(maxi.begin(), maxi.end(), loc->simplex_index) - maxi.begin());
  auto y = iota_.map->extended(x);
  return f_->on_piece(m, y);
}

std::vector<double> PullbackMap::extended(std::span<const double> x) const {
  const SimplicialComplex& k = iota_.map->source();
  auto loc = locate_f(k, x, 1.0);
  if (!loc) throw Error(ErrorCode::NotInComplex, "evaluation point is far from |K|");
  const auto& maxi = k.maximal_simplices();
  std::size_t m = static_cast<std::size_t>(std::find(maxi.begin(), maxi.end(), loc->simplex_index) - maxi.begin());
  auto y = iota_.map->extended(x);
  return f_->on_piece(m, y);
}

double PullbackMap::convergence_bound() const {
  auto lip = f_->lipschitz_bound();
  if (!lip) throw Error(ErrorCode::ModulusUnavailable, "f has no Lipschitz bound");
  return lip->get_d() * iota_.bound();
}

PullbackMap pullback_smooth(std::shared_ptr<const PiecewiseMap> f, IotaMap iota) {
  return PullbackMap(std::move(f), std::move(iota));
}

ApproximationResult approximate_map(const ComplexPtr& k, const ComplexPtr& l, const EvaluableMap& f,
                                    const Rational& eps, int nu, const ApproximateOptions& options) {
  if (sgn(eps) <= 0) throw Error(ErrorCode::RangeError, "eps must be positive");
  if (!(sgn(options.simplicial_share) > 0 && options.simplicial_share < 1))
    throw Error(ErrorCode::RangeError, "budget share must lie in (0,1)");
  ApproximationResult out;
  out.eps = eps;
  out.simplicial_budget = eps * options.simplicial_share;
  out.smoothing_budget = Rational(eps - out.simplicial_budget).get_d();
  out.simplicial = simplicial_approximation(k, l, f, out.simplicial_budget, options.simplicial);
  auto g = std::make_shared<PiecewiseMap>(PiecewiseMap::from_pl(PLMap::from_simplicial(out.simplicial.map)));
  auto carriers = compute_carriers(*g, out.simplicial.map.target);
  out.map = std::make_shared<SmoothedMap>(smooth_map(g, std::move(carriers), out.smoothing_budget, nu, options.cover));
  return out;
}

namespace {

struct SampleResult {
  double error = 0.0;
  double min_weight = 1.0;
  double normal = 0.0;
  double defect = 0.0;
  bool convex = true;
  bool hard = false;
  std::string failure;
};

}  // namespace

MapCertificate certify_map(const SmoothedMap& h, std::span<const Point> samples, double error_bound,
                           const Reference& reference) {
  const SimplicialComplex& k = h.source();
  const auto& carriers = h.carriers();
  const bool have_target = static_cast<bool>(carriers.target);
  std::vector<std::optional<AffineFrame>> frames;
  if (have_target) {
    frames.resize(carriers.target->simplices().size());
    for (std::size_t xi : carriers.carrier)
      if (!frames[xi]) frames[xi] = AffineFrame(carriers.target->points_of(carriers.target->simplex(xi)));
  }
  std::vector<SampleResult> results(samples.size());
  parallel_for(samples.size(), [&](std::size_t n) {
    const Point& x = samples[n];
    SampleResult& r = results[n];
    BarycentricCoords bc = locate(k, x);
    std::size_t t = *k.index_of(bc.simplex);
    auto terms = h.terms(x);
    double sum = 0.0;
    for (const auto& [i, w] : terms.weights) {
      sum += w;
      if (w < 0) r.convex = false;
      if (!h.cover().elements[i].simplex().is_face_of(bc.simplex)) {
        r.convex = false;
        r.failure = "active element of " + simplex_text(h.cover().elements[i].simplex()) +
                    " at a point of open simplex " + simplex_text(bc.simplex);
      }
    }
    r.defect = std::abs(sum - 1.0);
    std::vector<double> ref = reference ? reference(x) : (h.source_map().kind() == PiecewiseMap::Kind::Opaque
                                                              ? h.source_map()(std::span<const double>(to_doubles(x)))
                                                              : to_doubles(h.source_map()(x)));
    double e2 = 0.0;
    for (std::size_t c = 0; c < ref.size(); ++c) e2 += (terms.value[c] - ref[c]) * (terms.value[c] - ref[c]);
    r.error = std::sqrt(e2);
    if (!have_target) return;
    const AffineFrame& fr = *frames[carriers.carrier[t]];
    AffineFrame::ProjectionF pf;
    for (const auto& im : terms.images) {
      fr.project(im, pf);
      double mn = *std::min_element(pf.weights.begin(), pf.weights.end());
      if (mn < -1e-9 || pf.normal_sq > 1e-18) {
        r.convex = false;
        r.failure = "active image outside the carrier";
      }
    }
    auto pr = fr.project(from_doubles(terms.value));
    Rational mn = *std::min_element(pr.weights.begin(), pr.weights.end());
    r.min_weight = mn.get_d();
    r.normal = std::sqrt(pr.normal_sq.get_d());
    if (r.min_weight < -1e-6 || r.normal > 1e-6) r.hard = true;
  });
  MapCertificate cert;
  cert.samples = samples.size();
  cert.error_bound = error_bound;
  for (std::size_t n = 0; n < results.size(); ++n) {
    const auto& r = results[n];
    if (r.hard)
      throw Error(ErrorCode::CarrierViolation, "H(x) leaves its carrier at x = " + to_string(samples[n]) +
                                                   " (barycentric " + std::to_string(r.min_weight) + ")");
    cert.max_error = std::max(cert.max_error, r.error);
    cert.min_carrier_weight = std::min(cert.min_carrier_weight, r.min_weight);
    cert.max_carrier_normal = std::max(cert.max_carrier_normal, r.normal);
    if (r.min_weight < -1e-9 || r.normal > 1e-9) ++cert.carrier_soft_failures;
    cert.max_partition_defect = std::max(cert.max_partition_defect, r.defect);
    if (!r.convex) {
      cert.convexity_ok = false;
      if (cert.failures.size() < 10) cert.failures.push_back(r.failure + " at " + to_string(samples[n]));
    }
  }
  if (cert.max_partition_defect > 1e-12) cert.failures.push_back("partition of unity defect above 1e-12");
  cert.error_ok = cert.max_error < error_bound;
  return cert;
}

SeamReport seam_smoothness(const std::function<std::vector<double>(std::span<const double>)>& f,
                           const SimplicialComplex& k, double step, int nu_max) {
  SeamReport report;
  report.min_order = nu_max;
  const auto& maxi = k.maximal_simplices();
  auto bary_f = [&](const Simplex& s) { return to_doubles(barycenter(k.points_of(s))); };
  for (std::size_t si = 0; si < k.simplices().size(); ++si) {
    const Simplex& s = k.simplex(si);
    std::vector<std::size_t> cofaces;
    for (std::size_t m : maxi)
      if (m != si && s.is_face_of(k.simplex(m))) cofaces.push_back(m);
    if (cofaces.empty()) continue;
    auto x0 = bary_f(s);
    std::vector<double> dir;
    if (cofaces.size() >= 2) {
      auto a = bary_f(k.simplex(cofaces[0])), b = bary_f(k.simplex(cofaces[1]));
      for (std::size_t i = 0; i < a.size(); ++i) dir.push_back(a[i] - b[i]);
    } else {
      auto a = bary_f(k.simplex(cofaces[0]));
      for (std::size_t i = 0; i < a.size(); ++i) dir.push_back(a[i] - x0[i]);
    }
    double len = 0.0;
    for (double d : dir) len += d * d;
    len = std::sqrt(len);
    if (!(len > 0)) continue;
    for (double& d : dir) d *= step / len;
    int order;
    try {
      order = smoothness_order(f, x0, dir, nu_max).measured_order;
    } catch (const Error&) {
      order = -1;
    }
    report.per_seam.emplace_back(si, order);
    report.min_order = std::min(report.min_order, order);
    ++report.seams;
  }
  return report;
}

}  // namespace polysmooth
